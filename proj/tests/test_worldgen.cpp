#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>

#include "doctest.h"
#include "savnav/knowledge.hpp"
#include "savnav/rng.hpp"
#include "savnav/worldgen.hpp"
#include "test_util.hpp"

using namespace savnav;

namespace {

GenParams test_params() {
  static const GenParams params = [] {
    const auto kg = load_triples(testutil::data_path("kg_mp3d.triples"));
    return default_gen_params(kg);
  }();
  return params;
}

}  // namespace

TEST_CASE("generation is deterministic per (seed, params)") {
  const auto params = test_params();
  const HouseMap a = generate_house(7, params);
  const HouseMap b = generate_house(7, params);
  CHECK(house_hash(a) == house_hash(b));
  CHECK(house_to_json(a) == house_to_json(b));
  const HouseMap c = generate_house(8, params);
  CHECK(house_hash(a) != house_hash(c));
}

TEST_CASE("generated houses satisfy the map invariants") {
  const auto params = test_params();
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const HouseMap map = generate_house(seed, params);
    CHECK_NOTHROW(check_house_invariants(map));
    for (const ObjectInstance& obj : map.objects) CHECK(!obj.viewpoints.empty());
  }
}

TEST_CASE("placement prior zeros are respected exactly") {
  GenParams params = test_params();
  // towel may only appear in bathrooms
  const int towel = *vocab().object_index("towel");
  const int bathroom = *vocab().region_index("bathroom");
  for (int r = 0; r < Vocabulary::kRegions; ++r)
    params.placement(towel, r) = (r == bathroom) ? 1.0 : 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const HouseMap map = generate_house(seed, params);
    for (const ObjectInstance& obj : map.objects)
      if (obj.object_class == towel)
        CHECK(map.regions[map.at(obj.cell)].region_class == bathroom);
  }
}

TEST_CASE("geodesic distance: basics and Dijkstra oracle") {
  const auto map = testutil::make_strip_house({{"kitchen", {"chair"}}});
  const Vec2i a{1, 1};
  CHECK(geodesic_distance(map, a, a) == 0.0);
  CHECK(geodesic_distance(map, {1, 2}, {5, 2}) == doctest::Approx(4.0));  // corridor row
  CHECK_THROWS_AS(geodesic_distance(map, {0, 0}, a), Error);

  const auto params = test_params();
  Rng rng(99);
  for (int trial = 0; trial < 8; ++trial) {
    GenParams small = params;
    small.grid_min = 12;
    small.grid_max = 12;
    small.regions_min = 2;
    small.regions_max = 4;
    const HouseMap house = generate_house(1000 + trial, small);
    std::vector<Vec2i> free_cells;
    for (int y = 0; y < house.height; ++y)
      for (int x = 0; x < house.width; ++x)
        if (house.is_free({x, y})) free_cells.push_back({x, y});
    for (int k = 0; k < 20; ++k) {
      const Vec2i p = free_cells[rng.uniform_int(free_cells.size())];
      const Vec2i q = free_cells[rng.uniform_int(free_cells.size())];
      CHECK(geodesic_distance(house, p, q) == testutil::dijkstra_distance(house, p, q));
    }
  }
}

TEST_CASE("euclidean distance") {
  CHECK(euclidean_distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
  CHECK(euclidean_distance({2, 2}, {2, 2}) == 0.0);
  Rng rng(4);
  for (int k = 0; k < 50; ++k) {
    const Vec2i a{rng.int_in(-20, 20), rng.int_in(-20, 20)};
    const Vec2i b{rng.int_in(-20, 20), rng.int_in(-20, 20)};
    const double dx = a.x - b.x, dy = a.y - b.y;
    CHECK(euclidean_distance(a, b) == doctest::Approx(std::sqrt(dx * dx + dy * dy)));
  }
}

TEST_CASE("shortest path: endpoints, corridor, length cross-check") {
  const auto map = testutil::make_strip_house({{"kitchen", {"chair"}}});
  CHECK(shortest_path(map, {2, 2}, {2, 2}) == std::vector<Vec2i>{{2, 2}});

  const auto corridor = shortest_path(map, {1, 2}, {5, 2});
  CHECK(corridor.size() == 5);
  for (std::size_t i = 0; i + 1 < corridor.size(); ++i) {
    const int manhattan = std::abs(corridor[i].x - corridor[i + 1].x) +
                          std::abs(corridor[i].y - corridor[i + 1].y);
    CHECK(manhattan == 1);
  }

  const auto params = test_params();
  Rng rng(123);
  for (int trial = 0; trial < 5; ++trial) {
    const HouseMap house = generate_house(2000 + trial, params);
    std::vector<Vec2i> free_cells;
    for (int y = 0; y < house.height; ++y)
      for (int x = 0; x < house.width; ++x)
        if (house.is_free({x, y})) free_cells.push_back({x, y});
    for (int k = 0; k < 10; ++k) {
      const Vec2i p = free_cells[rng.uniform_int(free_cells.size())];
      const Vec2i q = free_cells[rng.uniform_int(free_cells.size())];
      const auto path = shortest_path(house, p, q);
      CHECK(static_cast<double>(path.size() - 1) == geodesic_distance(house, p, q));
    }
  }
}

TEST_CASE("viewpoints: open room, corridor end, corpus scan") {
  const auto map = testutil::make_strip_house({{"kitchen", {}}});
  ObjectInstance open;
  open.cell = {3, 2};  // interior cell, all four neighbours free
  CHECK(compute_viewpoints(map, open).size() == 4);
  ObjectInstance corner;
  corner.cell = {1, 1};  // room corner, two free neighbours
  CHECK(compute_viewpoints(map, corner).size() == 2);

  const auto params = test_params();
  const auto corpus = generate_corpus(3, 10, params);
  for (const HouseMap& house : corpus.houses)
    for (const ObjectInstance& obj : house.objects)
      CHECK(!compute_viewpoints(house, obj).empty());
}

TEST_CASE("corpus split ratios and determinism") {
  const auto params = test_params();
  const auto small = generate_corpus(11, 20, params);
  CHECK(small.seen.size() == 16);
  CHECK(small.unseen.size() == 4);

  const auto again = generate_corpus(11, 20, params);
  CHECK(again.seen == small.seen);
  CHECK(again.unseen == small.unseen);
  for (std::size_t i = 0; i < small.houses.size(); ++i)
    CHECK(house_hash(small.houses[i]) == house_hash(again.houses[i]));

  // full-scale split: 85 houses -> 68 seen / 17 unseen
  const auto full = generate_corpus(1, 85, params);
  CHECK(full.seen.size() == 68);
  CHECK(full.unseen.size() == 17);

  // seen and unseen partition the houses
  std::set<int> all(full.seen.begin(), full.seen.end());
  all.insert(full.unseen.begin(), full.unseen.end());
  CHECK(all.size() == 85);
}

TEST_CASE("geodesic is a metric and dominates euclidean") {
  const auto params = test_params();
  Rng rng(321);
  for (int trial = 0; trial < 5; ++trial) {
    const HouseMap house = generate_house(3000 + trial, params);
    std::vector<Vec2i> free_cells;
    for (int y = 0; y < house.height; ++y)
      for (int x = 0; x < house.width; ++x)
        if (house.is_free({x, y})) free_cells.push_back({x, y});
    for (int k = 0; k < 15; ++k) {
      const Vec2i a = free_cells[rng.uniform_int(free_cells.size())];
      const Vec2i b = free_cells[rng.uniform_int(free_cells.size())];
      const Vec2i c = free_cells[rng.uniform_int(free_cells.size())];
      const double ab = geodesic_distance(house, a, b);
      const double ba = geodesic_distance(house, b, a);
      const double ac = geodesic_distance(house, a, c);
      const double cb = geodesic_distance(house, c, b);
      CHECK(ab == ba);
      CHECK((ab == 0.0) == (a == b));
      CHECK(ab <= ac + cb + 1e-9);
      CHECK(ab >= euclidean_distance(a, b) - 1e-9);
    }
  }
}

TEST_CASE("house JSON round-trip") {
  const auto params = test_params();
  const HouseMap house = generate_house(42, params);
  const HouseMap loaded = house_from_json(house_to_json(house));
  CHECK(house_hash(loaded) == house_hash(house));
  CHECK(loaded.grid == house.grid);
  CHECK(loaded.objects.size() == house.objects.size());
}

TEST_CASE("KG reconstruction from a generated corpus recovers the strongest prior pairs") {
  const auto params = test_params();
  const auto corpus = generate_corpus(17, 200, params);
  const auto kg = build_knowledge_graph(corpus.houses);

  // Rank object pairs by joint placement-prior mass over regions.
  std::vector<std::pair<double, std::pair<int, int>>> ranked;
  for (int a = 0; a < Vocabulary::kObjects; ++a)
    for (int b = a + 1; b < Vocabulary::kObjects; ++b) {
      double mass = 0.0;
      for (int r = 0; r < Vocabulary::kRegions; ++r)
        mass += params.placement(a, r) * params.placement(b, r);
      ranked.push_back({mass, {a, b}});
    }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });
  for (int i = 0; i < 10; ++i) {
    const auto [a, b] = ranked[i].second;
    CAPTURE(vocab().objects()[a]);
    CAPTURE(vocab().objects()[b]);
    CHECK(kg.has_edge(a, b));
  }
}

TEST_CASE("infeasible generation parameters are rejected") {
  GenParams params = test_params();
  params.grid_min = 4;  // below the splittable minimum
  params.grid_max = 4;
  CHECK_THROWS_AS(generate_house(1, params), Error);
}
