#include "savnav/worldgen.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "json.hpp"
#include "savnav/error.hpp"
#include "savnav/knowledge.hpp"
#include "savnav/rng.hpp"

namespace savnav {

Vec2i heading_dir(int heading_deg) {
  switch (((heading_deg % 360) + 360) % 360) {
    case 0: return {1, 0};
    case 90: return {0, 1};
    case 180: return {-1, 0};
    case 270: return {0, -1};
    default: fail("pose", "heading must be a multiple of 90: " + std::to_string(heading_deg));
  }
}

namespace {

constexpr int kDirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

struct Rect {
  int x0, y0, x1, y1;  // inclusive
  int w() const { return x1 - x0 + 1; }
  int h() const { return y1 - y0 + 1; }
  bool contains(Vec2i c) const { return c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1; }
};

struct Split {
  bool vertical;  // wall along a column
  int coord;      // the wall column/row
  Rect span;      // the rect that was split (wall runs across it)
};

// Rooms must keep at least 3 cells on each side of a new wall.
constexpr int kMinRoomSide = 3;

bool try_generate(std::uint64_t seed, std::uint64_t attempt, const GenParams& p, HouseMap& out) {
  Rng rng(seed_mix(seed, "house", attempt));
  const int width = rng.int_in(p.grid_min, p.grid_max);
  const int height = rng.int_in(p.grid_min, p.grid_max);
  const int target_rooms = rng.int_in(p.regions_min, p.regions_max);

  out = HouseMap{};
  out.width = width;
  out.height = height;
  out.seed = seed;
  out.grid.assign(static_cast<std::size_t>(width) * height, kWall);

  std::vector<Rect> rooms{{1, 1, width - 2, height - 2}};
  std::vector<Split> splits;

  while (static_cast<int>(rooms.size()) < target_rooms) {
    // Split the largest splittable room.
    int best = -1, best_area = -1;
    for (std::size_t i = 0; i < rooms.size(); ++i) {
      const Rect& r = rooms[i];
      const int longest = std::max(r.w(), r.h());
      if (longest >= 2 * kMinRoomSide + 1 && r.w() * r.h() > best_area) {
        best_area = r.w() * r.h();
        best = static_cast<int>(i);
      }
    }
    if (best < 0) break;
    Rect r = rooms[best];
    const bool vertical = r.w() >= r.h();
    if (vertical) {
      const int c = rng.int_in(r.x0 + kMinRoomSide, r.x1 - kMinRoomSide);
      splits.push_back({true, c, r});
      rooms[best] = {r.x0, r.y0, c - 1, r.y1};
      rooms.push_back({c + 1, r.y0, r.x1, r.y1});
    } else {
      const int c = rng.int_in(r.y0 + kMinRoomSide, r.y1 - kMinRoomSide);
      splits.push_back({false, c, r});
      rooms[best] = {r.x0, r.y0, r.x1, c - 1};
      rooms.push_back({r.x0, c + 1, r.x1, r.y1});
    }
  }

  // Carve room interiors; walls stay kWall until regions are labelled.
  auto room_of = [&](Vec2i c) -> int {
    for (std::size_t i = 0; i < rooms.size(); ++i)
      if (rooms[i].contains(c)) return static_cast<int>(i);
    return -1;
  };
  for (std::size_t i = 0; i < rooms.size(); ++i)
    for (int y = rooms[i].y0; y <= rooms[i].y1; ++y)
      for (int x = rooms[i].x0; x <= rooms[i].x1; ++x)
        out.grid[static_cast<std::size_t>(y) * width + x] = static_cast<std::int16_t>(i);

  // Doors: one per split wall, placed where both sides are room cells. Later
  // perpendicular walls can cross earlier ones, so doors are chosen last.
  std::vector<std::pair<int, int>> door_links;  // room adjacency via doors
  for (const Split& s : splits) {
    std::vector<Vec2i> options;
    if (s.vertical) {
      for (int y = s.span.y0; y <= s.span.y1; ++y) {
        Vec2i left{s.coord - 1, y}, right{s.coord + 1, y};
        if (out.is_free(left) && out.is_free(right)) options.push_back({s.coord, y});
      }
    } else {
      for (int x = s.span.x0; x <= s.span.x1; ++x) {
        Vec2i up{x, s.coord - 1}, down{x, s.coord + 1};
        if (out.is_free(up) && out.is_free(down)) options.push_back({x, s.coord});
      }
    }
    if (options.empty()) return false;  // retry with a fresh attempt stream
    const Vec2i door = options[rng.uniform_int(options.size())];
    const Vec2i a = s.vertical ? Vec2i{door.x - 1, door.y} : Vec2i{door.x, door.y - 1};
    const Vec2i b = s.vertical ? Vec2i{door.x + 1, door.y} : Vec2i{door.x, door.y + 1};
    const int ra = room_of(a), rb = room_of(b);
    if (ra < 0 || rb < 0) return false;
    // The door cell joins the lower-indexed room so the partition stays exact.
    out.grid[static_cast<std::size_t>(door.y) * width + door.x] =
        static_cast<std::int16_t>(std::min(ra, rb));
    door_links.emplace_back(ra, rb);
  }

  // Region labels via the adjacency prior, spreading from room 0.
  require(p.region_adjacency.rows() == Vocabulary::kRegions &&
              p.region_adjacency.cols() == Vocabulary::kRegions,
          "worldgen", "region_adjacency must be 24x24");
  require(p.placement.rows() == Vocabulary::kObjects && p.placement.cols() == Vocabulary::kRegions,
          "worldgen", "placement must be 21x24");
  std::vector<std::vector<int>> adj(rooms.size());
  for (auto [a, b] : door_links) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> labels(rooms.size(), -1);
  auto sample_weighted = [&](const Vec& w) -> int {
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (total <= 0.0) return rng.int_in(0, static_cast<int>(w.size()) - 1);
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
      u -= w[i];
      if (u < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(w.size()) - 1;
  };
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    Vec w(Vocabulary::kRegions, 0.0);
    bool any_neighbor = false;
    for (int nb : adj[i])
      if (labels[nb] >= 0) {
        any_neighbor = true;
        for (int r = 0; r < Vocabulary::kRegions; ++r) w[r] += p.region_adjacency(r, labels[nb]);
      }
    if (!any_neighbor)
      for (int r = 0; r < Vocabulary::kRegions; ++r)
        for (int r2 = 0; r2 < Vocabulary::kRegions; ++r2) w[r] += p.region_adjacency(r, r2);
    labels[i] = sample_weighted(w);
  }

  out.regions.resize(rooms.size());
  for (std::size_t i = 0; i < rooms.size(); ++i) out.regions[i].region_class = labels[i];
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const std::int16_t v = out.grid[static_cast<std::size_t>(y) * width + x];
      if (v != kWall) out.regions[v].cells.push_back({x, y});
    }

  // Objects: per room, biassed by the placement prior for its label.
  // Zero-probability entries are respected exactly.
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    const int label = labels[i];
    Vec w(Vocabulary::kObjects, 0.0);
    double total = 0.0;
    for (int o = 0; o < Vocabulary::kObjects; ++o) {
      w[o] = p.placement(o, label);
      total += w[o];
    }
    if (total <= 0.0) continue;  // nothing may be placed in this region label
    const int want = rng.int_in(p.objects_per_region_min, p.objects_per_region_max);
    std::vector<Vec2i> eligible;
    for (Vec2i c : out.regions[i].cells) {
      bool has_free_neighbor = false;
      for (auto [dx, dy] : kDirs)
        if (out.is_free({c.x + dx, c.y + dy})) has_free_neighbor = true;
      if (has_free_neighbor) eligible.push_back(c);
    }
    for (int k = 0; k < want && !eligible.empty(); ++k) {
      const int cls = sample_weighted(w);
      const std::size_t slot = rng.uniform_int(eligible.size());
      ObjectInstance obj;
      obj.object_class = cls;
      obj.cell = eligible[slot];
      eligible.erase(eligible.begin() + static_cast<std::ptrdiff_t>(slot));
      obj.viewpoints = compute_viewpoints(out, obj);
      out.objects.push_back(std::move(obj));
    }
  }
  if (out.objects.empty()) return false;

  // Connectivity over Free cells.
  Vec2i start = out.regions[0].cells.front();
  const auto dist = bfs_distances(out, start);
  for (int idx = 0; idx < width * height; ++idx)
    if (out.grid[idx] != kWall && dist[idx] < 0) return false;

  return true;
}

}  // namespace

HouseMap generate_house(std::uint64_t seed, const GenParams& params) {
  require(params.grid_min >= 9 && params.grid_max >= params.grid_min, "worldgen",
          "grid size range invalid");
  require(params.regions_min >= 1 && params.regions_max >= params.regions_min, "worldgen",
          "region count range invalid");
  constexpr std::uint64_t kMaxAttempts = 32;
  HouseMap map;
  for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt)
    if (try_generate(seed, attempt, params, map)) return map;
  fail("worldgen", "could not generate a valid house for seed " + std::to_string(seed) +
                       " within " + std::to_string(kMaxAttempts) + " attempts");
}

std::vector<int> bfs_distances(const HouseMap& map, Vec2i from) {
  std::vector<int> dist(static_cast<std::size_t>(map.width) * map.height, -1);
  if (!map.is_free(from)) return dist;
  std::deque<Vec2i> queue{from};
  dist[map.cell_index(from)] = 0;
  while (!queue.empty()) {
    const Vec2i c = queue.front();
    queue.pop_front();
    const int d = dist[map.cell_index(c)];
    for (auto [dx, dy] : kDirs) {
      const Vec2i n{c.x + dx, c.y + dy};
      if (map.is_free(n) && dist[map.cell_index(n)] < 0) {
        dist[map.cell_index(n)] = d + 1;
        queue.push_back(n);
      }
    }
  }
  return dist;
}

double geodesic_distance(const HouseMap& map, Vec2i a, Vec2i b) {
  require(map.is_free(a), "geometry", "geodesic endpoint a is not a Free cell");
  require(map.is_free(b), "geometry", "geodesic endpoint b is not a Free cell");
  if (a == b) return 0.0;
  const auto dist = bfs_distances(map, a);
  const int d = dist[map.cell_index(b)];
  return d < 0 ? kInfDistance : static_cast<double>(d);
}

double euclidean_distance(Vec2i a, Vec2i b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

std::vector<Vec2i> shortest_path(const HouseMap& map, Vec2i a, Vec2i b) {
  require(map.is_free(a), "geometry", "path endpoint a is not a Free cell");
  require(map.is_free(b), "geometry", "path endpoint b is not a Free cell");
  if (a == b) return {a};
  const auto dist = bfs_distances(map, a);
  require(dist[map.cell_index(b)] >= 0, "geometry", "endpoints are disconnected");
  // Walk home along strictly decreasing distances; fixed direction order keeps
  // the path deterministic.
  std::vector<Vec2i> rev{b};
  Vec2i cur = b;
  while (!(cur == a)) {
    const int d = dist[map.cell_index(cur)];
    for (auto [dx, dy] : kDirs) {
      const Vec2i n{cur.x + dx, cur.y + dy};
      if (map.is_free(n) && dist[map.cell_index(n)] == d - 1) {
        cur = n;
        break;
      }
    }
    rev.push_back(cur);
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

std::vector<Vec2i> compute_viewpoints(const HouseMap& map, const ObjectInstance& obj) {
  std::vector<Vec2i> out;
  for (auto [dx, dy] : kDirs) {
    const Vec2i n{obj.cell.x + dx, obj.cell.y + dy};
    if (map.is_free(n)) out.push_back(n);
  }
  return out;
}

Corpus generate_corpus(std::uint64_t master_seed, int n_houses, const GenParams& params) {
  require(n_houses >= 5, "worldgen", "corpus needs at least 5 houses");
  Corpus corpus;
  corpus.master_seed = master_seed;
  corpus.houses.reserve(n_houses);
  for (int i = 0; i < n_houses; ++i) {
    try {
      corpus.houses.push_back(generate_house(seed_mix(master_seed, "corpus-house", i), params));
    } catch (const Error& e) {
      fail("worldgen", "house " + std::to_string(i) + ": " + e.what());
    }
  }
  std::vector<int> order(n_houses);
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(seed_mix(master_seed, "corpus-split"));
  for (int i = n_houses - 1; i > 0; --i)
    std::swap(order[i], order[shuffle_rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);
  const int n_seen = n_houses * 4 / 5;
  corpus.seen.assign(order.begin(), order.begin() + n_seen);
  corpus.unseen.assign(order.begin() + n_seen, order.end());
  std::sort(corpus.seen.begin(), corpus.seen.end());
  std::sort(corpus.unseen.begin(), corpus.unseen.end());
  return corpus;
}

GenParams default_gen_params(const KnowledgeGraph& kg) {
  GenParams p;
  p.region_adjacency = Mat(Vocabulary::kRegions, Vocabulary::kRegions);
  p.placement = Mat(Vocabulary::kObjects, Vocabulary::kRegions);
  for (int r1 = 0; r1 < Vocabulary::kRegions; ++r1)
    for (int r2 = 0; r2 < Vocabulary::kRegions; ++r2) {
      const bool edge = kg.has_edge(Vocabulary::kObjects + r1, Vocabulary::kObjects + r2);
      p.region_adjacency(r1, r2) = r1 == r2 ? 0.15 : (edge ? 1.0 : 0.08);
    }
  for (int o = 0; o < Vocabulary::kObjects; ++o)
    for (int r = 0; r < Vocabulary::kRegions; ++r)
      p.placement(o, r) = kg.has_edge(o, Vocabulary::kObjects + r) ? 1.0 : 0.02;
  return p;
}

namespace {

nlohmann::json house_json(const HouseMap& map) {
  nlohmann::json j;
  j["seed"] = map.seed;
  j["width"] = map.width;
  j["height"] = map.height;
  // Row-major run-length encoding of (value, run).
  nlohmann::json rle = nlohmann::json::array();
  std::size_t i = 0;
  while (i < map.grid.size()) {
    std::size_t run = 1;
    while (i + run < map.grid.size() && map.grid[i + run] == map.grid[i]) ++run;
    rle.push_back({map.grid[i], run});
    i += run;
  }
  j["grid_rle"] = std::move(rle);
  nlohmann::json regions = nlohmann::json::array();
  for (const RegionInstance& r : map.regions) regions.push_back(vocab().regions()[r.region_class]);
  j["regions"] = std::move(regions);
  nlohmann::json objects = nlohmann::json::array();
  for (const ObjectInstance& o : map.objects)
    objects.push_back({{"class", vocab().objects()[o.object_class]}, {"x", o.cell.x}, {"y", o.cell.y}});
  j["objects"] = std::move(objects);
  return j;
}

HouseMap house_from(const nlohmann::json& j) {
  HouseMap map;
  map.seed = j.at("seed").get<std::uint64_t>();
  map.width = j.at("width").get<int>();
  map.height = j.at("height").get<int>();
  map.grid.reserve(static_cast<std::size_t>(map.width) * map.height);
  for (const auto& pair : j.at("grid_rle")) {
    const auto value = pair.at(0).get<std::int16_t>();
    const auto run = pair.at(1).get<std::size_t>();
    map.grid.insert(map.grid.end(), run, value);
  }
  require(map.grid.size() == static_cast<std::size_t>(map.width) * map.height, "io",
          "grid RLE length mismatch");
  for (const auto& name : j.at("regions")) {
    RegionInstance r;
    auto idx = vocab().region_index(name.get<std::string>());
    require(idx.has_value(), "io", "unknown region name in house file");
    r.region_class = *idx;
    map.regions.push_back(std::move(r));
  }
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      const std::int16_t v = map.grid[static_cast<std::size_t>(y) * map.width + x];
      if (v != kWall) {
        require(v >= 0 && v < static_cast<int>(map.regions.size()), "io",
                "grid references missing region");
        map.regions[v].cells.push_back({x, y});
      }
    }
  for (const auto& o : j.at("objects")) {
    ObjectInstance obj;
    auto idx = vocab().object_index(o.at("class").get<std::string>());
    require(idx.has_value(), "io", "unknown object name in house file");
    obj.object_class = *idx;
    obj.cell = {o.at("x").get<int>(), o.at("y").get<int>()};
    obj.viewpoints = compute_viewpoints(map, obj);
    map.objects.push_back(std::move(obj));
  }
  return map;
}

}  // namespace

std::string house_to_json(const HouseMap& map) { return house_json(map).dump(); }

HouseMap house_from_json(const std::string& text) {
  return house_from(nlohmann::json::parse(text));
}

std::string corpus_to_json(const Corpus& corpus) {
  nlohmann::json j;
  j["master_seed"] = corpus.master_seed;
  j["seen"] = corpus.seen;
  j["unseen"] = corpus.unseen;
  nlohmann::json houses = nlohmann::json::array();
  for (const HouseMap& h : corpus.houses) houses.push_back(house_json(h));
  j["houses"] = std::move(houses);
  return j.dump();
}

Corpus corpus_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Corpus corpus;
  corpus.master_seed = j.at("master_seed").get<std::uint64_t>();
  corpus.seen = j.at("seen").get<std::vector<int>>();
  corpus.unseen = j.at("unseen").get<std::vector<int>>();
  for (const auto& h : j.at("houses")) corpus.houses.push_back(house_from(h));
  return corpus;
}

std::uint64_t house_hash(const HouseMap& map) { return fnv1a64(house_to_json(map)); }

void check_house_invariants(const HouseMap& map) {
  require(map.width > 0 && map.height > 0, "invariant", "empty house");
  int free_count = 0;
  std::size_t region_cell_total = 0;
  for (const RegionInstance& r : map.regions) region_cell_total += r.cells.size();
  Vec2i any_free{-1, -1};
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (map.is_free({x, y})) {
        ++free_count;
        any_free = {x, y};
      }
  require(region_cell_total == static_cast<std::size_t>(free_count), "invariant",
          "regions do not partition the Free cells");
  require(free_count > 0, "invariant", "house has no Free cells");
  const auto dist = bfs_distances(map, any_free);
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      require(!map.is_free({x, y}) || dist[map.cell_index({x, y})] >= 0, "invariant",
              "Free cells are not connected");
  for (const ObjectInstance& obj : map.objects) {
    require(map.is_free(obj.cell), "invariant", "object on a non-Free cell");
    require(!obj.viewpoints.empty(), "invariant", "object has no viewpoints");
    for (Vec2i v : obj.viewpoints) {
      require(map.is_free(v), "invariant", "viewpoint not Free");
      require(std::abs(v.x - obj.cell.x) + std::abs(v.y - obj.cell.y) == 1, "invariant",
              "viewpoint not 4-adjacent");
    }
  }
}

}  // namespace savnav
