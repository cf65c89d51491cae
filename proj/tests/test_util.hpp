#pragma once
// Shared test helpers: hand-built strip houses for knowledge-graph tests and
// a few numeric oracles (Jacobi eigenvalues, independent Dijkstra).

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "savnav/knowledge.hpp"
#include "savnav/vocab.hpp"
#include "savnav/worldgen.hpp"

namespace savnav::testutil {

/// A horizontal strip of rooms (5x3 each) joined by doors; objects placed on
/// distinct cells inside their room. rooms = {(regionName, {objectName...})}.
inline HouseMap make_strip_house(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& rooms) {
  HouseMap map;
  const int n = static_cast<int>(rooms.size());
  map.width = 1 + n * 6;
  map.height = 5;
  map.seed = 0;
  map.grid.assign(static_cast<std::size_t>(map.width) * map.height, kWall);

  for (int i = 0; i < n; ++i) {
    RegionInstance region;
    auto idx = vocab().region_index(rooms[i].first);
    if (!idx) fail("test", "unknown region name " + rooms[i].first);
    region.region_class = *idx;
    const int x0 = 1 + i * 6;
    for (int y = 1; y <= 3; ++y)
      for (int x = x0; x < x0 + 5; ++x) {
        map.grid[static_cast<std::size_t>(y) * map.width + x] = static_cast<std::int16_t>(i);
        region.cells.push_back({x, y});
      }
    if (i + 1 < n) {  // door to the next room, assigned to this room
      const Vec2i door{x0 + 5, 2};
      map.grid[static_cast<std::size_t>(door.y) * map.width + door.x] =
          static_cast<std::int16_t>(i);
      region.cells.push_back(door);
    }
    map.regions.push_back(std::move(region));
  }
  for (int i = 0; i < n; ++i) {
    const int x0 = 1 + i * 6;
    int slot = 0;
    for (const std::string& name : rooms[i].second) {
      ObjectInstance obj;
      auto idx = vocab().object_index(name);
      if (!idx) fail("test", "unknown object name " + name);
      obj.object_class = *idx;
      obj.cell = {x0 + slot % 5, 1 + slot / 5};
      ++slot;
      obj.viewpoints = compute_viewpoints(map, obj);
      map.objects.push_back(std::move(obj));
    }
  }
  return map;
}

// --- independent knowledge-graph oracle (direct rule evaluation) ---------------

struct KgOracle {
  std::vector<std::pair<int, int>> oo, obj_region, rr;
  double theta_oo = 0.0, theta_rr = 0.0;
};

inline KgOracle kg_oracle(const CooccurrenceStats& s) {
  constexpr int kO = Vocabulary::kObjects;
  constexpr int kR = Vocabulary::kRegions;
  KgOracle out;

  auto present_o = [&](int o) {
    for (int r = 0; r < kR; ++r)
      if (s.count(o, r) > 0) return true;
    return false;
  };
  auto present_r = [&](int r) {
    for (int o = 0; o < kO; ++o)
      if (s.count(o, r) > 0) return true;
    return false;
  };

  // Exhaustive threshold sweep for object-object edges.
  std::vector<double> values{0.0};
  for (int o = 0; o < kO; ++o)
    for (int r = 0; r < kR; ++r)
      if (s.rel_freq(o, r) > 0) values.push_back(s.rel_freq(o, r));
  std::sort(values.begin(), values.end(), std::greater<double>());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  auto candidates_at = [&](double t) {
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < kO; ++a)
      for (int b = a + 1; b < kO; ++b)
        for (int r = 0; r < kR; ++r)
          if (s.count(a, r) > 0 && s.count(b, r) > 0 && s.rel_freq(a, r) >= t &&
              s.rel_freq(b, r) >= t) {
            edges.emplace_back(a, b);
            break;
          }
    return edges;
  };
  auto all_covered_o = [&](const std::vector<std::pair<int, int>>& edges) {
    for (int o = 0; o < kO; ++o) {
      if (!present_o(o)) continue;
      bool hit = false;
      for (auto [a, b] : edges) hit = hit || a == o || b == o;
      if (!hit) return false;
    }
    return true;
  };
  bool found = false;
  for (double t : values) {
    auto edges = candidates_at(t);
    if (all_covered_o(edges)) {
      out.oo = edges;
      out.theta_oo = t;
      found = true;
      break;
    }
  }
  if (!found) {
    out.theta_oo = 0.0;
    out.oo = candidates_at(0.0);
  }

  // Object-region rule, directly.
  for (int o = 0; o < kO; ++o)
    for (int r = 0; r < kR; ++r) {
      bool edge = false;
      for (auto [a, b] : out.oo) {
        const int other = a == o ? b : b == o ? a : -1;
        if (other >= 0 && s.count(other, r) > 0) edge = true;
      }
      if (edge) out.obj_region.emplace_back(o, r);
    }

  // Region-region sweep over pair weights.
  if (!out.oo.empty()) {
    std::map<std::pair<int, int>, double> w;
    std::vector<double> wvalues;
    for (int r1 = 0; r1 < kR; ++r1)
      for (int r2 = r1 + 1; r2 < kR; ++r2) {
        int shared = 0;
        for (auto [a, b] : out.oo)
          if (s.count(a, r1) > 0 && s.count(b, r1) > 0 && s.count(a, r2) > 0 &&
              s.count(b, r2) > 0)
            ++shared;
        const double weight = static_cast<double>(shared) / out.oo.size();
        w[{r1, r2}] = weight;
        if (weight > 0) wvalues.push_back(weight);
      }
    std::sort(wvalues.begin(), wvalues.end(), std::greater<double>());
    wvalues.erase(std::unique(wvalues.begin(), wvalues.end()), wvalues.end());

    auto rr_at = [&](double t) {
      std::vector<std::pair<int, int>> edges;
      for (const auto& [pair, weight] : w)
        if (weight > 0 && weight >= t) edges.push_back(pair);
      return edges;
    };
    auto all_covered_r = [&](const std::vector<std::pair<int, int>>& edges) {
      for (int r = 0; r < kR; ++r) {
        if (!present_r(r)) continue;
        bool hit = false;
        for (auto [a, b] : edges) hit = hit || a == r || b == r;
        if (!hit) return false;
      }
      return true;
    };
    bool rr_found = false;
    for (double t : wvalues) {
      auto edges = rr_at(t);
      if (all_covered_r(edges)) {
        out.rr = edges;
        out.theta_rr = t;
        rr_found = true;
        break;
      }
    }
    if (!rr_found) {
      out.theta_rr = 0.0;
      out.rr = rr_at(0.0);
    }
  }
  return out;
}

// --- numeric oracles ------------------------------------------------------------

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations.
inline std::vector<double> jacobi_eigenvalues(Mat a) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-18) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  return eig;
}

/// Independent Dijkstra over Free cells (the implementation uses BFS).
inline double dijkstra_distance(const HouseMap& map, Vec2i a, Vec2i b) {
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  std::vector<double> dist(static_cast<std::size_t>(map.width) * map.height, kInfDistance);
  dist[map.cell_index(a)] = 0.0;
  heap.push({0.0, map.cell_index(a)});
  while (!heap.empty()) {
    auto [d, idx] = heap.top();
    heap.pop();
    if (d > dist[idx]) continue;
    const Vec2i c{idx % map.width, idx / map.width};
    if (c == b) return d;
    const Vec2i neighbors[4] = {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
    for (Vec2i nb : neighbors)
      if (map.is_free(nb) && d + 1.0 < dist[map.cell_index(nb)]) {
        dist[map.cell_index(nb)] = d + 1.0;
        heap.push({d + 1.0, map.cell_index(nb)});
      }
  }
  return kInfDistance;
}

inline std::string data_path(const std::string& name) {
  return std::string(SAVNAV_DATA_DIR) + "/" + name;
}
inline std::string golden_path(const std::string& name) {
  return std::string(SAVNAV_GOLDEN_DIR) + "/" + name;
}

}  // namespace savnav::testutil
