#pragma once
// Synthetic grid houses: generation, geometry queries, serialization.
// Cells are 1 m apart; motion is 4-connected with 90-degree headings.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "savnav/matrix.hpp"

namespace savnav {

struct Vec2i {
  int x = 0, y = 0;
  bool operator==(const Vec2i&) const = default;
};

/// Unit step for a cardinal heading (0 deg = +x, 90 deg = +y).
Vec2i heading_dir(int heading_deg);

struct Pose {
  Vec2i cell;
  int heading_deg = 0;  // one of 0, 90, 180, 270
  bool operator==(const Pose&) const = default;
};

struct ObjectInstance {
  int object_class = 0;  // index into vocab().objects()
  Vec2i cell;
  std::vector<Vec2i> viewpoints;  // Free 4-neighbours of cell
};

struct RegionInstance {
  int region_class = 0;  // index into vocab().regions()
  std::vector<Vec2i> cells;
};

constexpr std::int16_t kWall = -1;

struct HouseMap {
  int width = 0, height = 0;
  std::vector<std::int16_t> grid;  // row-major; kWall or region instance index
  std::vector<RegionInstance> regions;
  std::vector<ObjectInstance> objects;
  std::uint64_t seed = 0;

  bool in_bounds(Vec2i c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  }
  std::int16_t at(Vec2i c) const { return grid[static_cast<std::size_t>(c.y) * width + c.x]; }
  bool is_free(Vec2i c) const { return in_bounds(c) && at(c) != kWall; }
  int cell_index(Vec2i c) const { return c.y * width + c.x; }
};

struct GenParams {
  int grid_min = 24, grid_max = 32;
  int regions_min = 5, regions_max = 9;
  int objects_per_region_min = 1, objects_per_region_max = 3;
  Mat region_adjacency;  // 24x24 weights
  Mat placement;         // 21x24 probabilities (zeros are respected exactly)
};

class KnowledgeGraph;  // knowledge.hpp

/// Default priors derived from a knowledge graph: placement follows AtLocation
/// edges, region adjacency follows region-region edges (plus a small floor so
/// every label stays reachable).
GenParams default_gen_params(const KnowledgeGraph& kg);

/// Deterministic multi-room house; identical (seed, params) give identical maps.
HouseMap generate_house(std::uint64_t seed, const GenParams& params);

constexpr double kInfDistance = std::numeric_limits<double>::infinity();

/// BFS distances (in cells) from `from` over Free cells; -1 = unreachable.
std::vector<int> bfs_distances(const HouseMap& map, Vec2i from);

double geodesic_distance(const HouseMap& map, Vec2i a, Vec2i b);
double euclidean_distance(Vec2i a, Vec2i b);
std::vector<Vec2i> shortest_path(const HouseMap& map, Vec2i a, Vec2i b);
std::vector<Vec2i> compute_viewpoints(const HouseMap& map, const ObjectInstance& obj);

struct Corpus {
  std::uint64_t master_seed = 0;
  std::vector<HouseMap> houses;
  std::vector<int> seen;    // house indices
  std::vector<int> unseen;  // house indices
};

/// nHouses deterministic houses split 80/20 seen/unseen by seeded shuffle.
Corpus generate_corpus(std::uint64_t master_seed, int n_houses, const GenParams& params);

// --- serialization -----------------------------------------------------------

std::string house_to_json(const HouseMap& map);
HouseMap house_from_json(const std::string& text);
std::string corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const std::string& text);

/// Stable content hash of the serialized house (determinism checks).
std::uint64_t house_hash(const HouseMap& map);

void check_house_invariants(const HouseMap& map);

}  // namespace savnav
