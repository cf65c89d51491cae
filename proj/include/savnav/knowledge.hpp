#pragma once
// Object/region knowledge graph: co-occurrence statistics over a house corpus,
// threshold-based edge construction, Kipf-style normalization, triple
// serialization, and neighbourhood queries. Graphs are immutable once built.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "savnav/matrix.hpp"
#include "savnav/vocab.hpp"
#include "savnav/worldgen.hpp"

namespace savnav {

struct CooccurrenceStats {
  Mat count;     // 21x24, integral values
  Mat rel_freq;  // count / max object count within each region, in [0,1]
};

struct ObjectEdges {
  std::vector<std::pair<int, int>> edges;  // object index pairs, first < second
  double theta = 0.0;
  std::vector<std::string> warnings;
};

struct ObjectRegionEdges {
  std::vector<std::pair<int, int>> edges;  // (object index, region index)
};

struct RegionEdges {
  std::vector<std::pair<int, int>> edges;  // region index pairs, first < second
  double theta = 0.0;
  std::vector<std::string> warnings;
};

class KnowledgeGraph {
 public:
  KnowledgeGraph();

  /// 45x45 binary symmetric adjacency, zero diagonal.
  const Mat& a() const { return a_; }
  /// D^(-1/2) (A + I) D^(-1/2).
  const Mat& a_hat() const { return a_hat_; }
  double theta_oo() const { return theta_oo_; }
  double theta_rr() const { return theta_rr_; }

  bool has_edge(int u, int v) const { return a_(u, v) != 0.0; }
  /// Neighbour names of a vertex; name may use object:/region: qualifiers.
  std::vector<std::string> neighbors(const std::string& name) const;

  friend KnowledgeGraph assemble_graph(const ObjectEdges&, const ObjectRegionEdges&,
                                       const RegionEdges&);
  friend KnowledgeGraph load_triples(const std::string& path);

 private:
  Mat a_;
  Mat a_hat_;
  double theta_oo_ = 0.0, theta_rr_ = 0.0;
};

/// Exact instance tallies per (object, region) over the corpus, plus relative
/// frequency w.r.t. the most frequent object of each region.
CooccurrenceStats count_cooccurrence(const std::vector<HouseMap>& corpus);

/// Object-object edges: the pair must clear the threshold in the same region;
/// threshold = largest relFreq value keeping every corpus-present object
/// connected (0 fallback, with warnings for objects left isolated).
ObjectEdges build_object_object_edges(const CooccurrenceStats& stats);

/// (o, r) edge iff some o' != o with (o, o') an object-object edge occurs in r.
ObjectRegionEdges build_object_region_edges(const ObjectEdges& oo, const CooccurrenceStats& stats);

/// Weight function for a region pair given the object-object edges and stats.
using RegionPairWeight =
    std::function<double(const ObjectEdges&, const CooccurrenceStats&, int r1, int r2)>;

/// Default weight: fraction of object-object edges whose both endpoints occur
/// in both regions.
double shared_edge_fraction(const ObjectEdges& oo, const CooccurrenceStats& stats, int r1, int r2);

RegionEdges build_region_region_edges(const ObjectEdges& oo, const CooccurrenceStats& stats,
                                      const RegionPairWeight& weight = shared_edge_fraction);

KnowledgeGraph assemble_graph(const ObjectEdges& oo, const ObjectRegionEdges& obj_region,
                              const RegionEdges& rr);

Mat normalize_adjacency(const Mat& a);

void save_triples(const KnowledgeGraph& kg, const std::string& path);
KnowledgeGraph load_triples(const std::string& path);

/// JSON dump of A/Ahat with the vocabulary ordering header.
std::string graph_to_json(const KnowledgeGraph& kg);

/// Full construction pipeline on a corpus.
KnowledgeGraph build_knowledge_graph(const std::vector<HouseMap>& corpus);

}  // namespace savnav
