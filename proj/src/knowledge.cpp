#include "savnav/knowledge.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace savnav {
namespace {

constexpr int kO = Vocabulary::kObjects;
constexpr int kR = Vocabulary::kRegions;
constexpr int kV = Vocabulary::kVertices;

bool object_present(const CooccurrenceStats& s, int o) {
  for (int r = 0; r < kR; ++r)
    if (s.count(o, r) > 0) return true;
  return false;
}

bool region_present(const CooccurrenceStats& s, int r) {
  for (int o = 0; o < kO; ++o)
    if (s.count(o, r) > 0) return true;
  return false;
}

// Candidate object-object edges at threshold t. Both objects must actually
// occur in the shared region; relFreq >= t alone would connect absent objects
// once t reaches 0.
std::vector<std::pair<int, int>> oo_candidates(const CooccurrenceStats& s, double t) {
  std::vector<std::pair<int, int>> edges;
  for (int o1 = 0; o1 < kO; ++o1)
    for (int o2 = o1 + 1; o2 < kO; ++o2) {
      for (int r = 0; r < kR; ++r) {
        if (s.count(o1, r) > 0 && s.count(o2, r) > 0 && s.rel_freq(o1, r) >= t &&
            s.rel_freq(o2, r) >= t) {
          edges.emplace_back(o1, o2);
          break;
        }
      }
    }
  return edges;
}

}  // namespace

CooccurrenceStats count_cooccurrence(const std::vector<HouseMap>& corpus) {
  CooccurrenceStats s{Mat(kO, kR), Mat(kO, kR)};
  for (std::size_t h = 0; h < corpus.size(); ++h) {
    const HouseMap& house = corpus[h];
    for (const ObjectInstance& obj : house.objects) {
      require(obj.object_class >= 0 && obj.object_class < kO, "knowledge",
              "unknown object class " + std::to_string(obj.object_class) + " in house " +
                  std::to_string(h));
      const std::int16_t region = house.at(obj.cell);
      require(region != kWall, "knowledge",
              "object on a wall cell in house " + std::to_string(h));
      const int rc = house.regions[region].region_class;
      require(rc >= 0 && rc < kR, "knowledge",
              "unknown region class " + std::to_string(rc) + " in house " + std::to_string(h));
      s.count(obj.object_class, rc) += 1.0;
    }
  }
  for (int r = 0; r < kR; ++r) {
    double max_count = 0.0;
    for (int o = 0; o < kO; ++o) max_count = std::max(max_count, s.count(o, r));
    if (max_count == 0.0) continue;  // empty region column stays all-zero
    for (int o = 0; o < kO; ++o) s.rel_freq(o, r) = s.count(o, r) / max_count;
  }
  return s;
}

ObjectEdges build_object_object_edges(const CooccurrenceStats& stats) {
  ObjectEdges out;
  std::vector<int> present;
  for (int o = 0; o < kO; ++o) {
    if (object_present(stats, o))
      present.push_back(o);
    else
      out.warnings.push_back("object '" + vocab().objects()[o] +
                             "' absent from corpus; left isolated");
  }

  // Distinct positive relFreq values, descending, with 0 as the final fallback.
  std::set<double, std::greater<double>> values;
  for (int o = 0; o < kO; ++o)
    for (int r = 0; r < kR; ++r)
      if (stats.rel_freq(o, r) > 0.0) values.insert(stats.rel_freq(o, r));
  std::vector<double> thresholds(values.begin(), values.end());
  thresholds.push_back(0.0);

  auto covers_all = [&](const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> degree(kO, 0);
    for (auto [a, b] : edges) {
      ++degree[a];
      ++degree[b];
    }
    for (int o : present)
      if (degree[o] == 0) return false;
    return true;
  };

  for (double t : thresholds) {
    auto edges = oo_candidates(stats, t);
    if (covers_all(edges)) {
      out.edges = std::move(edges);
      out.theta = t;
      return out;
    }
  }

  // No threshold connects every present object (e.g. a lone object class).
  out.theta = 0.0;
  out.edges = oo_candidates(stats, 0.0);
  std::vector<int> degree(kO, 0);
  for (auto [a, b] : out.edges) {
    ++degree[a];
    ++degree[b];
  }
  for (int o : present)
    if (degree[o] == 0)
      out.warnings.push_back("object '" + vocab().objects()[o] +
                             "' cannot be connected at any threshold");
  return out;
}

ObjectRegionEdges build_object_region_edges(const ObjectEdges& oo, const CooccurrenceStats& stats) {
  ObjectRegionEdges out;
  for (int o = 0; o < kO; ++o) {
    for (int r = 0; r < kR; ++r) {
      bool connected = false;
      for (auto [a, b] : oo.edges) {
        const int other = (a == o) ? b : (b == o) ? a : -1;
        if (other >= 0 && stats.count(other, r) > 0) {
          connected = true;
          break;
        }
      }
      if (connected) out.edges.emplace_back(o, r);
    }
  }
  return out;
}

double shared_edge_fraction(const ObjectEdges& oo, const CooccurrenceStats& stats, int r1,
                            int r2) {
  if (oo.edges.empty()) return 0.0;
  int shared = 0;
  for (auto [a, b] : oo.edges)
    if (stats.count(a, r1) > 0 && stats.count(b, r1) > 0 && stats.count(a, r2) > 0 &&
        stats.count(b, r2) > 0)
      ++shared;
  return static_cast<double>(shared) / static_cast<double>(oo.edges.size());
}

RegionEdges build_region_region_edges(const ObjectEdges& oo, const CooccurrenceStats& stats,
                                      const RegionPairWeight& weight) {
  RegionEdges out;
  if (oo.edges.empty()) {
    out.warnings.push_back("no object-object edges; region graph left empty");
    return out;
  }

  std::vector<int> present;
  for (int r = 0; r < kR; ++r)
    if (region_present(stats, r)) present.push_back(r);

  Mat w(kR, kR);
  std::set<double, std::greater<double>> values;
  for (int r1 = 0; r1 < kR; ++r1)
    for (int r2 = r1 + 1; r2 < kR; ++r2) {
      w(r1, r2) = weight(oo, stats, r1, r2);
      if (w(r1, r2) > 0.0) values.insert(w(r1, r2));
    }

  // Pairs with zero weight share no connected objects and never form an edge,
  // so candidate sets are always over positive weights.
  auto candidates = [&](double t) {
    std::vector<std::pair<int, int>> edges;
    for (int r1 = 0; r1 < kR; ++r1)
      for (int r2 = r1 + 1; r2 < kR; ++r2)
        if (w(r1, r2) > 0.0 && w(r1, r2) >= t) edges.emplace_back(r1, r2);
    return edges;
  };
  auto covers_all = [&](const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> degree(kR, 0);
    for (auto [a, b] : edges) {
      ++degree[a];
      ++degree[b];
    }
    for (int r : present)
      if (degree[r] == 0) return false;
    return true;
  };

  std::vector<double> thresholds(values.begin(), values.end());
  for (double t : thresholds) {
    auto edges = candidates(t);
    if (covers_all(edges)) {
      out.edges = std::move(edges);
      out.theta = t;
      return out;
    }
  }

  out.theta = 0.0;
  out.edges = candidates(0.0);
  std::vector<int> degree(kR, 0);
  for (auto [a, b] : out.edges) {
    ++degree[a];
    ++degree[b];
  }
  for (int r : present)
    if (degree[r] == 0)
      out.warnings.push_back("region '" + vocab().regions()[r] +
                             "' cannot be connected at any threshold");
  return out;
}

KnowledgeGraph::KnowledgeGraph() : a_(kV, kV), a_hat_(Mat::identity(kV)) {}

KnowledgeGraph assemble_graph(const ObjectEdges& oo, const ObjectRegionEdges& obj_region,
                              const RegionEdges& rr) {
  KnowledgeGraph kg;
  auto set_edge = [&](int u, int v) {
    require(u >= 0 && u < kV && v >= 0 && v < kV, "knowledge", "edge endpoint out of range");
    if (u == v) return;  // A has zero diagonal
    kg.a_(u, v) = 1.0;
    kg.a_(v, u) = 1.0;
  };
  for (auto [o1, o2] : oo.edges) set_edge(o1, o2);
  for (auto [o, r] : obj_region.edges) set_edge(o, kO + r);
  for (auto [r1, r2] : rr.edges) set_edge(kO + r1, kO + r2);
  kg.a_hat_ = normalize_adjacency(kg.a_);
  kg.theta_oo_ = oo.theta;
  kg.theta_rr_ = rr.theta;
  return kg;
}

Mat normalize_adjacency(const Mat& a) {
  const std::size_t n = a.rows();
  require(a.cols() == n, "knowledge", "adjacency must be square");
  Vec inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 1.0;  // self-loop
    for (std::size_t j = 0; j < n; ++j) deg += a(i, j);
    inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
  }
  Mat out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double aij = (i == j) ? 1.0 : a(i, j);
      if (aij != 0.0) out(i, j) = inv_sqrt_deg[i] * aij * inv_sqrt_deg[j];
    }
  return out;
}

std::vector<std::string> KnowledgeGraph::neighbors(const std::string& name) const {
  const int id = vocab().vertex_id(name);
  std::vector<std::string> out;
  for (int v = 0; v < kV; ++v)
    if (a_(id, v) != 0.0) out.push_back(vocab().vertex_name(v));
  return out;
}

void save_triples(const KnowledgeGraph& kg, const std::string& path) {
  std::ofstream f(path);
  require(f.good(), "io", "cannot open '" + path + "' for writing");
  f << "# object/region knowledge graph triples\n";
  f << "# thetaOO=" << kg.theta_oo() << " thetaRR=" << kg.theta_rr() << "\n";
  const auto& names = vocab();
  for (int o1 = 0; o1 < kO; ++o1)
    for (int o2 = o1 + 1; o2 < kO; ++o2)
      if (kg.has_edge(o1, o2))
        f << "(" << names.objects()[o1] << ", LocatedNear, " << names.objects()[o2] << ")\n";
  for (int o = 0; o < kO; ++o)
    for (int r = 0; r < kR; ++r)
      if (kg.has_edge(o, kO + r))
        f << "(" << names.objects()[o] << ", AtLocation, " << names.regions()[r] << ")\n";
  for (int r1 = 0; r1 < kR; ++r1)
    for (int r2 = r1 + 1; r2 < kR; ++r2)
      if (kg.has_edge(kO + r1, kO + r2))
        f << "(" << names.regions()[r1] << ", LocatedNear, " << names.regions()[r2] << ")\n";
  require(f.good(), "io", "write failure on '" + path + "'");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

KnowledgeGraph load_triples(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "io", "cannot open '" + path + "'");
  KnowledgeGraph kg;
  const auto& names = vocab();
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      // Threshold metadata rides along in comments; absent is fine.
      std::size_t p = t.find("thetaOO=");
      if (p != std::string::npos) kg.theta_oo_ = std::strtod(t.c_str() + p + 8, nullptr);
      p = t.find("thetaRR=");
      if (p != std::string::npos) kg.theta_rr_ = std::strtod(t.c_str() + p + 8, nullptr);
      continue;
    }
    auto reject = [&](const std::string& why) {
      fail("triples", "line " + std::to_string(line_no) + ": " + why);
    };
    if (t.front() != '(' || t.back() != ')') reject("expected '(head, relation, tail)'");
    const std::string body = t.substr(1, t.size() - 2);
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = body.find(',', start);
      if (comma == std::string::npos) {
        parts.push_back(trim(body.substr(start)));
        break;
      }
      parts.push_back(trim(body.substr(start, comma - start)));
      start = comma + 1;
    }
    if (parts.size() != 3) reject("expected exactly three comma-separated fields");
    const std::string& head = parts[0];
    const std::string& rel = parts[1];
    const std::string& tail = parts[2];

    int u = -1, v = -1;
    if (rel == "AtLocation") {
      auto o = names.object_index(head);
      auto r = names.region_index(tail);
      if (!o) reject("AtLocation head '" + head + "' is not an object");
      if (!r) reject("AtLocation tail '" + tail + "' is not a region");
      u = *o;
      v = kO + *r;
    } else if (rel == "LocatedNear") {
      auto ho = names.object_index(head);
      auto hr = names.region_index(head);
      auto to = names.object_index(tail);
      auto tr = names.region_index(tail);
      if (!ho && !hr) reject("unknown name '" + head + "'");
      if (!to && !tr) reject("unknown name '" + tail + "'");
      const bool can_oo = ho && to;
      const bool can_rr = hr && tr;
      if (can_oo && can_rr)
        reject("ambiguous LocatedNear between '" + head + "' and '" + tail +
               "' (both object and region readings)");
      if (can_oo) {
        u = *ho;
        v = *to;
      } else if (can_rr) {
        u = kO + *hr;
        v = kO + *tr;
      } else {
        reject("LocatedNear must connect object-object or region-region");
      }
    } else {
      reject("unknown relation '" + rel + "'");
    }
    if (u != v) {
      kg.a_(u, v) = 1.0;
      kg.a_(v, u) = 1.0;
    }
  }
  kg.a_hat_ = normalize_adjacency(kg.a_);
  return kg;
}

std::string graph_to_json(const KnowledgeGraph& kg) {
  nlohmann::json j;
  j["objects"] = vocab().objects();
  j["regions"] = vocab().regions();
  j["theta_oo"] = kg.theta_oo();
  j["theta_rr"] = kg.theta_rr();
  auto mat_rows = [](const Mat& m) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < m.rows(); ++i)
      rows.emplace_back(m.row(i), m.row(i) + m.cols());
    return rows;
  };
  j["a"] = mat_rows(kg.a());
  j["a_hat"] = mat_rows(kg.a_hat());
  return j.dump(2);
}

KnowledgeGraph build_knowledge_graph(const std::vector<HouseMap>& corpus) {
  const CooccurrenceStats stats = count_cooccurrence(corpus);
  const ObjectEdges oo = build_object_object_edges(stats);
  const ObjectRegionEdges obj_region = build_object_region_edges(oo, stats);
  const RegionEdges rr = build_region_region_edges(oo, stats);
  return assemble_graph(oo, obj_region, rr);
}

}  // namespace savnav
