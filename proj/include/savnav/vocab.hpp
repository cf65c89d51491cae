#pragma once
// Canonical object/region vocabulary of the 45-vertex graph.
// Vertex ids: objects first (0..20), then regions (21..44).
// "toilet" names both an object and a region; lookups that take a bare name
// accept optional "object:" / "region:" qualifiers to disambiguate.

#include <optional>
#include <string>
#include <vector>

namespace savnav {

class Vocabulary {
 public:
  static constexpr int kObjects = 21;
  static constexpr int kRegions = 24;
  static constexpr int kVertices = kObjects + kRegions;

  Vocabulary();

  const std::vector<std::string>& objects() const { return objects_; }
  const std::vector<std::string>& regions() const { return regions_; }

  /// Index into objects() / regions(); nullopt when unknown.
  std::optional<int> object_index(const std::string& name) const;
  std::optional<int> region_index(const std::string& name) const;

  /// Global vertex id (objects 0..20, regions 21..44). Accepts "object:x" /
  /// "region:x" qualifiers; throws on unknown or ambiguous bare names.
  int vertex_id(const std::string& name) const;

  const std::string& vertex_name(int id) const;
  static bool is_object_vertex(int id) { return id >= 0 && id < kObjects; }
  static bool is_region_vertex(int id) { return id >= kObjects && id < kVertices; }

 private:
  std::vector<std::string> objects_;
  std::vector<std::string> regions_;
};

/// The process-wide vocabulary (fixed canonical ordering).
const Vocabulary& vocab();

}  // namespace savnav
