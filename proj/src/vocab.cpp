#include "savnav/vocab.hpp"

#include "savnav/error.hpp"

namespace savnav {

Vocabulary::Vocabulary()
    : objects_{
          "chair",   "table",   "picture",          "cabinet", "cushion",
          "sofa",    "bed",     "chest_of_drawers", "plant",   "sink",
          "toilet",  "stool",   "towel",            "tv_monitor", "shower",
          "bathtub", "counter", "fireplace",        "gym_equipment", "seating",
          "clothes",
      },
      regions_{
          "balcony",
          "bathroom",
          "bedroom",
          "closet",
          "dining room",
          "entryway/foyer/lobby",
          "familyroom/lounge",
          "hallway",
          "junk",
          "kitchen",
          "laundryroom/mudroom",
          "living room",
          "lounge",
          "meetingroom/conferenceroom",
          "office",
          "other room",
          "outdoor",
          "porch/terrace/deck",
          "rec/game",
          "spa/sauna",
          "stairs",
          "toilet",
          "utilityroom/toolroom",
          "workout/gym/exercise",
      } {}

std::optional<int> Vocabulary::object_index(const std::string& name) const {
  for (int i = 0; i < kObjects; ++i)
    if (objects_[i] == name) return i;
  return std::nullopt;
}

std::optional<int> Vocabulary::region_index(const std::string& name) const {
  for (int i = 0; i < kRegions; ++i)
    if (regions_[i] == name) return i;
  return std::nullopt;
}

int Vocabulary::vertex_id(const std::string& name) const {
  if (name.rfind("object:", 0) == 0) {
    auto i = object_index(name.substr(7));
    if (!i) fail("vocab", "unknown object name '" + name.substr(7) + "'");
    return *i;
  }
  if (name.rfind("region:", 0) == 0) {
    auto i = region_index(name.substr(7));
    if (!i) fail("vocab", "unknown region name '" + name.substr(7) + "'");
    return kObjects + *i;
  }
  auto oi = object_index(name);
  auto ri = region_index(name);
  if (oi && ri)
    fail("vocab", "ambiguous name '" + name + "'; use 'object:" + name + "' or 'region:" + name + "'");
  if (oi) return *oi;
  if (ri) return kObjects + *ri;
  fail("vocab", "unknown name '" + name + "'");
}

const std::string& Vocabulary::vertex_name(int id) const {
  require(id >= 0 && id < kVertices, "vocab", "vertex id out of range: " + std::to_string(id));
  return id < kObjects ? objects_[id] : regions_[id - kObjects];
}

const Vocabulary& vocab() {
  static const Vocabulary v;
  return v;
}

}  // namespace savnav
