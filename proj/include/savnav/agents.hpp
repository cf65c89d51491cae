#pragma once
// Navigation policies over the 4-action space, the sound->object->region
// scoring used by the knowledge-prior agent, and the REINFORCE trainer for
// the region-selection head.

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <set>
#include <vector>

#include "savnav/beliefs.hpp"
#include "savnav/knowledge.hpp"
#include "savnav/matrix.hpp"
#include "savnav/rng.hpp"
#include "savnav/worldgen.hpp"

namespace savnav {

enum class Action { kMoveForward = 0, kTurnLeft = 1, kTurnRight = 2, kStop = 3 };

/// What a policy sees each step. Vision scores are the 45-wide oracle output
/// for the current pose; beliefs are already updated for this step.
struct StepContext {
  const HouseMap* map = nullptr;
  const KnowledgeGraph* kg = nullptr;
  Pose pose;
  const ClassBelief* class_belief = nullptr;
  const LocationBelief* location_belief = nullptr;
  const Vec* vision_scores = nullptr;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual void reset(std::uint64_t episode_seed) = 0;
  virtual Action step(const StepContext& ctx) = 0;
  /// Random baseline only: the simulator auto-stops within 1 m of the goal.
  virtual bool auto_stop() const { return false; }
};

/// MoveForward/TurnLeft/TurnRight with probability 0.33 each, Stop with 0.01.
class RandomPolicy : public Policy {
 public:
  void reset(std::uint64_t episode_seed) override;
  Action step(const StepContext& ctx) override;
  bool auto_stop() const override { return true; }

 private:
  Rng rng_{0};
};

Action random_policy_step(Rng& rng);

/// Follows the location belief: rotate when misaligned by more than 45
/// degrees, else move forward; stops on a viewpoint of an argmax-class
/// instance once the believed offset is within 1 m.
class GreedyAudioPolicy : public Policy {
 public:
  void reset(std::uint64_t episode_seed) override;
  Action step(const StepContext& ctx) override;
};

/// Renormalized scores over the 24 regions: score(r) = sum_o belief[o] *
/// Ahat[o][r]; uniform when everything is zero.
Vec region_score(const Vec& class_belief, const KnowledgeGraph& kg);

/// Region-by-region search guided by the knowledge graph: walk to the best
/// unvisited room, tour viewpoints of the top-3 believed classes there, stop
/// on a vision-confirmed goal viewpoint. Falls back to greedy behaviour once
/// every room has been visited.
class KnowledgePriorPolicy : public Policy {
 public:
  /// Optional room selector (e.g. a trained head); input is the candidate
  /// room indices, output the chosen one. Default: argmax region_score with
  /// nearest-centroid tie-break.
  using RoomSelector = std::function<int(const StepContext&, const std::vector<int>&)>;

  KnowledgePriorPolicy() = default;
  explicit KnowledgePriorPolicy(RoomSelector selector) : selector_(std::move(selector)) {}

  void reset(std::uint64_t episode_seed) override;
  Action step(const StepContext& ctx) override;

  const std::set<int>& visited_rooms() const { return visited_; }

 private:
  int pick_room(const StepContext& ctx, const std::vector<int>& candidates) const;
  void plan_to(const StepContext& ctx, Vec2i target);
  Action follow_plan(const StepContext& ctx);
  void begin_tour(const StepContext& ctx);

  struct TourStop {
    Vec2i viewpoint;
    Vec2i object_cell;
  };

  RoomSelector selector_;
  std::set<int> visited_;
  std::deque<Vec2i> plan_;
  std::deque<TourStop> tour_;  // remaining viewpoint targets in the target room
  int target_room_ = -1;
  bool touring_ = false;
  GreedyAudioPolicy fallback_;
};

std::unique_ptr<Policy> make_policy(const std::string& name);

// --- region-selection head ----------------------------------------------------

struct RegionPolicy {
  Mat w;  // 24 x state_dim
};

RegionPolicy init_region_policy(std::uint64_t seed, int state_dim);

Vec region_policy_probs(const RegionPolicy& policy, const Vec& state);

struct TrainEpisode {
  Vec state;          // decision state s_t
  int chosen_region;  // 0..23
  double ret;         // episode return G
};

/// One REINFORCE step with the batch-mean baseline:
/// W += lr * sum (G - baseline) * d log softmax(W s)[chosen] / dW.
RegionPolicy reinforce_update(const RegionPolicy& policy, const std::vector<TrainEpisode>& batch,
                              double lr);

}  // namespace savnav
