#pragma once
// Episode sampling under the task constraints, the stepping environment with
// its reward terms and termination rules, and the belief-updating rollout.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "savnav/acoustics.hpp"
#include "savnav/agents.hpp"
#include "savnav/beliefs.hpp"
#include "savnav/knowledge.hpp"
#include "savnav/worldgen.hpp"

namespace savnav {

struct Episode {
  int house_id = 0;
  Pose start;
  int goal_object_index = 0;  // index into HouseMap::objects
  double duration_s = 15.0;
  bool unseen_house = false;
  bool unheard_sound = false;
  std::uint64_t seed = 0;
};

struct RewardConfig {
  double success_reward = 10.0;
  double geo_delta_scale = 1.0;  // +1 per metre of geodesic progress
  double step_penalty = -0.01;
  int max_steps = 500;
};

/// Heard/unheard partition of the 21 object classes (16/5), seeded.
struct ObjectSplits {
  std::vector<int> heard;    // 16 class indices
  std::vector<int> unheard;  // 5 class indices
};
ObjectSplits make_object_splits(std::uint64_t seed);

/// Rejection-samples start/goal until geodesic > 4 m and geodesic/euclidean
/// > 1.1; duration ~ clip(N(15, 9), 5, 500). Deterministic per (house, seed).
Episode sample_episode(const HouseMap& house, int house_id, std::uint64_t seed,
                       const std::vector<int>& sound_classes, bool unseen_house,
                       bool unheard_sound);

/// Raw duration draw behind sample_episode (pre-clip value, same stream).
double sample_duration_raw(std::uint64_t episode_seed);

struct Observation {
  Vec vision_scores;  // 45, noisy oracle output at the current pose
  AudioFeatures audio;
  PoseDelta pose_delta;
  int step = 0;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  bool success = false;
  bool auto_stopped = false;
};

/// Stepping environment for one episode. Geodesic rewards are measured to the
/// goal object's cell; success requires Stop on a goal-instance viewpoint.
class Environment {
 public:
  Environment(const HouseMap& map, const Episode& episode, const RewardConfig& rewards,
              const AcousticParams& acoustics, const OracleConfig& oracles,
              bool auto_stop = false);

  Observation reset();
  StepResult step(Action action);

  const Pose& pose() const { return pose_; }
  int step_count() const { return step_count_; }
  bool done() const { return done_; }
  const ObjectInstance& goal() const { return map_.objects[episode_.goal_object_index]; }
  double true_drr_now() const;

 private:
  Observation observe(const PoseDelta& delta);

  const HouseMap& map_;
  Episode episode_;
  RewardConfig rewards_;
  AcousticParams acoustics_;
  OracleConfig oracles_;
  bool auto_stop_;
  SoundEvent event_;
  Pose pose_;
  int step_count_ = 0;
  bool done_ = false;
  double geo_to_goal_ = 0.0;
  mutable std::vector<std::optional<double>> drr_by_distance_;
};

bool check_success(const HouseMap& map, const Episode& episode, const Pose& pose, Action action);

struct RolloutResult {
  std::vector<Action> actions;
  std::vector<Pose> poses;  // length = actions + 1 (includes the start pose)
  std::vector<double> rewards;
  bool success = false;
  double path_length_m = 0.0;
  int action_count = 0;
  double final_geodesic_m = 0.0;  // to the nearest goal viewpoint
  int sound_stopped_step = 0;
  bool stopped_after_silence = false;
  // Filled only when RolloutConfig::record_beliefs is set (debug dumps).
  std::vector<Vec> class_belief_trace;
  std::vector<LocationBelief> location_belief_trace;
};

struct RolloutConfig {
  RewardConfig rewards;
  AcousticParams acoustics;
  OracleConfig oracles;
  LocationMode location_mode = LocationMode::kExponential;
  double class_belief_delta = 0.5;
  bool record_beliefs = false;
};

/// Runs one full episode: oracle observations feed the belief filters each
/// step (silent-source rules included) and the policy chooses actions.
RolloutResult rollout(Policy& policy, const HouseMap& map, const Episode& episode,
                      const KnowledgeGraph& kg, const RolloutConfig& cfg);

std::uint64_t rollout_hash(const RolloutResult& result);

// Episode dataset serialization.
std::string episodes_to_json(const std::vector<Episode>& episodes);
std::vector<Episode> episodes_from_json(const std::string& text);

}  // namespace savnav
