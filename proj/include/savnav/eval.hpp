#pragma once
// Evaluation harness (parallel deterministic rollouts, per-split reports),
// the observation->GEN->memory pipeline bundle, and the REINFORCE trainer
// for the region-selection head.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "savnav/agents.hpp"
#include "savnav/config.hpp"
#include "savnav/episodes.hpp"
#include "savnav/gen.hpp"
#include "savnav/knowledge.hpp"
#include "savnav/memory.hpp"
#include "savnav/metrics.hpp"

namespace savnav {

/// Everything needed to turn observations into the state vector s_t:
/// embeddings, the two GENs, attention projections, and the fixed encoders.
struct Pipeline {
  GenDims dims;
  MemoryConfig memory;
  EmbeddingTable table;
  GenWeights gen_vision;
  GenWeights gen_audio;
  AttentionParams encoder;  // entry_width -> model_dim self-attention
  AttentionParams decoder;  // belief query -> model_dim cross-attention
  ObservationEncoders encoders;

  int query_width() const { return dims.output + Vocabulary::kObjects + 2; }
};

Pipeline build_pipeline(std::uint64_t seed, const GenDims& dims, const MemoryConfig& memory);

/// Pooled GEN embedding for a 45-wide score vector (audio callers zero-fill
/// the region slots).
Vec gen_embedding(const Pipeline& pipeline, const GenWeights& weights, const Vec& scores45,
                  const KnowledgeGraph& kg);

/// s_t = Decoder(Encoder(M), [GEN^b(belief) ; class belief ; location]).
Vec compute_state(const Pipeline& pipeline, const SceneMemory& memory,
                  const ClassBelief& class_belief, const LocationBelief& location_belief,
                  const KnowledgeGraph& kg);

/// Pose relative to the episode start (start maps to the origin with
/// heading 0); exact for cardinal headings.
Pose relative_pose(const Pose& origin, const Pose& pose);

/// Knowledge-prior agent whose room choice comes from a trained region head;
/// maintains its own scene memory from the per-step observations.
class TrainedKnowledgePolicy : public Policy {
 public:
  TrainedKnowledgePolicy(const Pipeline& pipeline, RegionPolicy head);
  void reset(std::uint64_t episode_seed) override;
  Action step(const StepContext& ctx) override;

 private:
  const Pipeline& pipeline_;
  RegionPolicy head_;
  KnowledgePriorPolicy inner_;
  SceneMemory memory_;
  bool have_origin_ = false;
  Pose origin_;
  int last_action_ = -1;
};

/// Episodes for the four split settings, per_split each, deterministic.
std::vector<Episode> sample_eval_episodes(const Corpus& corpus, const ObjectSplits& splits,
                                          int per_split, std::uint64_t seed);

struct EvalOutput {
  MetricReport report;
  std::vector<EvaluatedEpisode> evaluated;
};

/// Rolls every episode under the configured policy. Workers only change the
/// schedule; results are reduced in episode order, so the output is identical
/// for any worker count.
EvalOutput evaluate_policy(const ExperimentConfig& cfg, const Corpus& corpus,
                           const KnowledgeGraph& kg, const std::vector<Episode>& episodes,
                           int workers);

// --- trainer -------------------------------------------------------------------

struct TrainStep {
  int episode = 0;
  double mean_return = 0.0;   // over the finished batch
  bool argmax_correct = false;
};

struct TrainOutput {
  RegionPolicy policy;
  std::vector<TrainStep> curve;
  Vec bandit_state;   // the fixed context used by the bandit
  int target_region = 0;
};

/// Fixed 3-room bandit: the context s_t comes from the real pipeline run on a
/// scripted prefix in a fixed house; reward 1 for picking the goal's region
/// class. Resuming from (policy, start_episode) replays the same stream.
TrainOutput train_region_policy(const ExperimentConfig& cfg, const KnowledgeGraph& kg,
                                int start_episode = 0, const RegionPolicy* initial = nullptr);

// --- trajectory dumps ------------------------------------------------------------

std::string trajectory_to_json(const HouseMap& map, const Episode& episode,
                               const RolloutResult& result);

}  // namespace savnav
