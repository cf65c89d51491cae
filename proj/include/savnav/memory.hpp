#pragma once
// Scene memory: a bounded buffer of observation embeddings with single-head
// scaled-dot-product attention. encode() self-attends over the buffer;
// decode() cross-attends with the audio-derived belief query to produce the
// state vector.

#include <cstdint>
#include <deque>

#include "savnav/matrix.hpp"
#include "savnav/worldgen.hpp"

namespace savnav {

struct MemoryConfig {
  int capacity = 150;       // S_M
  int entry_width = 274;    // [vision 128 | gen 64 | pose 2 | heading 2 | action 16 | pad]
  int vision_width = 128;
  int gen_width = 64;
  int action_width = 16;
  int model_dim = 64;       // attention dimension
};

class SceneMemory {
 public:
  explicit SceneMemory(const MemoryConfig& cfg) : cfg_(cfg) {}

  /// Appends an entry, evicting the oldest once capacity is reached.
  void push(const Vec& entry);
  std::size_t size() const { return entries_.size(); }
  const std::deque<Vec>& entries() const { return entries_; }
  const MemoryConfig& config() const { return cfg_; }

 private:
  MemoryConfig cfg_;
  std::deque<Vec> entries_;
};

struct AttentionParams {
  Mat wq, wk, wv;  // query/key/value projections
};

/// Seeded projections mapping query_dim/key_dim inputs to model_dim.
AttentionParams make_attention_params(std::uint64_t seed, int query_dim, int key_dim,
                                      int model_dim);

/// Self-attention over the buffer: rows of softmax(QK^T/sqrt(d)) V.
Mat encode(const SceneMemory& mem, const AttentionParams& params);

/// Cross-attention of a single projected query over the rows of Me.
Vec decode(const Mat& me, const Vec& query, const AttentionParams& params);

/// Fixed seeded projections that stand in for the vision/action encoders.
struct ObservationEncoders {
  Mat vision_projection;  // (24 + 21 + 3) -> vision_width
  Mat action_projection;  // 4 -> action_width
};

ObservationEncoders make_observation_encoders(std::uint64_t seed, const MemoryConfig& cfg);

/// Raw visual features at a pose: region one-hot, visible-object multi-hot,
/// and three forward wall-distance rays (normalized).
Vec vision_stub_features(const HouseMap& map, const Pose& pose);

/// Packs [vision stub | GEN^v embedding | pose x,y | heading sin,cos | action
/// embedding | zero padding] to the configured entry width. Pose is relative
/// to the episode start; prev_action < 0 means "none" (zero embedding).
Vec build_entry(const Vec& vision_stub, const Vec& gen_embedding, const Pose& relative_pose,
                int prev_action, const ObservationEncoders& enc, const MemoryConfig& cfg);

}  // namespace savnav
