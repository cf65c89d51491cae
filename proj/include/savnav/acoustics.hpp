#pragma once
// Parametric acoustics: impulse-response synthesis between two cells, the
// direct-to-reverberant ratio, and the seeded noisy oracles standing in for
// the pre-trained audio/vision/location models.

#include <cstdint>
#include <vector>

#include "savnav/matrix.hpp"
#include "savnav/worldgen.hpp"

namespace savnav {

struct Rir {
  int sample_rate = 16000;
  Vec samples;
};

struct AcousticParams {
  double sound_speed = 343.0;      // m/s
  int sample_rate = 16000;         // Hz
  double tail_decay_s = 0.15;      // exponential tail time constant
  double tail_energy_coeff = 0.3;  // tail energy = coeff * d_geo * direct energy
  double noise_floor = 1e-4;       // tail envelope cutoff amplitude

  double direct_gain(double d_geo) const { return 1.0 / (1.0 + d_geo); }
};

struct AudioFeatures {
  double intensity = 0.0;     // (direct gain)^2, 1 at the source
  double bearing = 0.0;       // radians, agent frame (+x ahead, +y left)
  double offset_x = 0.0;      // egocentric metres to the source
  double offset_y = 0.0;
  bool silent = false;
};

struct OracleConfig {
  double audio_accuracy = 0.973;
  double vision_object_emr = 0.48;
  double vision_region_emr = 0.68;
  double loc_noise_base_m = 0.1;   // sigma0
  double drr_noise = 0.05;         // sigma for the DRR estimate
};

/// Direct impulse at delay d/c with amplitude 1/(1+d), plus a seeded
/// exponentially decaying tail whose total energy is coeff*d*directEnergy.
Rir synthesize_rir(const HouseMap& map, Vec2i src, Vec2i rcv, const AcousticParams& params,
                   std::uint64_t seed);

/// Energy in the 10 ms window from the peak over total energy; 0 for silence.
double true_drr(const Rir& rir);

/// Raw little-endian float64 samples with a one-line JSON header (debugging).
void save_rir_raw(const Rir& rir, const std::string& path);
Rir load_rir_raw(const std::string& path);

struct SoundEvent {
  int object_index = 0;  // index into HouseMap::objects
  double duration_s = 15.0;
};

/// Egocentric audio features at step t; silent once t*stepSeconds passes the
/// event duration (stepSeconds = 1).
AudioFeatures observe_audio(const HouseMap& map, const ObjectInstance& goal, const Pose& agent,
                            int t, const SoundEvent& event, const AcousticParams& params);

/// Scores over the 21 objects; argmax is the goal class with probability
/// cfg.audio_accuracy, otherwise a seeded confusion class. Sums to 1.
Vec audio_class_oracle(const AudioFeatures& features, int goal_class, const OracleConfig& cfg,
                       std::uint64_t seed);

/// Cells visible from a pose: three forward rays (lateral -1/0/+1), depth 3,
/// each ray stopped by the first wall.
std::vector<Vec2i> field_of_view(const HouseMap& map, const Pose& pose, int depth = 3);

/// Multi-hot scores over 45 vertices: objects in the field of view plus the
/// region of the agent's cell, with per-class flips calibrated to the EMR
/// targets. Pass noisy=false for the ground-truth labels.
Vec vision_oracle(const HouseMap& map, const Pose& pose, const OracleConfig& cfg,
                  std::uint64_t seed, bool noisy = true);

struct LocationEstimate {
  double offset_x = 0.0;
  double offset_y = 0.0;
  double drr = 0.0;
};

/// Noisy egocentric goal offset and DRR estimate; noise grows with distance
/// and shrinks with the true DRR.
LocationEstimate location_oracle(const AudioFeatures& features, double drr_true,
                                 const OracleConfig& cfg, std::uint64_t seed);

}  // namespace savnav
