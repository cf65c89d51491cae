#include "savnav/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "savnav/error.hpp"
#include "savnav/rng.hpp"
#include "savnav/vocab.hpp"

namespace savnav {

Rir synthesize_rir(const HouseMap& map, Vec2i src, Vec2i rcv, const AcousticParams& params,
                   std::uint64_t seed) {
  require(map.is_free(src), "acoustics", "RIR source cell is not Free");
  require(map.is_free(rcv), "acoustics", "RIR receiver cell is not Free");
  const double d = geodesic_distance(map, src, rcv);

  const int delay = static_cast<int>(std::llround(d / params.sound_speed * params.sample_rate));
  const double direct_amp = params.direct_gain(d);
  const double direct_energy = direct_amp * direct_amp;

  // Envelope length: where exp(-t/tau) falls below the noise floor.
  const int tail_len = static_cast<int>(
      std::ceil(params.tail_decay_s * std::log(1.0 / params.noise_floor) * params.sample_rate));

  Rir rir;
  rir.sample_rate = params.sample_rate;
  rir.samples.assign(static_cast<std::size_t>(delay) + 1 + tail_len, 0.0);
  rir.samples[delay] = direct_amp;

  const double target_tail_energy = params.tail_energy_coeff * d * direct_energy;
  if (target_tail_energy > 0.0) {
    // Seeded random signs over a deterministic exponential envelope, rescaled
    // so the tail energy hits the target exactly. The energy profile is then
    // a function of distance alone, which keeps DRR(d) strictly monotone.
    Rng rng(seed_mix(seed, "rir-tail",
                     static_cast<std::uint64_t>(map.cell_index(src)) * 1000003u +
                         static_cast<std::uint64_t>(map.cell_index(rcv))));
    double raw_energy = 0.0;
    for (int i = 1; i <= tail_len; ++i) {
      const double env = std::exp(-static_cast<double>(i) /
                                  (params.tail_decay_s * params.sample_rate));
      const double s = rng.bernoulli(0.5) ? env : -env;
      rir.samples[delay + i] = s;
      raw_energy += env * env;
    }
    const double scale = std::sqrt(target_tail_energy / raw_energy);
    for (int i = 1; i <= tail_len; ++i) rir.samples[delay + i] *= scale;
  }
  return rir;
}

double true_drr(const Rir& rir) {
  require(!rir.samples.empty(), "acoustics", "empty RIR");
  std::size_t peak = 0;
  double peak_abs = 0.0, total = 0.0;
  for (std::size_t i = 0; i < rir.samples.size(); ++i) {
    const double a = std::abs(rir.samples[i]);
    total += rir.samples[i] * rir.samples[i];
    if (a > peak_abs) {
      peak_abs = a;
      peak = i;
    }
  }
  if (total == 0.0) return 0.0;  // silent source convention
  const std::size_t window = static_cast<std::size_t>(0.010 * rir.sample_rate);
  double early = 0.0;
  for (std::size_t i = peak; i < std::min(rir.samples.size(), peak + window); ++i)
    early += rir.samples[i] * rir.samples[i];
  return early / total;
}

void save_rir_raw(const Rir& rir, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), "io", "cannot open '" + path + "' for writing");
  f << "{\"sample_rate\": " << rir.sample_rate << ", \"samples\": " << rir.samples.size()
    << "}\n";
  f.write(reinterpret_cast<const char*>(rir.samples.data()),
          static_cast<std::streamsize>(rir.samples.size() * sizeof(double)));
  require(f.good(), "io", "write failure on '" + path + "'");
}

Rir load_rir_raw(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "io", "cannot open '" + path + "'");
  std::string header;
  std::getline(f, header);
  Rir rir;
  const auto rate_at = header.find("\"sample_rate\": ");
  const auto count_at = header.find("\"samples\": ");
  require(rate_at != std::string::npos && count_at != std::string::npos, "io",
          "malformed RIR header in '" + path + "'");
  rir.sample_rate = std::atoi(header.c_str() + rate_at + 15);
  const std::size_t count = std::strtoull(header.c_str() + count_at + 11, nullptr, 10);
  rir.samples.resize(count);
  f.read(reinterpret_cast<char*>(rir.samples.data()),
         static_cast<std::streamsize>(count * sizeof(double)));
  require(f.good(), "io", "truncated RIR file '" + path + "'");
  return rir;
}

AudioFeatures observe_audio(const HouseMap& map, const ObjectInstance& goal, const Pose& agent,
                            int t, const SoundEvent& event, const AcousticParams& params) {
  AudioFeatures f;
  constexpr double kStepSeconds = 1.0;
  if (t * kStepSeconds >= event.duration_s) {
    f.silent = true;
    return f;
  }
  const double d = geodesic_distance(map, agent.cell, goal.cell);
  const double gain = params.direct_gain(d);
  f.intensity = gain * gain;

  const double wx = goal.cell.x - agent.cell.x;
  const double wy = goal.cell.y - agent.cell.y;
  // World -> egocentric: rotate by -heading (exact for cardinal headings).
  const Vec2i dir = heading_dir(agent.heading_deg);
  f.offset_x = wx * dir.x + wy * dir.y;
  f.offset_y = -wx * dir.y + wy * dir.x;
  f.bearing = std::atan2(f.offset_y, f.offset_x);
  return f;
}

Vec audio_class_oracle(const AudioFeatures& features, int goal_class, const OracleConfig& cfg,
                       std::uint64_t seed) {
  require(!features.silent, "acoustics",
          "audio oracle on a silent step; carry the previous belief forward");
  const int n = Vocabulary::kObjects;
  require(goal_class >= 0 && goal_class < n, "acoustics", "goal class out of range");
  Rng rng(seed_mix(seed, "audio-cls"));
  int top = goal_class;
  if (!rng.bernoulli(cfg.audio_accuracy)) {
    top = static_cast<int>(rng.uniform_int(n - 1));
    if (top >= goal_class) ++top;  // a uniformly random wrong class
  }
  Vec scores(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    scores[i] = rng.uniform(0.05, 0.4);
    sum += scores[i];
  }
  const double boost = rng.uniform(0.5, 1.0);
  sum += boost - scores[top];
  scores[top] = boost;
  for (int i = 0; i < n; ++i) scores[i] /= sum;
  return scores;
}

std::vector<Vec2i> field_of_view(const HouseMap& map, const Pose& pose, int depth) {
  std::vector<Vec2i> cells;
  const Vec2i fwd = heading_dir(pose.heading_deg);
  const Vec2i left{-fwd.y, fwd.x};
  for (int lateral = -1; lateral <= 1; ++lateral) {
    for (int step = 1; step <= depth; ++step) {
      const Vec2i c{pose.cell.x + fwd.x * step + left.x * lateral,
                    pose.cell.y + fwd.y * step + left.y * lateral};
      if (!map.is_free(c)) break;  // each ray stops at the first wall
      cells.push_back(c);
    }
  }
  return cells;
}

Vec vision_oracle(const HouseMap& map, const Pose& pose, const OracleConfig& cfg,
                  std::uint64_t seed, bool noisy) {
  require(map.is_free(pose.cell), "acoustics", "vision pose is not on a Free cell");
  Vec scores(Vocabulary::kVertices, 0.0);
  const auto fov = field_of_view(map, pose);
  for (const ObjectInstance& obj : map.objects)
    for (Vec2i c : fov)
      if (obj.cell == c) scores[obj.object_class] = 1.0;
  const std::int16_t region = map.at(pose.cell);
  scores[Vocabulary::kObjects + map.regions[region].region_class] = 1.0;

  if (noisy) {
    // Independent per-class flips with rates chosen so the exact-match ratio
    // lands on the configured targets: (1-f)^k = EMR.
    const double flip_obj = 1.0 - std::pow(cfg.vision_object_emr, 1.0 / Vocabulary::kObjects);
    const double flip_reg = 1.0 - std::pow(cfg.vision_region_emr, 1.0 / Vocabulary::kRegions);
    Rng rng(seed_mix(seed, "vision"));
    for (int i = 0; i < Vocabulary::kVertices; ++i) {
      const double flip = i < Vocabulary::kObjects ? flip_obj : flip_reg;
      if (rng.bernoulli(flip)) scores[i] = 1.0 - scores[i];
    }
  }
  return scores;
}

LocationEstimate location_oracle(const AudioFeatures& features, double drr_true,
                                 const OracleConfig& cfg, std::uint64_t seed) {
  require(!features.silent, "acoustics",
          "location oracle on a silent step; transport the previous belief");
  require(drr_true >= 0.0 && drr_true <= 1.0, "acoustics", "true DRR outside [0,1]");
  // intensity = (1/(1+d))^2 inverts exactly to the geodesic distance.
  const double d_geo = 1.0 / std::sqrt(features.intensity) - 1.0;
  const double sigma = cfg.loc_noise_base_m * (1.0 + d_geo) * (1.0 - drr_true);
  Rng rng(seed_mix(seed, "loc"));
  LocationEstimate est;
  est.offset_x = features.offset_x + rng.normal(0.0, sigma);
  est.offset_y = features.offset_y + rng.normal(0.0, sigma);
  est.drr = std::clamp(drr_true + rng.normal(0.0, cfg.drr_noise), 0.0, 1.0);
  return est;
}

}  // namespace savnav
