#pragma once
// Experiment configuration: one JSON file drives corpus generation, oracles,
// model dimensions, policy selection, and evaluation sizes. Unknown keys are
// rejected so typos cannot silently fall back to defaults.

#include <cstdint>
#include <string>

#include "savnav/acoustics.hpp"
#include "savnav/episodes.hpp"
#include "savnav/gen.hpp"
#include "savnav/memory.hpp"
#include "savnav/worldgen.hpp"

namespace savnav {

struct PolicyConfig {
  std::string name = "knowledge";  // random | greedy | knowledge | knowledge-trained
  double lr = 0.5;
  int batch_size = 10;
  int train_episodes = 5000;
  std::string weights_path;  // required by knowledge-trained
};

struct EvalConfig {
  int episodes_per_split = 1000;
  LocationMode location_mode = LocationMode::kExponential;
  bool record_beliefs = false;  // set by the CLI --debug flag, not the file
};

struct ExperimentConfig {
  std::uint64_t master_seed = 1;
  std::string out_dir = "out";
  std::string kg_triples = "data/kg_mp3d.triples";
  int corpus_houses = 85;
  GenParams gen_params;       // prior matrices filled from the KG at load time
  bool gen_params_from_kg = true;
  OracleConfig oracles;
  AcousticParams acoustics;
  GenDims gen_dims;
  MemoryConfig memory;
  RewardConfig rewards;
  PolicyConfig policy;
  EvalConfig eval;
};

/// Parses and validates; rejects unknown keys at every level.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

}  // namespace savnav
