#include "savnav/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "savnav/error.hpp"

namespace savnav {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      fail("config", "unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("config", std::string("invalid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  check_keys(j, "config root",
             {"master_seed", "out_dir", "kg_triples", "corpus", "oracles", "acoustics", "gen",
              "memory", "rewards", "policy", "eval"});
  read(j, "master_seed", cfg.master_seed);
  read(j, "out_dir", cfg.out_dir);
  read(j, "kg_triples", cfg.kg_triples);

  if (j.contains("corpus")) {
    const json& c = j.at("corpus");
    check_keys(c, "corpus",
               {"houses", "grid_min", "grid_max", "regions_min", "regions_max",
                "objects_per_region_min", "objects_per_region_max"});
    read(c, "houses", cfg.corpus_houses);
    read(c, "grid_min", cfg.gen_params.grid_min);
    read(c, "grid_max", cfg.gen_params.grid_max);
    read(c, "regions_min", cfg.gen_params.regions_min);
    read(c, "regions_max", cfg.gen_params.regions_max);
    read(c, "objects_per_region_min", cfg.gen_params.objects_per_region_min);
    read(c, "objects_per_region_max", cfg.gen_params.objects_per_region_max);
    require(cfg.corpus_houses >= 5, "config", "corpus.houses must be >= 5");
  }

  if (j.contains("oracles")) {
    const json& o = j.at("oracles");
    check_keys(o, "oracles",
               {"audio_accuracy", "vision_object_emr", "vision_region_emr", "loc_noise_base_m",
                "drr_noise"});
    read(o, "audio_accuracy", cfg.oracles.audio_accuracy);
    read(o, "vision_object_emr", cfg.oracles.vision_object_emr);
    read(o, "vision_region_emr", cfg.oracles.vision_region_emr);
    read(o, "loc_noise_base_m", cfg.oracles.loc_noise_base_m);
    read(o, "drr_noise", cfg.oracles.drr_noise);
    for (double p : {cfg.oracles.audio_accuracy, cfg.oracles.vision_object_emr,
                     cfg.oracles.vision_region_emr})
      require(p >= 0.0 && p <= 1.0, "config", "oracle probabilities must lie in [0,1]");
  }

  if (j.contains("acoustics")) {
    const json& a = j.at("acoustics");
    check_keys(a, "acoustics",
               {"sound_speed", "sample_rate", "tail_decay_s", "tail_energy_coeff", "noise_floor"});
    read(a, "sound_speed", cfg.acoustics.sound_speed);
    read(a, "sample_rate", cfg.acoustics.sample_rate);
    read(a, "tail_decay_s", cfg.acoustics.tail_decay_s);
    read(a, "tail_energy_coeff", cfg.acoustics.tail_energy_coeff);
    read(a, "noise_floor", cfg.acoustics.noise_floor);
    require(cfg.acoustics.sound_speed > 0 && cfg.acoustics.sample_rate > 0 &&
                cfg.acoustics.tail_decay_s > 0 && cfg.acoustics.tail_energy_coeff >= 0 &&
                cfg.acoustics.noise_floor > 0,
            "config", "acoustic parameters must be positive");
  }

  if (j.contains("gen")) {
    const json& g = j.at("gen");
    check_keys(g, "gen", {"embedding_dim", "hidden_dim", "output_dim", "layers"});
    read(g, "embedding_dim", cfg.gen_dims.embedding);
    read(g, "hidden_dim", cfg.gen_dims.hidden);
    read(g, "output_dim", cfg.gen_dims.output);
    read(g, "layers", cfg.gen_dims.layers);
  }

  if (j.contains("memory")) {
    const json& m = j.at("memory");
    check_keys(m, "memory", {"capacity", "entry_width", "model_dim"});
    read(m, "capacity", cfg.memory.capacity);
    read(m, "entry_width", cfg.memory.entry_width);
    read(m, "model_dim", cfg.memory.model_dim);
    require(cfg.memory.capacity >= 1, "config", "memory.capacity must be >= 1");
  }

  if (j.contains("rewards")) {
    const json& r = j.at("rewards");
    check_keys(r, "rewards", {"success", "geo_delta_scale", "step_penalty", "max_steps"});
    read(r, "success", cfg.rewards.success_reward);
    read(r, "geo_delta_scale", cfg.rewards.geo_delta_scale);
    read(r, "step_penalty", cfg.rewards.step_penalty);
    read(r, "max_steps", cfg.rewards.max_steps);
    require(cfg.rewards.max_steps >= 1, "config", "rewards.max_steps must be >= 1");
  }

  if (j.contains("policy")) {
    const json& p = j.at("policy");
    check_keys(p, "policy", {"name", "lr", "batch_size", "train_episodes", "weights_path"});
    read(p, "name", cfg.policy.name);
    read(p, "lr", cfg.policy.lr);
    read(p, "batch_size", cfg.policy.batch_size);
    read(p, "train_episodes", cfg.policy.train_episodes);
    read(p, "weights_path", cfg.policy.weights_path);
    require(cfg.policy.batch_size >= 1 && cfg.policy.train_episodes >= 1, "config",
            "policy.batch_size and policy.train_episodes must be >= 1");
  }

  if (j.contains("eval")) {
    const json& e = j.at("eval");
    check_keys(e, "eval", {"episodes_per_split", "location_mode"});
    read(e, "episodes_per_split", cfg.eval.episodes_per_split);
    if (e.contains("location_mode")) {
      const std::string mode = e.at("location_mode").get<std::string>();
      if (mode == "exponential")
        cfg.eval.location_mode = LocationMode::kExponential;
      else if (mode == "dynamic")
        cfg.eval.location_mode = LocationMode::kDynamic;
      else
        fail("config", "eval.location_mode must be 'exponential' or 'dynamic'");
    }
    require(cfg.eval.episodes_per_split >= 1, "config", "eval.episodes_per_split must be >= 1");
  }

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "io", "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return config_from_json_text(ss.str());
}

}  // namespace savnav
