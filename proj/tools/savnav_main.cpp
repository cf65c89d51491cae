// savnav: corpus/knowledge-graph generation, episode sampling, evaluation,
// training, and trajectory rendering, driven by a JSON experiment config.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "savnav/config.hpp"
#include "savnav/error.hpp"
#include "savnav/eval.hpp"
#include "savnav/knowledge.hpp"
#include "savnav/metrics.hpp"
#include "savnav/rng.hpp"
#include "savnav/svg.hpp"

namespace fs = std::filesystem;
using namespace savnav;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "io", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  require(f.good(), "io", "cannot open '" + path + "' for writing");
  f << content;
  require(f.good(), "io", "write failure on '" + path + "'");
}

std::string out_dir_for(const ExperimentConfig& cfg, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (const char* env = std::getenv("SAVNAV_OUT"); env && *env) return env;
  return cfg.out_dir;
}

ExperimentConfig load_cfg(const std::string& config_path, std::uint64_t seed_override) {
  ExperimentConfig cfg = load_config(config_path);
  if (seed_override != 0) cfg.master_seed = seed_override;
  return cfg;
}

GenParams gen_params_for(const ExperimentConfig& cfg, const KnowledgeGraph& kg) {
  GenParams params = default_gen_params(kg);
  params.grid_min = cfg.gen_params.grid_min;
  params.grid_max = cfg.gen_params.grid_max;
  params.regions_min = cfg.gen_params.regions_min;
  params.regions_max = cfg.gen_params.regions_max;
  params.objects_per_region_min = cfg.gen_params.objects_per_region_min;
  params.objects_per_region_max = cfg.gen_params.objects_per_region_max;
  return params;
}

int cmd_gen_corpus(const std::string& config_path, std::uint64_t seed, const std::string& out) {
  const ExperimentConfig cfg = load_cfg(config_path, seed);
  const KnowledgeGraph kg = load_triples(cfg.kg_triples);
  const std::string dir = out_dir_for(cfg, out);
  fs::create_directories(dir);
  const Corpus corpus = generate_corpus(cfg.master_seed, cfg.corpus_houses, gen_params_for(cfg, kg));
  write_file(dir + "/corpus.json", corpus_to_json(corpus));
  std::cout << "wrote " << dir << "/corpus.json (" << corpus.houses.size() << " houses, "
            << corpus.seen.size() << " seen / " << corpus.unseen.size() << " unseen)\n";
  return 0;
}

int cmd_build_kg(const std::string& corpus_path, const std::string& out,
                 const std::string& json_out) {
  const Corpus corpus = corpus_from_json(read_file(corpus_path));
  require(!corpus.houses.empty(), "cli", "corpus is empty");
  const KnowledgeGraph kg = build_knowledge_graph(corpus.houses);
  save_triples(kg, out);
  if (!json_out.empty()) write_file(json_out, graph_to_json(kg));
  std::cout << "wrote " << out << " (thetaOO=" << kg.theta_oo() << ", thetaRR=" << kg.theta_rr()
            << ")\n";
  return 0;
}

int cmd_sample_episodes(const std::string& config_path, std::uint64_t seed,
                        const std::string& corpus_path, const std::string& out) {
  const ExperimentConfig cfg = load_cfg(config_path, seed);
  const Corpus corpus = corpus_from_json(read_file(corpus_path));
  const std::string dir = out_dir_for(cfg, out);
  fs::create_directories(dir);
  const ObjectSplits splits = make_object_splits(cfg.master_seed);
  const auto episodes =
      sample_eval_episodes(corpus, splits, cfg.eval.episodes_per_split, cfg.master_seed);
  write_file(dir + "/episodes.json", episodes_to_json(episodes));
  std::cout << "wrote " << dir << "/episodes.json (" << episodes.size() << " episodes)\n";
  return 0;
}

int cmd_eval(const std::string& config_path, std::uint64_t seed, const std::string& corpus_path,
             const std::string& episodes_path, int workers, int svg_count, bool debug,
             const std::string& dump_rir, const std::string& out) {
  ExperimentConfig cfg = load_cfg(config_path, seed);
  cfg.eval.record_beliefs = debug;
  const Corpus corpus = corpus_from_json(read_file(corpus_path));
  const KnowledgeGraph kg = load_triples(cfg.kg_triples);
  std::vector<Episode> episodes;
  if (!episodes_path.empty()) {
    episodes = episodes_from_json(read_file(episodes_path));
  } else {
    const ObjectSplits splits = make_object_splits(cfg.master_seed);
    episodes = sample_eval_episodes(corpus, splits, cfg.eval.episodes_per_split, cfg.master_seed);
  }
  const std::string dir = out_dir_for(cfg, out);
  fs::create_directories(dir);

  const EvalOutput result = evaluate_policy(cfg, corpus, kg, episodes, workers);
  write_report(result.report, dir + "/report.csv", "csv");
  write_report(result.report, dir + "/report.json", "json");
  // One report per split, matching the four evaluation settings.
  for (const auto& [key, values] : result.report.per_split) {
    MetricReport single;
    single.overall = values;
    single.per_split[key] = values;
    std::string name = key;
    for (char& c : name)
      if (c == '/') c = '_';
    write_report(single, dir + "/report_" + name + ".csv", "csv");
  }
  for (int i = 0; i < svg_count && i < static_cast<int>(result.evaluated.size()); ++i) {
    const EvaluatedEpisode& ev = result.evaluated[i];
    const std::string traj = trajectory_to_json(*ev.map, ev.episode, ev.result);
    write_file(dir + "/traj_" + std::to_string(i) + ".json", traj);
    write_file(dir + "/traj_" + std::to_string(i) + ".svg", trajectory_svg_from_json(traj));
  }
  if (!dump_rir.empty() && !episodes.empty()) {
    const Episode& first = episodes.front();
    const HouseMap& map = corpus.houses[first.house_id];
    const Rir rir = synthesize_rir(map, map.objects[first.goal_object_index].cell,
                                   first.start.cell, cfg.acoustics,
                                   seed_mix(first.seed, "rir", 0));
    save_rir_raw(rir, dump_rir);
  }
  std::cout << report_to_csv(result.report);
  return 0;
}

int cmd_train(const std::string& config_path, std::uint64_t seed, const std::string& out) {
  const ExperimentConfig cfg = load_cfg(config_path, seed);
  const KnowledgeGraph kg = load_triples(cfg.kg_triples);
  const std::string dir = out_dir_for(cfg, out);
  fs::create_directories(dir);
  const TrainOutput result = train_region_policy(cfg, kg);
  save_weights({result.policy.w}, dir + "/region_policy.bin");
  std::string csv = "episode,mean_return,argmax_correct\n";
  for (const TrainStep& s : result.curve) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.6f,%d\n", s.episode, s.mean_return,
                  s.argmax_correct ? 1 : 0);
    csv += buf;
  }
  write_file(dir + "/learning_curve.csv", csv);
  int correct = 0, window = 0;
  for (std::size_t i = result.curve.size() >= 50 ? result.curve.size() - 50 : 0;
       i < result.curve.size(); ++i) {
    ++window;
    correct += result.curve[i].argmax_correct ? 1 : 0;
  }
  std::cout << "wrote " << dir << "/region_policy.bin; target region '"
            << vocab().regions()[result.target_region] << "'; argmax correct in "
            << correct << "/" << window << " of the final batches\n";
  return 0;
}

int cmd_plot_traj(const std::string& traj_path, const std::string& out) {
  write_file(out, trajectory_svg_from_json(read_file(traj_path)));
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_report(const std::string& in_path, const std::string& out) {
  const MetricReport report = report_from_json(read_file(in_path));
  if (out.empty()) {
    std::cout << report_to_csv(report);
  } else {
    write_file(out, report_to_csv(report));
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semantic audio-visual navigation toolkit"};
  app.require_subcommand(1);

  std::string config_path = "configs/default.json";
  std::string corpus_path, episodes_path, out, traj_path, in_path, kg_json, dump_rir;
  std::uint64_t seed = 0;
  int workers = 1, svg_count = 0;
  bool debug = false;

  auto* gen = app.add_subcommand("gen-corpus", "generate the house corpus");
  gen->add_option("--config", config_path);
  gen->add_option("--seed", seed);
  gen->add_option("--out", out);

  auto* kg = app.add_subcommand("build-kg", "construct a knowledge graph from a corpus");
  kg->add_option("--corpus", corpus_path)->required();
  kg->add_option("--out", out)->required();
  kg->add_option("--json", kg_json, "also dump adjacency matrices as JSON");

  auto* sample = app.add_subcommand("sample-episodes", "sample the evaluation episode sets");
  sample->add_option("--config", config_path);
  sample->add_option("--seed", seed);
  sample->add_option("--corpus", corpus_path)->required();
  sample->add_option("--out", out);

  auto* eval = app.add_subcommand("eval", "evaluate the configured policy");
  eval->add_option("--config", config_path);
  eval->add_option("--seed", seed);
  eval->add_option("--corpus", corpus_path)->required();
  eval->add_option("--episodes", episodes_path);
  eval->add_option("--workers", workers);
  eval->add_option("--svg", svg_count);
  eval->add_flag("--debug", debug, "record belief traces in trajectory dumps");
  eval->add_option("--dump-rir", dump_rir, "write the first episode's impulse response");
  eval->add_option("--out", out);

  auto* train = app.add_subcommand("train", "train the region-selection head");
  train->add_option("--config", config_path);
  train->add_option("--seed", seed);
  train->add_option("--out", out);

  auto* plot = app.add_subcommand("plot-traj", "render a trajectory JSON as SVG");
  plot->add_option("--traj", traj_path)->required();
  plot->add_option("--out", out)->required();

  auto* report = app.add_subcommand("report", "convert a JSON report to CSV");
  report->add_option("--in", in_path)->required();
  report->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_corpus(config_path, seed, out);
    if (kg->parsed()) return cmd_build_kg(corpus_path, out, kg_json);
    if (sample->parsed()) return cmd_sample_episodes(config_path, seed, corpus_path, out);
    if (eval->parsed())
      return cmd_eval(config_path, seed, corpus_path, episodes_path, workers, svg_count, debug,
                      dump_rir, out);
    if (train->parsed()) return cmd_train(config_path, seed, out);
    if (plot->parsed()) return cmd_plot_traj(traj_path, out);
    if (report->parsed()) return cmd_report(in_path, out);
  } catch (const Error& e) {
    std::cerr << "error:" << e.category() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error:internal: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
