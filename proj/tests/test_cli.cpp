#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "savnav/config.hpp"
#include "savnav/eval.hpp"
#include "savnav/gen.hpp"
#include "savnav/knowledge.hpp"
#include "savnav/svg.hpp"
#include "test_util.hpp"

using namespace savnav;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SAVNAV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg = load_config(std::string(SAVNAV_CONFIG_DIR) + "/tiny.json");
  cfg.kg_triples = testutil::data_path("kg_mp3d.triples");
  return cfg;
}

}  // namespace

TEST_CASE("config parsing: defaults, strictness, value checks") {
  const ExperimentConfig cfg = config_from_json_text("{}");
  CHECK(cfg.master_seed == 1);
  CHECK(cfg.gen_dims.embedding == 300);
  CHECK(cfg.gen_dims.output == 64);
  CHECK(cfg.gen_dims.layers == 3);
  CHECK(cfg.memory.capacity == 150);
  CHECK(cfg.memory.entry_width == 274);
  CHECK(cfg.eval.episodes_per_split == 1000);
  CHECK(cfg.rewards.success_reward == 10.0);
  CHECK(cfg.rewards.step_penalty == -0.01);
  CHECK(cfg.corpus_houses == 85);

  CHECK_THROWS_WITH_AS(config_from_json_text(R"({"master_sead": 3})"),
                       doctest::Contains("unknown key"), Error);
  CHECK_THROWS_WITH_AS(config_from_json_text(R"({"oracles": {"accuracy": 1}})"),
                       doctest::Contains("unknown key"), Error);
  CHECK_THROWS_AS(config_from_json_text(R"({"oracles": {"audio_accuracy": 1.5}})"), Error);
  CHECK_THROWS_AS(config_from_json_text("not json"), Error);

  // the shipped configs parse
  CHECK_NOTHROW(load_config(std::string(SAVNAV_CONFIG_DIR) + "/default.json"));
  CHECK_NOTHROW(load_config(std::string(SAVNAV_CONFIG_DIR) + "/tiny.json"));
}

TEST_CASE("evaluation harness is worker-count invariant") {
  ExperimentConfig cfg = tiny_config();
  cfg.eval.episodes_per_split = 4;
  const KnowledgeGraph kg = load_triples(cfg.kg_triples);
  GenParams params = default_gen_params(kg);
  params.grid_min = cfg.gen_params.grid_min;
  params.grid_max = cfg.gen_params.grid_max;
  params.regions_min = cfg.gen_params.regions_min;
  params.regions_max = cfg.gen_params.regions_max;
  const Corpus corpus = generate_corpus(cfg.master_seed, 6, params);
  const ObjectSplits splits = make_object_splits(cfg.master_seed);
  const auto episodes =
      sample_eval_episodes(corpus, splits, cfg.eval.episodes_per_split, cfg.master_seed);
  CHECK(episodes.size() == 16);

  const EvalOutput one = evaluate_policy(cfg, corpus, kg, episodes, 1);
  const EvalOutput four = evaluate_policy(cfg, corpus, kg, episodes, 4);
  CHECK(report_to_csv(one.report) == report_to_csv(four.report));
  CHECK(report_to_json(one.report) == report_to_json(four.report));
  for (std::size_t i = 0; i < one.evaluated.size(); ++i)
    CHECK(rollout_hash(one.evaluated[i].result) == rollout_hash(four.evaluated[i].result));
}

TEST_CASE("trainer: determinism and checkpoint equivalence") {
  ExperimentConfig cfg = tiny_config();
  cfg.policy.train_episodes = 300;
  cfg.policy.batch_size = 10;
  cfg.policy.lr = 1.0;
  const KnowledgeGraph kg = load_triples(cfg.kg_triples);

  const TrainOutput a = train_region_policy(cfg, kg);
  const TrainOutput b = train_region_policy(cfg, kg);
  CHECK(a.policy.w == b.policy.w);
  CHECK(a.target_region == b.target_region);

  // resume from the halfway checkpoint equals the uninterrupted run
  ExperimentConfig half = cfg;
  half.policy.train_episodes = 150;
  const TrainOutput first_half = train_region_policy(half, kg);
  const TrainOutput resumed = train_region_policy(cfg, kg, 150, &first_half.policy);
  CHECK(resumed.policy.w == a.policy.w);
}

TEST_CASE("trajectory SVG: markers, polyline closure, golden bytes") {
  const auto map = testutil::make_strip_house({{"kitchen", {"chair"}}});
  Episode ep;
  ep.goal_object_index = 0;

  // empty trajectory: start marker only, no polyline
  RolloutResult none;
  none.poses = {Pose{{2, 2}, 0}};
  const std::string single = trajectory_svg_from_json(trajectory_to_json(map, ep, none));
  CHECK(single.find("polyline") == std::string::npos);
  CHECK(single.find("circle") != std::string::npos);

  // scripted square loop: closed polyline (first point == last point)
  RolloutResult loop;
  loop.poses = {Pose{{1, 1}, 0}, Pose{{2, 1}, 0}, Pose{{2, 2}, 0}, Pose{{1, 2}, 0},
                Pose{{1, 1}, 0}};
  const std::string square = trajectory_svg_from_json(trajectory_to_json(map, ep, loop));
  const auto at = square.find("points=\"");
  REQUIRE(at != std::string::npos);
  const std::string points = square.substr(at + 8, square.find('"', at + 8) - at - 8);
  const std::string first = points.substr(0, points.find(' '));
  const std::string last = points.substr(points.rfind(' ') + 1);
  CHECK(first == last);

  // golden byte comparison on a fixed input
  const std::string golden_file = testutil::golden_path("traj_golden.svg");
  std::ifstream golden(golden_file);
  if (golden.good()) {
    std::string expect((std::istreambuf_iterator<char>(golden)),
                       std::istreambuf_iterator<char>());
    CHECK(square == expect);
  } else {
    std::ofstream out(golden_file);
    out << square;
    MESSAGE("golden SVG created; rerun to compare");
  }
}

TEST_CASE("CLI end-to-end: gen-corpus, build-kg, eval, train, plot, report") {
  const std::string dir = "/tmp/savnav_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // write a self-contained config pointing at the shipped data
  ExperimentConfig base = tiny_config();
  const std::string config_path = dir + "/config.json";
  {
    std::ofstream f(config_path);
    f << R"({
  "master_seed": 5,
  "out_dir": ")" << dir
      << R"(",
  "kg_triples": ")" << testutil::data_path("kg_mp3d.triples") << R"(",
  "corpus": {"houses": 6, "grid_min": 18, "grid_max": 22, "regions_min": 3, "regions_max": 5},
  "policy": {"name": "random", "train_episodes": 200, "lr": 1.0},
  "eval": {"episodes_per_split": 2}
})";
  }

  REQUIRE(run_cli("gen-corpus --config " + config_path) == 0);
  CHECK(fs::exists(dir + "/corpus.json"));

  // idempotent: identical bytes on rerun
  const std::string corpus_bytes = slurp(dir + "/corpus.json");
  REQUIRE(run_cli("gen-corpus --config " + config_path) == 0);
  CHECK(slurp(dir + "/corpus.json") == corpus_bytes);

  REQUIRE(run_cli("build-kg --corpus " + dir + "/corpus.json --out " + dir + "/kg.triples") == 0);
  CHECK(fs::exists(dir + "/kg.triples"));
  CHECK_NOTHROW(load_triples(dir + "/kg.triples"));

  REQUIRE(run_cli("sample-episodes --config " + config_path + " --corpus " + dir +
                  "/corpus.json") == 0);
  CHECK(fs::exists(dir + "/episodes.json"));

  REQUIRE(run_cli("eval --config " + config_path + " --corpus " + dir + "/corpus.json" +
                  " --episodes " + dir + "/episodes.json --workers 2 --svg 1") == 0);
  CHECK(fs::exists(dir + "/report.csv"));
  CHECK(fs::exists(dir + "/report.json"));
  CHECK(fs::exists(dir + "/report_UH_US.csv"));
  CHECK(fs::exists(dir + "/traj_0.svg"));

  REQUIRE(run_cli("train --config " + config_path) == 0);
  CHECK(fs::exists(dir + "/region_policy.bin"));
  CHECK(fs::exists(dir + "/learning_curve.csv"));

  REQUIRE(run_cli("plot-traj --traj " + dir + "/traj_0.json --out " + dir + "/replot.svg") == 0);
  CHECK(slurp(dir + "/replot.svg") == slurp(dir + "/traj_0.svg"));

  REQUIRE(run_cli("report --in " + dir + "/report.json --out " + dir + "/again.csv") == 0);
  CHECK(slurp(dir + "/again.csv") == slurp(dir + "/report.csv"));

  // build-kg --json dumps the adjacency matrices
  REQUIRE(run_cli("build-kg --corpus " + dir + "/corpus.json --out " + dir +
                  "/kg2.triples --json " + dir + "/kg2.json") == 0);
  CHECK(slurp(dir + "/kg2.json").find("\"a_hat\"") != std::string::npos);

  // --debug adds belief traces to trajectory dumps; --dump-rir writes a file
  REQUIRE(run_cli("eval --config " + config_path + " --corpus " + dir + "/corpus.json" +
                  " --episodes " + dir + "/episodes.json --svg 1 --debug --dump-rir " + dir +
                  "/first.rir") == 0);
  CHECK(slurp(dir + "/traj_0.json").find("class_beliefs") != std::string::npos);
  CHECK(fs::exists(dir + "/first.rir"));

  // missing inputs exit nonzero
  CHECK(run_cli("eval --config " + config_path + " --corpus " + dir + "/nope.json") != 0);
  CHECK(run_cli("build-kg --corpus " + dir + "/nope.json --out " + dir + "/x.triples") != 0);
}

TEST_CASE("evaluation rejects episodes that do not match the corpus") {
  ExperimentConfig cfg = tiny_config();
  const KnowledgeGraph kg = load_triples(cfg.kg_triples);
  GenParams params = default_gen_params(kg);
  params.grid_min = 16;
  params.grid_max = 18;
  const Corpus corpus = generate_corpus(1, 5, params);

  Episode bad_house;
  bad_house.house_id = 99;
  CHECK_THROWS_WITH_AS(evaluate_policy(cfg, corpus, kg, {bad_house}, 1),
                       doctest::Contains("outside the corpus"), Error);

  Episode bad_goal;
  bad_goal.house_id = 0;
  bad_goal.goal_object_index = 1000;
  CHECK_THROWS_WITH_AS(evaluate_policy(cfg, corpus, kg, {bad_goal}, 1),
                       doctest::Contains("missing goal object"), Error);
}

TEST_CASE("trained region head drives the knowledge-prior agent") {
  const std::string dir = "/tmp/savnav_trained_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  ExperimentConfig cfg = tiny_config();
  cfg.policy.train_episodes = 400;
  cfg.policy.batch_size = 10;
  cfg.policy.lr = 1.0;
  const KnowledgeGraph kg = load_triples(cfg.kg_triples);
  const TrainOutput trained = train_region_policy(cfg, kg);
  save_weights({trained.policy.w}, dir + "/head.bin");

  cfg.policy.name = "knowledge-trained";
  cfg.policy.weights_path = dir + "/head.bin";
  cfg.eval.episodes_per_split = 1;
  GenParams params = default_gen_params(kg);
  params.grid_min = 16;
  params.grid_max = 18;
  params.regions_min = 3;
  params.regions_max = 4;
  const Corpus corpus = generate_corpus(3, 5, params);
  const ObjectSplits splits = make_object_splits(cfg.master_seed);
  const auto episodes = sample_eval_episodes(corpus, splits, 1, cfg.master_seed);
  const EvalOutput out = evaluate_policy(cfg, corpus, kg, episodes, 1);
  CHECK(out.evaluated.size() == episodes.size());
  for (const auto& ev : out.evaluated) CHECK(ev.result.action_count >= 1);

  // identical rerun: the trained pipeline is deterministic end to end
  const EvalOutput again = evaluate_policy(cfg, corpus, kg, episodes, 1);
  for (std::size_t i = 0; i < out.evaluated.size(); ++i)
    CHECK(rollout_hash(out.evaluated[i].result) == rollout_hash(again.evaluated[i].result));
}
