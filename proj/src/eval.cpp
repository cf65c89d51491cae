#include "savnav/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "savnav/error.hpp"
#include "savnav/rng.hpp"

namespace savnav {

Pipeline build_pipeline(std::uint64_t seed, const GenDims& dims, const MemoryConfig& memory) {
  Pipeline p;
  p.dims = dims;
  p.memory = memory;
  p.memory.gen_width = dims.output;
  p.table = make_embedding_table(seed_mix(seed, "embeddings"), dims.embedding);
  p.gen_vision = init_weights(seed_mix(seed, "gen-vision"), dims);
  p.gen_audio = init_weights(seed_mix(seed, "gen-audio"), dims);
  p.encoder = make_attention_params(seed_mix(seed, "encoder"), p.memory.entry_width,
                                    p.memory.entry_width, p.memory.model_dim);
  p.decoder = make_attention_params(seed_mix(seed, "decoder"), p.query_width(),
                                    p.memory.model_dim, p.memory.model_dim);
  p.encoders = make_observation_encoders(seed_mix(seed, "stubs"), p.memory);
  return p;
}

Vec gen_embedding(const Pipeline& pipeline, const GenWeights& weights, const Vec& scores45,
                  const KnowledgeGraph& kg) {
  const Mat x = init_node_features(scores45, pipeline.table);
  const Mat z = propagate(x, kg.a_hat(), weights);
  return readout(z, scores45, ReadoutMode::kScoreWeighted);
}

Vec compute_state(const Pipeline& pipeline, const SceneMemory& memory,
                  const ClassBelief& class_belief, const LocationBelief& location_belief,
                  const KnowledgeGraph& kg) {
  // Audio-side GEN input: belief scores over objects, region slots zero.
  Vec audio_scores(Vocabulary::kVertices, 0.0);
  for (int o = 0; o < Vocabulary::kObjects; ++o) audio_scores[o] = class_belief.scores[o];
  const Vec e_b_gen = gen_embedding(pipeline, pipeline.gen_audio, audio_scores, kg);

  Vec query;
  query.reserve(pipeline.query_width());
  query.insert(query.end(), e_b_gen.begin(), e_b_gen.end());
  query.insert(query.end(), class_belief.scores.begin(), class_belief.scores.end());
  query.push_back(location_belief.offset.x);
  query.push_back(location_belief.offset.y);

  const Mat me = encode(memory, pipeline.encoder);
  return decode(me, query, pipeline.decoder);
}

Pose relative_pose(const Pose& origin, const Pose& pose) {
  const int dx = pose.cell.x - origin.cell.x;
  const int dy = pose.cell.y - origin.cell.y;
  const Vec2i dir = heading_dir(origin.heading_deg);  // rotate world delta by -origin heading
  Pose rel;
  rel.cell = {dx * dir.x + dy * dir.y, -dx * dir.y + dy * dir.x};
  rel.heading_deg = ((pose.heading_deg - origin.heading_deg) % 360 + 360) % 360;
  return rel;
}

TrainedKnowledgePolicy::TrainedKnowledgePolicy(const Pipeline& pipeline, RegionPolicy head)
    : pipeline_(pipeline),
      head_(std::move(head)),
      inner_([this](const StepContext& ctx, const std::vector<int>& rooms) {
        // Score candidate rooms by the head's logit for their region label.
        const Vec state = compute_state(pipeline_, memory_, *ctx.class_belief,
                                        *ctx.location_belief, *ctx.kg);
        Vec logits(Vocabulary::kRegions, 0.0);
        for (int r = 0; r < Vocabulary::kRegions; ++r)
          for (std::size_t j = 0; j < state.size(); ++j) logits[r] += head_.w(r, j) * state[j];
        int best = rooms.front();
        for (int room : rooms)
          if (logits[ctx.map->regions[room].region_class] >
              logits[ctx.map->regions[best].region_class])
            best = room;
        return best;
      }),
      memory_(pipeline.memory) {}

void TrainedKnowledgePolicy::reset(std::uint64_t episode_seed) {
  inner_.reset(episode_seed);
  memory_ = SceneMemory(pipeline_.memory);
  have_origin_ = false;
  last_action_ = -1;
}

Action TrainedKnowledgePolicy::step(const StepContext& ctx) {
  if (!have_origin_) {
    origin_ = ctx.pose;
    have_origin_ = true;
  }
  const Vec stub = vision_stub_features(*ctx.map, ctx.pose);
  const Vec e_v_gen = gen_embedding(pipeline_, pipeline_.gen_vision, *ctx.vision_scores, *ctx.kg);
  memory_.push(build_entry(stub, e_v_gen, relative_pose(origin_, ctx.pose), last_action_,
                           pipeline_.encoders, pipeline_.memory));
  const Action action = inner_.step(ctx);
  last_action_ = static_cast<int>(action);
  return action;
}

std::vector<Episode> sample_eval_episodes(const Corpus& corpus, const ObjectSplits& splits,
                                          int per_split, std::uint64_t seed) {
  std::vector<Episode> episodes;
  int split_index = 0;
  for (bool unseen : {false, true}) {
    for (bool unheard : {false, true}) {
      const std::vector<int>& houses = unseen ? corpus.unseen : corpus.seen;
      const std::vector<int>& classes = unheard ? splits.unheard : splits.heard;
      require(!houses.empty(), "eval", "corpus split has no houses");
      for (int i = 0; i < per_split; ++i) {
        Rng rng(seed_mix(seed, "eval-episode", (static_cast<std::uint64_t>(split_index) << 32) |
                                                   static_cast<std::uint64_t>(i)));
        bool placed = false;
        for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
          const int house_id = houses[rng.uniform_int(houses.size())];
          const HouseMap& house = corpus.houses[house_id];
          const bool has_goal = std::any_of(
              house.objects.begin(), house.objects.end(), [&](const ObjectInstance& o) {
                return std::find(classes.begin(), classes.end(), o.object_class) != classes.end();
              });
          if (!has_goal) continue;
          try {
            episodes.push_back(sample_episode(house, house_id, rng.next_u64(), classes, unseen,
                                              unheard));
            placed = true;
          } catch (const Error&) {
            // distance constraints unsatisfiable in this house; try another
          }
        }
        require(placed, "eval", "could not sample an episode for split " +
                                    std::to_string(split_index));
      }
      ++split_index;
    }
  }
  return episodes;
}

namespace {

std::unique_ptr<Policy> policy_for(const ExperimentConfig& cfg, const Pipeline* pipeline) {
  if (cfg.policy.name == "knowledge-trained") {
    require(pipeline != nullptr, "eval", "knowledge-trained policy needs a pipeline");
    require(!cfg.policy.weights_path.empty(), "eval",
            "knowledge-trained policy needs policy.weights_path");
    auto mats = load_weights(cfg.policy.weights_path);
    require(mats.size() == 1, "eval", "region head weight file must hold one matrix");
    return std::make_unique<TrainedKnowledgePolicy>(*pipeline, RegionPolicy{mats[0]});
  }
  return make_policy(cfg.policy.name);
}

}  // namespace

EvalOutput evaluate_policy(const ExperimentConfig& cfg, const Corpus& corpus,
                           const KnowledgeGraph& kg, const std::vector<Episode>& episodes,
                           int workers) {
  require(workers >= 1, "eval", "worker count must be >= 1");
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    const Episode& ep = episodes[i];
    require(ep.house_id >= 0 && ep.house_id < static_cast<int>(corpus.houses.size()), "eval",
            "episode " + std::to_string(i) + " references house " + std::to_string(ep.house_id) +
                " outside the corpus");
    const HouseMap& house = corpus.houses[ep.house_id];
    require(ep.goal_object_index >= 0 &&
                ep.goal_object_index < static_cast<int>(house.objects.size()),
            "eval", "episode " + std::to_string(i) + " references a missing goal object");
    require(house.is_free(ep.start.cell), "eval",
            "episode " + std::to_string(i) + " starts on a non-Free cell");
  }
  RolloutConfig rollout_cfg;
  rollout_cfg.rewards = cfg.rewards;
  rollout_cfg.acoustics = cfg.acoustics;
  rollout_cfg.oracles = cfg.oracles;
  rollout_cfg.location_mode = cfg.eval.location_mode;
  rollout_cfg.record_beliefs = cfg.eval.record_beliefs;

  const bool needs_pipeline = cfg.policy.name == "knowledge-trained";
  Pipeline pipeline;
  if (needs_pipeline) pipeline = build_pipeline(cfg.master_seed, cfg.gen_dims, cfg.memory);

  std::vector<EvaluatedEpisode> out(episodes.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto work = [&] {
    auto policy = policy_for(cfg, needs_pipeline ? &pipeline : nullptr);
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= episodes.size()) break;
      try {
        const Episode& ep = episodes[i];
        const HouseMap& map = corpus.houses[ep.house_id];
        out[i].result = rollout(*policy, map, ep, kg, rollout_cfg);
        out[i].episode = ep;
        out[i].map = &map;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed = true;
        error_message = e.what();
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  require(!failed.load(), "eval", error_message);

  EvalOutput result;
  result.report = compute_metrics(out);
  result.evaluated = std::move(out);
  return result;
}

TrainOutput train_region_policy(const ExperimentConfig& cfg, const KnowledgeGraph& kg,
                                int start_episode, const RegionPolicy* initial) {
  const std::uint64_t seed = seed_mix(cfg.master_seed, "train");
  const Pipeline pipeline = build_pipeline(cfg.master_seed, cfg.gen_dims, cfg.memory);

  // Fixed 3-room bandit house; the scripted prefix exercises the whole
  // observation -> GEN -> memory -> decode pathway once, deterministically.
  GenParams params = default_gen_params(kg);
  params.regions_min = 3;
  params.regions_max = 3;
  HouseMap house;
  std::uint64_t house_seed = seed_mix(seed, "bandit-house");
  for (int tries = 0;; ++tries) {
    house = generate_house(house_seed, params);
    if (!house.objects.empty()) break;
    require(tries < 32, "train", "could not build the bandit house");
    house_seed = seed_mix(house_seed, "retry");
  }

  std::vector<int> all_classes(Vocabulary::kObjects);
  for (int i = 0; i < Vocabulary::kObjects; ++i) all_classes[i] = i;
  const Episode episode =
      sample_episode(house, 0, seed_mix(seed, "bandit-episode"), all_classes, false, false);
  const int goal_class = house.objects[episode.goal_object_index].object_class;
  const int target_region =
      house.regions[house.at(house.objects[episode.goal_object_index].cell)].region_class;

  RolloutConfig rollout_cfg;
  rollout_cfg.rewards = cfg.rewards;
  rollout_cfg.acoustics = cfg.acoustics;
  rollout_cfg.oracles = cfg.oracles;

  // Scripted prefix: a few steps of observation feeding beliefs and memory.
  Environment env(house, episode, cfg.rewards, cfg.acoustics, cfg.oracles);
  SceneMemory memory(pipeline.memory);
  ClassBelief class_belief = initial_class_belief();
  LocationBelief location_belief;
  Observation obs = env.reset();
  int last_action = -1;
  const Action script[] = {Action::kTurnLeft, Action::kMoveForward, Action::kMoveForward,
                           Action::kTurnRight, Action::kMoveForward};
  for (Action a : script) {
    if (!obs.audio.silent) {
      const Vec scores = audio_class_oracle(obs.audio, goal_class, cfg.oracles,
                                            seed_mix(episode.seed, "audio-cls", obs.step));
      class_belief = update_class_belief(class_belief, scores, obs.step);
      const LocationEstimate est = location_oracle(obs.audio, env.true_drr_now(), cfg.oracles,
                                                   seed_mix(episode.seed, "loc", obs.step));
      location_belief = update_location_belief(location_belief, {est.offset_x, est.offset_y},
                                               est.drr, obs.pose_delta, rollout_cfg.location_mode);
    } else {
      class_belief = update_class_belief_silent(class_belief);
      location_belief = update_location_belief_silent(location_belief, obs.pose_delta);
    }
    const Vec stub = vision_stub_features(house, env.pose());
    const Vec e_v_gen = gen_embedding(pipeline, pipeline.gen_vision, obs.vision_scores, kg);
    memory.push(build_entry(stub, e_v_gen, relative_pose(episode.start, env.pose()), last_action,
                            pipeline.encoders, pipeline.memory));
    last_action = static_cast<int>(a);
    obs = env.step(a).observation;
  }

  Vec state = compute_state(pipeline, memory, class_belief, location_belief, kg);
  double norm = 0.0;
  for (double v : state) norm += v * v;
  norm = std::sqrt(norm);
  require(norm > 0.0, "train", "bandit state collapsed to zero");
  for (double& v : state) v /= norm;  // unit context keeps step sizes seed-independent

  TrainOutput out;
  out.bandit_state = state;
  out.target_region = target_region;
  out.policy = initial ? *initial
                       : init_region_policy(seed_mix(seed, "head"), pipeline.memory.model_dim);

  std::vector<TrainEpisode> batch;
  for (int ep = start_episode; ep < cfg.policy.train_episodes; ++ep) {
    Rng rng(seed_mix(seed, "choice", ep));
    const Vec probs = region_policy_probs(out.policy, state);
    double u = rng.uniform();
    int chosen = Vocabulary::kRegions - 1;
    for (int r = 0; r < Vocabulary::kRegions; ++r) {
      u -= probs[r];
      if (u < 0.0) {
        chosen = r;
        break;
      }
    }
    const double reward = chosen == target_region ? 1.0 : 0.0;
    batch.push_back({state, chosen, reward});
    if (static_cast<int>(batch.size()) == cfg.policy.batch_size) {
      out.policy = reinforce_update(out.policy, batch, cfg.policy.lr);
      double mean = 0.0;
      for (const TrainEpisode& b : batch) mean += b.ret;
      mean /= batch.size();
      const Vec now = region_policy_probs(out.policy, state);
      const int best = static_cast<int>(std::max_element(now.begin(), now.end()) - now.begin());
      out.curve.push_back({ep + 1, mean, best == target_region});
      batch.clear();
    }
  }
  return out;
}

std::string trajectory_to_json(const HouseMap& map, const Episode& episode,
                               const RolloutResult& result) {
  nlohmann::json j;
  j["house"] = nlohmann::json::parse(house_to_json(map));
  j["goal_object_index"] = episode.goal_object_index;
  nlohmann::json poses = nlohmann::json::array();
  for (const Pose& p : result.poses) poses.push_back({p.cell.x, p.cell.y, p.heading_deg});
  j["poses"] = std::move(poses);
  nlohmann::json actions = nlohmann::json::array();
  for (Action a : result.actions) actions.push_back(static_cast<int>(a));
  j["actions"] = std::move(actions);
  j["rewards"] = result.rewards;
  j["success"] = result.success;
  if (!result.class_belief_trace.empty()) {
    j["class_beliefs"] = result.class_belief_trace;
    nlohmann::json locs = nlohmann::json::array();
    for (const LocationBelief& b : result.location_belief_trace)
      locs.push_back({b.offset.x, b.offset.y, b.drr});
    j["location_beliefs"] = std::move(locs);
  }
  return j.dump();
}

}  // namespace savnav
