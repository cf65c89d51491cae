#include "savnav/episodes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "savnav/error.hpp"
#include "savnav/rng.hpp"

namespace savnav {

ObjectSplits make_object_splits(std::uint64_t seed) {
  std::vector<int> order(Vocabulary::kObjects);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed_mix(seed, "object-splits"));
  for (int i = Vocabulary::kObjects - 1; i > 0; --i)
    std::swap(order[i], order[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);
  ObjectSplits splits;
  splits.heard.assign(order.begin(), order.begin() + 16);
  splits.unheard.assign(order.begin() + 16, order.end());
  std::sort(splits.heard.begin(), splits.heard.end());
  std::sort(splits.unheard.begin(), splits.unheard.end());
  return splits;
}

double sample_duration_raw(std::uint64_t episode_seed) {
  Rng rng(seed_mix(episode_seed, "duration"));
  return rng.normal(15.0, 9.0);
}

Episode sample_episode(const HouseMap& house, int house_id, std::uint64_t seed,
                       const std::vector<int>& sound_classes, bool unseen_house,
                       bool unheard_sound) {
  std::vector<int> goal_candidates;
  for (std::size_t i = 0; i < house.objects.size(); ++i)
    if (std::find(sound_classes.begin(), sound_classes.end(),
                  house.objects[i].object_class) != sound_classes.end())
      goal_candidates.push_back(static_cast<int>(i));
  require(!goal_candidates.empty(), "episodes",
          "house " + std::to_string(house_id) + " has no object of the requested sound classes");

  std::vector<Vec2i> free_cells;
  for (int y = 0; y < house.height; ++y)
    for (int x = 0; x < house.width; ++x)
      if (house.is_free({x, y})) free_cells.push_back({x, y});

  Episode ep;
  ep.house_id = house_id;
  ep.seed = seed;
  ep.unseen_house = unseen_house;
  ep.unheard_sound = unheard_sound;
  ep.duration_s = std::clamp(sample_duration_raw(seed), 5.0, 500.0);

  Rng rng(seed_mix(seed, "episode"));
  constexpr int kMaxTries = 10000;
  for (int attempt = 0; attempt < kMaxTries; ++attempt) {
    const int goal = goal_candidates[rng.uniform_int(goal_candidates.size())];
    const Vec2i start = free_cells[rng.uniform_int(free_cells.size())];
    const int heading = 90 * rng.int_in(0, 3);
    const Vec2i goal_cell = house.objects[goal].cell;
    if (start == goal_cell) continue;
    const double geo = geodesic_distance(house, start, goal_cell);
    const double euc = euclidean_distance(start, goal_cell);
    if (geo <= 4.0 || geo / euc <= 1.1) continue;
    ep.goal_object_index = goal;
    ep.start = Pose{start, heading};
    return ep;
  }
  fail("episodes", "house " + std::to_string(house_id) +
                       ": no start/goal satisfying the distance constraints after " +
                       std::to_string(kMaxTries) + " tries");
}

Environment::Environment(const HouseMap& map, const Episode& episode, const RewardConfig& rewards,
                         const AcousticParams& acoustics, const OracleConfig& oracles,
                         bool auto_stop)
    : map_(map),
      episode_(episode),
      rewards_(rewards),
      acoustics_(acoustics),
      oracles_(oracles),
      auto_stop_(auto_stop),
      event_{episode.goal_object_index, episode.duration_s},
      pose_(episode.start) {}

double Environment::true_drr_now() const {
  // DRR is a pure function of the integer geodesic distance under the
  // parametric synthesis, so memoize per distance but keep the honest path:
  // synthesize the RIR and measure it.
  const int d = static_cast<int>(std::llround(geo_to_goal_));
  if (drr_by_distance_.size() <= static_cast<std::size_t>(d))
    drr_by_distance_.resize(d + 1);
  if (!drr_by_distance_[d]) {
    const Rir rir = synthesize_rir(map_, goal().cell, pose_.cell, acoustics_,
                                   seed_mix(episode_.seed, "rir", step_count_));
    drr_by_distance_[d] = true_drr(rir);
  }
  return *drr_by_distance_[d];
}

Observation Environment::observe(const PoseDelta& delta) {
  Observation obs;
  obs.step = step_count_;
  obs.pose_delta = delta;
  obs.vision_scores = vision_oracle(map_, pose_, oracles_,
                                    seed_mix(episode_.seed, "vision", step_count_));
  obs.audio = observe_audio(map_, goal(), pose_, step_count_, event_, acoustics_);
  return obs;
}

Observation Environment::reset() {
  pose_ = episode_.start;
  step_count_ = 0;
  done_ = false;
  geo_to_goal_ = geodesic_distance(map_, pose_.cell, goal().cell);
  return observe(PoseDelta{});
}

StepResult Environment::step(Action action) {
  require(!done_, "episodes", "step after episode end");
  StepResult result;

  PoseDelta delta;
  Pose next = pose_;
  switch (action) {
    case Action::kMoveForward: {
      const Vec2i dir = heading_dir(pose_.heading_deg);
      const Vec2i cell{pose_.cell.x + dir.x, pose_.cell.y + dir.y};
      if (map_.is_free(cell)) {  // collisions leave the pose unchanged
        next.cell = cell;
        delta.tx = 1.0;
      }
      break;
    }
    case Action::kTurnLeft:
      next.heading_deg = (pose_.heading_deg + 90) % 360;
      delta.rotation_deg = 90;
      break;
    case Action::kTurnRight:
      next.heading_deg = (pose_.heading_deg + 270) % 360;
      delta.rotation_deg = -90;
      break;
    case Action::kStop:
      break;
  }

  const double geo_before = geo_to_goal_;
  const double geo_after = (next.cell == pose_.cell)
                               ? geo_before
                               : geodesic_distance(map_, next.cell, goal().cell);
  pose_ = next;
  geo_to_goal_ = geo_after;
  ++step_count_;

  result.reward = rewards_.step_penalty + rewards_.geo_delta_scale * (geo_before - geo_after);

  if (action == Action::kStop) {
    done_ = true;
    result.success = check_success(map_, episode_, pose_, action);
  } else if (auto_stop_ && geo_after <= 1.0) {
    // Simulator-issued Stop for the random baseline within 1 m of the goal.
    done_ = true;
    result.auto_stopped = true;
    result.success = check_success(map_, episode_, pose_, Action::kStop);
  }
  if (result.success) result.reward += rewards_.success_reward;
  if (step_count_ >= rewards_.max_steps) done_ = true;

  result.done = done_;
  result.observation = observe(delta);
  return result;
}

bool check_success(const HouseMap& map, const Episode& episode, const Pose& pose, Action action) {
  if (action != Action::kStop) return false;
  const ObjectInstance& goal = map.objects[episode.goal_object_index];
  for (Vec2i v : goal.viewpoints)
    if (v == pose.cell) return true;
  return false;
}

RolloutResult rollout(Policy& policy, const HouseMap& map, const Episode& episode,
                      const KnowledgeGraph& kg, const RolloutConfig& cfg) {
  Environment env(map, episode, cfg.rewards, cfg.acoustics, cfg.oracles, policy.auto_stop());
  policy.reset(episode.seed);

  RolloutResult result;
  result.sound_stopped_step = static_cast<int>(std::ceil(episode.duration_s));

  ClassBelief class_belief = initial_class_belief();
  LocationBelief location_belief;

  Observation obs = env.reset();
  result.poses.push_back(env.pose());

  const int goal_class = map.objects[episode.goal_object_index].object_class;
  auto update_beliefs = [&](const Observation& o) {
    if (o.audio.silent) {
      class_belief = update_class_belief_silent(class_belief);
      location_belief = update_location_belief_silent(location_belief, o.pose_delta);
      return;
    }
    const Vec audio_scores = audio_class_oracle(
        o.audio, goal_class, cfg.oracles, seed_mix(episode.seed, "audio-cls", o.step));
    class_belief = update_class_belief(class_belief, audio_scores, o.step, cfg.class_belief_delta);
    const LocationEstimate est = location_oracle(o.audio, env.true_drr_now(), cfg.oracles,
                                                 seed_mix(episode.seed, "loc", o.step));
    location_belief = update_location_belief(location_belief, {est.offset_x, est.offset_y},
                                             est.drr, o.pose_delta, cfg.location_mode);
  };
  auto record_beliefs = [&] {
    if (!cfg.record_beliefs) return;
    result.class_belief_trace.push_back(class_belief.scores);
    result.location_belief_trace.push_back(location_belief);
  };
  update_beliefs(obs);
  record_beliefs();

  while (!env.done()) {
    StepContext ctx;
    ctx.map = &map;
    ctx.kg = &kg;
    ctx.pose = env.pose();
    ctx.class_belief = &class_belief;
    ctx.location_belief = &location_belief;
    ctx.vision_scores = &obs.vision_scores;

    const Action action = policy.step(ctx);
    const Pose before = env.pose();
    StepResult sr;
    try {
      sr = env.step(action);
    } catch (const Error& e) {
      fail("episodes", "step " + std::to_string(env.step_count()) + ": " + e.what());
    }

    result.actions.push_back(action);
    result.rewards.push_back(sr.reward);
    result.poses.push_back(env.pose());
    result.path_length_m += euclidean_distance(before.cell, env.pose().cell);
    if (sr.success) result.success = true;
    if (sr.done) {
      const bool stopped = action == Action::kStop || sr.auto_stopped;
      result.stopped_after_silence =
          stopped && env.step_count() >= result.sound_stopped_step;
      break;
    }
    obs = sr.observation;
    update_beliefs(obs);
    record_beliefs();
  }

  result.action_count = static_cast<int>(result.actions.size());
  const ObjectInstance& goal = map.objects[episode.goal_object_index];
  double best = kInfDistance;
  const auto dist = bfs_distances(map, env.pose().cell);
  for (Vec2i v : goal.viewpoints) {
    const int d = dist[map.cell_index(v)];
    if (d >= 0) best = std::min(best, static_cast<double>(d));
  }
  result.final_geodesic_m = best;
  return result;
}

std::uint64_t rollout_hash(const RolloutResult& result) {
  std::string repr;
  for (Action a : result.actions) repr += std::to_string(static_cast<int>(a)) + ",";
  for (const Pose& p : result.poses)
    repr += std::to_string(p.cell.x) + ":" + std::to_string(p.cell.y) + ":" +
            std::to_string(p.heading_deg) + ";";
  for (double r : result.rewards) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g|", r);
    repr += buf;
  }
  repr += result.success ? "S" : "F";
  return fnv1a64(repr);
}

std::string episodes_to_json(const std::vector<Episode>& episodes) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Episode& e : episodes) {
    arr.push_back({{"house_id", e.house_id},
                   {"start", {e.start.cell.x, e.start.cell.y, e.start.heading_deg}},
                   {"goal_object_index", e.goal_object_index},
                   {"duration_s", e.duration_s},
                   {"unseen_house", e.unseen_house},
                   {"unheard_sound", e.unheard_sound},
                   {"seed", e.seed}});
  }
  return arr.dump();
}

std::vector<Episode> episodes_from_json(const std::string& text) {
  const auto arr = nlohmann::json::parse(text);
  std::vector<Episode> episodes;
  for (const auto& j : arr) {
    Episode e;
    e.house_id = j.at("house_id").get<int>();
    e.start.cell = {j.at("start").at(0).get<int>(), j.at("start").at(1).get<int>()};
    e.start.heading_deg = j.at("start").at(2).get<int>();
    e.goal_object_index = j.at("goal_object_index").get<int>();
    e.duration_s = j.at("duration_s").get<double>();
    e.unseen_house = j.at("unseen_house").get<bool>();
    e.unheard_sound = j.at("unheard_sound").get<bool>();
    e.seed = j.at("seed").get<std::uint64_t>();
    episodes.push_back(e);
  }
  return episodes;
}

}  // namespace savnav
