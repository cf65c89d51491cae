#include "savnav/agents.hpp"

#include <algorithm>
#include <cmath>

#include "savnav/error.hpp"
#include "savnav/vocab.hpp"

namespace savnav {

namespace {

constexpr double kQuarterPi = 0.78539816339744830961;

int argmax(const Vec& v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = static_cast<int>(i);
  return best;
}

/// Turn/forward action that advances the agent toward an adjacent cell.
Action action_toward(const Pose& pose, Vec2i next) {
  const int dx = next.x - pose.cell.x;
  const int dy = next.y - pose.cell.y;
  int want;
  if (dx == 1 && dy == 0) want = 0;
  else if (dx == 0 && dy == 1) want = 90;
  else if (dx == -1 && dy == 0) want = 180;
  else if (dx == 0 && dy == -1) want = 270;
  else fail("agents", "plan cell is not 4-adjacent");
  const int diff = ((want - pose.heading_deg) % 360 + 360) % 360;
  if (diff == 0) return Action::kMoveForward;
  if (diff == 90) return Action::kTurnLeft;
  if (diff == 270) return Action::kTurnRight;
  return Action::kTurnLeft;  // 180: fixed tie-break
}

/// True when the pose stands on a viewpoint of some instance of `cls`.
bool on_viewpoint_of_class(const HouseMap& map, const Pose& pose, int cls) {
  for (const ObjectInstance& obj : map.objects) {
    if (obj.object_class != cls) continue;
    for (Vec2i v : obj.viewpoints)
      if (v == pose.cell) return true;
  }
  return false;
}

double offset_norm(const LocationBelief& b) {
  return std::sqrt(b.offset.x * b.offset.x + b.offset.y * b.offset.y);
}

}  // namespace

Action random_policy_step(Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.33) return Action::kMoveForward;
  if (u < 0.66) return Action::kTurnLeft;
  if (u < 0.99) return Action::kTurnRight;
  return Action::kStop;
}

void RandomPolicy::reset(std::uint64_t episode_seed) {
  rng_ = Rng(seed_mix(episode_seed, "random-policy"));
}

Action RandomPolicy::step(const StepContext&) { return random_policy_step(rng_); }

void GreedyAudioPolicy::reset(std::uint64_t) {}

Action GreedyAudioPolicy::step(const StepContext& ctx) {
  const LocationBelief& loc = *ctx.location_belief;
  const int top = argmax(ctx.class_belief->scores);
  if (offset_norm(loc) <= 1.0 + 1e-9 && on_viewpoint_of_class(*ctx.map, ctx.pose, top))
    return Action::kStop;
  // Directly behind is a tie; prefer TurnLeft.
  if (loc.offset.y == 0.0 && loc.offset.x < 0.0) return Action::kTurnLeft;
  const double bearing = std::atan2(loc.offset.y, loc.offset.x);
  if (std::abs(bearing) <= kQuarterPi + 1e-12) return Action::kMoveForward;
  return bearing > 0.0 ? Action::kTurnLeft : Action::kTurnRight;
}

Vec region_score(const Vec& class_belief, const KnowledgeGraph& kg) {
  require(class_belief.size() == Vocabulary::kObjects, "agents", "belief must have 21 entries");
  Vec scores(Vocabulary::kRegions, 0.0);
  double sum = 0.0;
  for (int r = 0; r < Vocabulary::kRegions; ++r) {
    for (int o = 0; o < Vocabulary::kObjects; ++o)
      scores[r] += class_belief[o] * kg.a_hat()(o, Vocabulary::kObjects + r);
    sum += scores[r];
  }
  if (sum <= 0.0) {
    std::fill(scores.begin(), scores.end(), 1.0 / Vocabulary::kRegions);
    return scores;
  }
  for (double& s : scores) s /= sum;
  return scores;
}

void KnowledgePriorPolicy::reset(std::uint64_t episode_seed) {
  visited_.clear();
  plan_.clear();
  tour_.clear();
  target_room_ = -1;
  touring_ = false;
  fallback_.reset(episode_seed);
}

int KnowledgePriorPolicy::pick_room(const StepContext& ctx,
                                    const std::vector<int>& candidates) const {
  if (selector_) return selector_(ctx, candidates);
  const Vec scores = region_score(ctx.class_belief->scores, *ctx.kg);
  int best = -1;
  double best_score = -1.0, best_dist = 0.0;
  for (int room : candidates) {
    const RegionInstance& region = ctx.map->regions[room];
    const double s = scores[region.region_class];
    double cx = 0.0, cy = 0.0;
    for (Vec2i c : region.cells) {
      cx += c.x;
      cy += c.y;
    }
    cx /= region.cells.size();
    cy /= region.cells.size();
    const double dx = cx - ctx.pose.cell.x, dy = cy - ctx.pose.cell.y;
    const double dist = std::sqrt(dx * dx + dy * dy);
    if (best < 0 || s > best_score + 1e-12 ||
        (std::abs(s - best_score) <= 1e-12 && dist < best_dist)) {
      best = room;
      best_score = s;
      best_dist = dist;
    }
  }
  return best;
}

void KnowledgePriorPolicy::plan_to(const StepContext& ctx, Vec2i target) {
  const auto path = shortest_path(*ctx.map, ctx.pose.cell, target);
  plan_.assign(path.begin() + 1, path.end());
}

Action KnowledgePriorPolicy::follow_plan(const StepContext& ctx) {
  const Action a = action_toward(ctx.pose, plan_.front());
  if (a == Action::kMoveForward) plan_.pop_front();
  return a;
}

void KnowledgePriorPolicy::begin_tour(const StepContext& ctx) {
  const HouseMap& map = *ctx.map;
  visited_.insert(target_room_);
  touring_ = true;
  plan_.clear();
  tour_.clear();
  // Viewpoints of instances of the top-3 believed classes, in belief order.
  Vec belief = ctx.class_belief->scores;
  for (int rank = 0; rank < 3; ++rank) {
    const int cls = argmax(belief);
    if (belief[cls] <= 0.0) break;
    belief[cls] = -1.0;
    for (const ObjectInstance& obj : map.objects) {
      if (obj.object_class != cls || map.at(obj.cell) != target_room_) continue;
      Vec2i best = obj.viewpoints.front();
      double best_d = kInfDistance;
      const Vec2i from = tour_.empty() ? ctx.pose.cell : tour_.back().viewpoint;
      for (Vec2i v : obj.viewpoints) {
        const double d = euclidean_distance(from, v);
        if (d < best_d) {
          best_d = d;
          best = v;
        }
      }
      tour_.push_back({best, obj.cell});
    }
  }
}

Action KnowledgePriorPolicy::step(const StepContext& ctx) {
  const HouseMap& map = *ctx.map;
  const int top = argmax(ctx.class_belief->scores);

  // Stop: believed goal within reach, on a matching viewpoint, vision agrees.
  if (offset_norm(*ctx.location_belief) <= 1.0 + 1e-9 &&
      on_viewpoint_of_class(map, ctx.pose, top) && (*ctx.vision_scores)[top] > 0.5)
    return Action::kStop;

  // Arrival at the pending target room starts its viewpoint tour.
  if (target_room_ >= 0 && !touring_ && map.at(ctx.pose.cell) == target_room_) begin_tour(ctx);

  // Drop plan cells already reached; a front cell that is not adjacent means
  // the pose diverged from the plan (blocked move), so replan from scratch.
  while (!plan_.empty() && plan_.front() == ctx.pose.cell) plan_.pop_front();
  if (!plan_.empty()) {
    const int manhattan = std::abs(plan_.front().x - ctx.pose.cell.x) +
                          std::abs(plan_.front().y - ctx.pose.cell.y);
    if (manhattan == 1) return follow_plan(ctx);
    plan_.clear();
  }

  // Plan the next leg: continue the tour, else head for a fresh room. Bounded
  // by the room count since each pass either plans a path or marks a room.
  for (std::size_t guard = 0; guard <= map.regions.size() + 1; ++guard) {
    while (touring_ && !tour_.empty()) {
      const TourStop stop = tour_.front();
      if (stop.viewpoint == ctx.pose.cell) {
        // Face the instance so the next step's stop check sees it; once
        // facing (and the check still declined), move on.
        const Vec2i dir = heading_dir(ctx.pose.heading_deg);
        const Vec2i toward{stop.object_cell.x - ctx.pose.cell.x,
                           stop.object_cell.y - ctx.pose.cell.y};
        if (!(dir == toward)) return action_toward(ctx.pose, stop.object_cell);
        tour_.pop_front();
        continue;
      }
      plan_to(ctx, stop.viewpoint);  // keep the entry until the visit is done
      return follow_plan(ctx);
    }
    touring_ = false;
    target_room_ = -1;

    std::vector<int> candidates;
    for (int room = 0; room < static_cast<int>(map.regions.size()); ++room)
      if (!visited_.count(room)) candidates.push_back(room);
    if (candidates.empty()) return fallback_.step(ctx);  // everything explored

    target_room_ = pick_room(ctx, candidates);
    if (map.at(ctx.pose.cell) == target_room_) {
      begin_tour(ctx);
      continue;
    }
    // Nearest cell of the chosen room.
    Vec2i best = map.regions[target_room_].cells.front();
    const auto dist = bfs_distances(map, ctx.pose.cell);
    int best_d = std::numeric_limits<int>::max();
    for (Vec2i c : map.regions[target_room_].cells) {
      const int d = dist[map.cell_index(c)];
      if (d >= 0 && d < best_d) {
        best_d = d;
        best = c;
      }
    }
    plan_to(ctx, best);
    return follow_plan(ctx);
  }
  return fallback_.step(ctx);
}

std::unique_ptr<Policy> make_policy(const std::string& name) {
  if (name == "random") return std::make_unique<RandomPolicy>();
  if (name == "greedy") return std::make_unique<GreedyAudioPolicy>();
  if (name == "knowledge") return std::make_unique<KnowledgePriorPolicy>();
  fail("agents", "unknown policy '" + name + "'");
}

RegionPolicy init_region_policy(std::uint64_t seed, int state_dim) {
  require(state_dim > 0, "agents", "state dim must be positive");
  Rng rng(seed_mix(seed, "region-policy"));
  RegionPolicy p{Mat(Vocabulary::kRegions, state_dim)};
  const double bound = std::sqrt(6.0 / (Vocabulary::kRegions + state_dim));
  for (auto& v : p.w.data()) v = rng.uniform(-bound, bound);
  return p;
}

Vec region_policy_probs(const RegionPolicy& policy, const Vec& state) {
  require(state.size() == policy.w.cols(), "agents", "state width mismatch");
  Vec logits(Vocabulary::kRegions, 0.0);
  for (int r = 0; r < Vocabulary::kRegions; ++r)
    for (std::size_t j = 0; j < state.size(); ++j) logits[r] += policy.w(r, j) * state[j];
  double max = logits[0];
  for (double v : logits) max = std::max(max, v);
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - max);
    sum += v;
  }
  for (double& v : logits) v /= sum;
  return logits;
}

RegionPolicy reinforce_update(const RegionPolicy& policy, const std::vector<TrainEpisode>& batch,
                              double lr) {
  require(!batch.empty(), "agents", "empty REINFORCE batch");
  double baseline = 0.0;
  for (const TrainEpisode& e : batch) {
    require(std::isfinite(e.ret), "agents", "non-finite return in batch");
    baseline += e.ret;
  }
  baseline /= static_cast<double>(batch.size());

  RegionPolicy out = policy;
  for (const TrainEpisode& e : batch) {
    require(e.chosen_region >= 0 && e.chosen_region < Vocabulary::kRegions, "agents",
            "chosen region out of range");
    const Vec probs = region_policy_probs(policy, e.state);
    const double advantage = e.ret - baseline;
    for (int r = 0; r < Vocabulary::kRegions; ++r) {
      const double coeff = lr * advantage * ((r == e.chosen_region ? 1.0 : 0.0) - probs[r]);
      if (coeff == 0.0) continue;
      for (std::size_t j = 0; j < e.state.size(); ++j) out.w(r, j) += coeff * e.state[j];
    }
  }
  return out;
}

}  // namespace savnav
