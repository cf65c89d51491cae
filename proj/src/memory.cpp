#include "savnav/memory.hpp"

#include <cmath>

#include "savnav/error.hpp"
#include "savnav/rng.hpp"
#include "savnav/vocab.hpp"

namespace savnav {

void SceneMemory::push(const Vec& entry) {
  require(static_cast<int>(entry.size()) == cfg_.entry_width, "memory",
          "entry width " + std::to_string(entry.size()) + " != configured " +
              std::to_string(cfg_.entry_width));
  entries_.push_back(entry);
  if (static_cast<int>(entries_.size()) > cfg_.capacity) entries_.pop_front();
}

namespace {

Mat seeded_projection(Rng& rng, int in, int out) {
  Mat m(in, out);
  const double scale = 1.0 / std::sqrt(in);
  for (auto& v : m.data()) v = rng.normal(0.0, scale);
  return m;
}

Vec softmax(Vec v) {
  double max = v[0];
  for (double x : v) max = std::max(max, x);
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - max);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace

AttentionParams make_attention_params(std::uint64_t seed, int query_dim, int key_dim,
                                      int model_dim) {
  require(query_dim > 0 && key_dim > 0 && model_dim > 0, "memory", "attention dims must be positive");
  Rng rng(seed_mix(seed, "attn"));
  AttentionParams p;
  p.wq = seeded_projection(rng, query_dim, model_dim);
  p.wk = seeded_projection(rng, key_dim, model_dim);
  p.wv = seeded_projection(rng, key_dim, model_dim);
  return p;
}

Mat encode(const SceneMemory& mem, const AttentionParams& params) {
  require(mem.size() > 0, "memory", "encode on empty memory");
  const std::size_t n = mem.size();
  Mat e(n, mem.config().entry_width);
  {
    std::size_t i = 0;
    for (const Vec& entry : mem.entries()) {
      for (std::size_t j = 0; j < entry.size(); ++j) e(i, j) = entry[j];
      ++i;
    }
  }
  const Mat q = matmul(e, params.wq);
  const Mat k = matmul(e, params.wk);
  const Mat v = matmul(e, params.wv);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(q.cols()));

  Mat me(n, v.cols());
  for (std::size_t i = 0; i < n; ++i) {
    Vec logits(n);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < q.cols(); ++t) s += q(i, t) * k(j, t);
      logits[j] = s * inv_sqrt_d;
    }
    const Vec weights = softmax(std::move(logits));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t t = 0; t < v.cols(); ++t) me(i, t) += weights[j] * v(j, t);
  }
  return me;
}

Vec decode(const Mat& me, const Vec& query, const AttentionParams& params) {
  require(me.rows() > 0, "memory", "decode on empty encoded memory");
  require(query.size() == params.wq.rows(), "memory",
          "query width " + std::to_string(query.size()) + " != projection input " +
              std::to_string(params.wq.rows()));
  require(me.cols() == params.wk.rows(), "memory", "encoded memory width mismatch");
  const Vec q = vec_mat(query, params.wq);
  const Mat k = matmul(me, params.wk);
  const Mat v = matmul(me, params.wv);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(q.size()));

  Vec logits(me.rows());
  for (std::size_t j = 0; j < me.rows(); ++j) {
    double s = 0.0;
    for (std::size_t t = 0; t < q.size(); ++t) s += q[t] * k(j, t);
    logits[j] = s * inv_sqrt_d;
  }
  const Vec weights = softmax(std::move(logits));
  Vec out(v.cols(), 0.0);
  for (std::size_t j = 0; j < me.rows(); ++j)
    for (std::size_t t = 0; t < v.cols(); ++t) out[t] += weights[j] * v(j, t);
  return out;
}

ObservationEncoders make_observation_encoders(std::uint64_t seed, const MemoryConfig& cfg) {
  Rng rng(seed_mix(seed, "obs-enc"));
  ObservationEncoders enc;
  enc.vision_projection =
      seeded_projection(rng, Vocabulary::kRegions + Vocabulary::kObjects + 3, cfg.vision_width);
  enc.action_projection = seeded_projection(rng, 4, cfg.action_width);
  return enc;
}

Vec vision_stub_features(const HouseMap& map, const Pose& pose) {
  Vec f(Vocabulary::kRegions + Vocabulary::kObjects + 3, 0.0);
  const std::int16_t region = map.at(pose.cell);
  f[map.regions[region].region_class] = 1.0;
  const Vec2i fwd = heading_dir(pose.heading_deg);
  const Vec2i left{-fwd.y, fwd.x};
  constexpr int kRayCap = 10;
  for (int lateral = -1; lateral <= 1; ++lateral) {
    int steps = 0;
    while (steps < kRayCap) {
      const Vec2i c{pose.cell.x + fwd.x * (steps + 1) + left.x * lateral,
                    pose.cell.y + fwd.y * (steps + 1) + left.y * lateral};
      if (!map.is_free(c)) break;
      ++steps;
      for (const ObjectInstance& obj : map.objects)
        if (obj.cell == c && steps <= 3) f[Vocabulary::kRegions + obj.object_class] = 1.0;
    }
    f[Vocabulary::kRegions + Vocabulary::kObjects + (lateral + 1)] =
        static_cast<double>(steps) / kRayCap;
  }
  return f;
}

Vec build_entry(const Vec& vision_stub, const Vec& gen_embedding, const Pose& relative_pose,
                int prev_action, const ObservationEncoders& enc, const MemoryConfig& cfg) {
  require(static_cast<int>(gen_embedding.size()) == cfg.gen_width, "memory",
          "GEN embedding width mismatch");
  const Vec vision = vec_mat(vision_stub, enc.vision_projection);
  Vec action(4, 0.0);
  if (prev_action >= 0) {
    require(prev_action < 4, "memory", "action index out of range");
    action[prev_action] = 1.0;
  }
  const Vec action_emb = vec_mat(action, enc.action_projection);

  const int used = cfg.vision_width + cfg.gen_width + 2 + 2 + cfg.action_width;
  require(cfg.entry_width >= used, "memory", "entry width too small for the packing");
  Vec entry(cfg.entry_width, 0.0);
  std::size_t at = 0;
  for (double v : vision) entry[at++] = v;
  for (double v : gen_embedding) entry[at++] = v;
  entry[at++] = relative_pose.cell.x;
  entry[at++] = relative_pose.cell.y;
  // Heading as sin/cos; exact values for the four cardinal headings.
  const Vec2i dir = heading_dir(relative_pose.heading_deg);
  entry[at++] = dir.y;  // sin
  entry[at++] = dir.x;  // cos
  for (double v : action_emb) entry[at++] = v;
  // rest stays zero padding
  return entry;
}

}  // namespace savnav
