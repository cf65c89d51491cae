#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "savnav/gen.hpp"
#include "savnav/rng.hpp"
#include "savnav/vocab.hpp"
#include "test_util.hpp"

using namespace savnav;

namespace {

Mat random_mat(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  Mat m(rows, cols);
  for (auto& v : m.data()) v = rng.normal(0.0, scale);
  return m;
}

Mat random_symmetric_normalized(Rng& rng, int n) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = rng.bernoulli(0.4) ? 1.0 : 0.0;
  return normalize_adjacency(a);
}

/// Straight-line dense reference for the propagation rule, written as plain
/// triple loops independent of the library's matmul.
Mat propagate_reference(const Mat& x, const Mat& a_hat, const std::vector<Mat>& weights) {
  Mat h = x;
  for (const Mat& w : weights) {
    Mat ah(a_hat.rows(), h.cols());
    for (std::size_t i = 0; i < a_hat.rows(); ++i)
      for (std::size_t j = 0; j < h.cols(); ++j)
        for (std::size_t k = 0; k < a_hat.cols(); ++k) ah(i, j) += a_hat(i, k) * h(k, j);
    Mat next(ah.rows(), w.cols());
    for (std::size_t i = 0; i < ah.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < ah.cols(); ++k) s += ah(i, k) * w(k, j);
        next(i, j) = s > 0.0 ? s : 0.0;
      }
    h = next;
  }
  return h;
}

/// Scalar loss used by the finite-difference checks: sum of c_ij * Z_ij.
double weighted_output(const Mat& x, const Mat& a_hat, const GenWeights& w, const Mat& coeff) {
  const Mat z = propagate(x, a_hat, w);
  double s = 0.0;
  for (std::size_t i = 0; i < z.data().size(); ++i) s += coeff.data()[i] * z.data()[i];
  return s;
}

}  // namespace

TEST_CASE("embedding tables: normalization, determinism, file loading") {
  const auto table = make_embedding_table(3, 300);
  CHECK(table.vectors.rows() == 45);
  CHECK(table.vectors.cols() == 300);
  for (int v = 0; v < 45; ++v) {
    double norm2 = 0.0;
    for (int j = 0; j < 300; ++j) norm2 += table.vectors(v, j) * table.vectors(v, j);
    CHECK(std::abs(std::sqrt(norm2) - 1.0) < 1e-9);
  }
  const auto again = make_embedding_table(3, 300);
  CHECK(again.vectors == table.vectors);
  CHECK(make_embedding_table(4, 300).vectors != table.vectors);

  // text-file loading with the same interface
  const std::string path = "/tmp/savnav_test_embeddings.txt";
  std::FILE* f = std::fopen(path.c_str(), "w");
  for (int v = 0; v < Vocabulary::kVertices; ++v) {
    const std::string name = v < Vocabulary::kObjects
                                 ? "object:" + vocab().objects()[v]
                                 : "region:" + vocab().regions()[v - Vocabulary::kObjects];
    std::string token = name;
    std::replace(token.begin(), token.end(), ' ', '_');
    std::fprintf(f, "%s %d 1 0\n", token.c_str(), v + 1);
  }
  std::fclose(f);
  const auto loaded = load_embedding_table(path);
  CHECK(loaded.vectors.cols() == 3);
  const double norm = std::sqrt(2.0 * 2.0 + 1.0);
  CHECK(loaded.vectors(1, 0) == doctest::Approx(2.0 / norm));
}

TEST_CASE("init_node_features layout") {
  const auto table = make_embedding_table(1, 8);
  Vec zeros(45, 0.0);
  const Mat x0 = init_node_features(zeros, table);
  CHECK(x0.rows() == 45);
  CHECK(x0.cols() == 8 + 45);
  for (int v = 0; v < 45; ++v)
    for (int j = 8; j < 8 + 45; ++j) CHECK(x0(v, j) == 0.0);

  Vec one_hot(45, 0.0);
  one_hot[3] = 1.0;
  const Mat x1 = init_node_features(one_hot, table);
  int diffs = 0;
  for (int v = 0; v < 45; ++v)
    for (int j = 0; j < 8 + 45; ++j)
      if (x0(v, j) != x1(v, j)) ++diffs;
  CHECK(diffs == 1);
  CHECK(x1(3, 8 + 3) == 1.0);

  // audio path zero-fills the region slots by construction
  Vec audio(45, 0.0);
  Rng rng(8);
  for (int o = 0; o < Vocabulary::kObjects; ++o) audio[o] = rng.uniform();
  const Mat xa = init_node_features(audio, table);
  for (int v = Vocabulary::kObjects; v < 45; ++v) CHECK(xa(v, 8 + v) == 0.0);

  Vec bad(45, 0.0);
  bad[0] = 1.5;
  CHECK_THROWS_AS(init_node_features(bad, table), Error);
}

TEST_CASE("propagate: zero input, identity case, dense reference") {
  GenDims dims;
  dims.embedding = 4;
  dims.hidden = 6;
  dims.output = 3;
  dims.layers = 3;

  // X = 0 -> Z = 0 (no biases)
  {
    Rng rng(10);
    const Mat a_hat = random_symmetric_normalized(rng, 45);
    const auto w = init_weights(2, dims);
    Mat x(45, 4 + 45);
    const Mat z = propagate(x, a_hat, w);
    for (double v : z.data()) CHECK(v == 0.0);
  }

  // Ahat = I, one layer, W = I, nonnegative X -> Z = X
  {
    GenWeights w;
    w.w.push_back(Mat::identity(5));
    Mat x(5, 5);
    Rng rng(11);
    for (auto& v : x.data()) v = std::abs(rng.normal());
    const Mat z = propagate(x, Mat::identity(5), w);
    for (std::size_t i = 0; i < x.data().size(); ++i)
      CHECK(z.data()[i] == doctest::Approx(x.data()[i]));
  }

  // random small instances match the straight-line dense oracle
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5;
    const Mat a_hat = random_symmetric_normalized(rng, n);
    const Mat x = random_mat(rng, n, 4);
    GenWeights w;
    w.w = {random_mat(rng, 4, 6), random_mat(rng, 6, 3)};
    const Mat z = propagate(x, a_hat, w);
    const Mat ref = propagate_reference(x, a_hat, w.w);
    for (std::size_t i = 0; i < z.data().size(); ++i) {
      const double denom = std::max(1.0, std::abs(ref.data()[i]));
      CHECK(std::abs(z.data()[i] - ref.data()[i]) / denom < 1e-12);
    }
  }

  // shape mismatches are rejected and name the layer
  {
    GenWeights w;
    w.w = {Mat(7, 3)};
    CHECK_THROWS_WITH_AS(propagate(Mat(5, 4), Mat::identity(5), w), doctest::Contains("layer 0"),
                         Error);
  }
}

TEST_CASE("propagation is permutation-equivariant") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6;
    const Mat a_hat = random_symmetric_normalized(rng, n);
    const Mat x = random_mat(rng, n, 5);
    GenWeights w;
    w.w = {random_mat(rng, 5, 4), random_mat(rng, 4, 3)};

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);

    Mat px(n, x.cols()), pa(n, n);
    for (int i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < x.cols(); ++j) px(i, j) = x(perm[i], j);
      for (int j = 0; j < n; ++j) pa(i, j) = a_hat(perm[i], perm[j]);
    }
    const Mat z = propagate(x, a_hat, w);
    const Mat pz = propagate(px, pa, w);
    for (int i = 0; i < n; ++i)
      for (std::size_t j = 0; j < z.cols(); ++j)
        CHECK(std::abs(pz(i, j) - z(perm[i], j)) < 1e-10);
  }
}

TEST_CASE("hidden activations are nonnegative") {
  Rng rng(14);
  const Mat a_hat = random_symmetric_normalized(rng, 8);
  const Mat x = random_mat(rng, 8, 5);
  GenWeights w;
  w.w = {random_mat(rng, 5, 4), random_mat(rng, 4, 4), random_mat(rng, 4, 2)};
  const auto cache = propagate_cached(x, a_hat, w);
  for (std::size_t l = 1; l < cache.h.size(); ++l)
    for (double v : cache.h[l].data()) CHECK(v >= 0.0);
}

TEST_CASE("readout modes") {
  Rng rng(15);
  const Mat z = random_mat(rng, 45, 6);

  Vec uniform(45, 0.37);
  const Vec weighted = readout(z, uniform, ReadoutMode::kScoreWeighted);
  const Vec mean = readout(z, uniform, ReadoutMode::kMean);
  for (std::size_t j = 0; j < weighted.size(); ++j)
    CHECK(weighted[j] == doctest::Approx(mean[j]));

  Vec one_hot(45, 0.0);
  one_hot[17] = 1.0;
  const Vec selected = readout(z, one_hot, ReadoutMode::kScoreWeighted);
  for (std::size_t j = 0; j < selected.size(); ++j)
    CHECK(selected[j] == doctest::Approx(z(17, j)));

  // random weighted sum, recomputed by hand
  Vec scores(45, 0.0);
  for (auto& s : scores) s = rng.uniform();
  const Vec out = readout(z, scores, ReadoutMode::kScoreWeighted);
  const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    double expect = 0.0;
    for (int v = 0; v < 45; ++v) expect += scores[v] / total * z(v, j);
    CHECK(out[j] == doctest::Approx(expect));
  }

  // readout is linear in Z for fixed scores
  const Mat z2 = random_mat(rng, 45, 6);
  Mat combo(45, 6);
  for (std::size_t i = 0; i < combo.data().size(); ++i)
    combo.data()[i] = 2.0 * z.data()[i] - 3.0 * z2.data()[i];
  const Vec a = readout(z, scores, ReadoutMode::kScoreWeighted);
  const Vec b = readout(z2, scores, ReadoutMode::kScoreWeighted);
  const Vec c = readout(combo, scores, ReadoutMode::kScoreWeighted);
  for (std::size_t j = 0; j < c.size(); ++j)
    CHECK(c[j] == doctest::Approx(2.0 * a[j] - 3.0 * b[j]).epsilon(1e-10));
}

TEST_CASE("backward: zero upstream, analytic single layer, finite differences") {
  Rng rng(16);

  // zero upstream -> zero gradients
  {
    const Mat a_hat = random_symmetric_normalized(rng, 5);
    const Mat x = random_mat(rng, 5, 4);
    GenWeights w;
    w.w = {random_mat(rng, 4, 3)};
    const auto cache = propagate_cached(x, a_hat, w);
    const auto grads = backward(cache, a_hat, w, Mat(5, 3));
    for (double v : grads.d_w[0].data()) CHECK(v == 0.0);
    for (double v : grads.d_x.data()) CHECK(v == 0.0);
  }

  // single layer with Ahat = I: dW = X^T (upstream (.) mask)
  {
    const Mat x = random_mat(rng, 5, 4);
    GenWeights w;
    w.w = {random_mat(rng, 4, 3)};
    const Mat eye = Mat::identity(5);
    const auto cache = propagate_cached(x, eye, w);
    const Mat upstream = random_mat(rng, 5, 3);
    const auto grads = backward(cache, eye, w, upstream);

    Mat masked = upstream;
    for (std::size_t i = 0; i < masked.data().size(); ++i)
      if (cache.h[1].data()[i] <= 0.0) masked.data()[i] = 0.0;
    const Mat expect = matmul(x.transposed(), masked);
    for (std::size_t i = 0; i < expect.data().size(); ++i)
      CHECK(grads.d_w[0].data()[i] == doctest::Approx(expect.data()[i]));
  }

  // central finite differences on 20 seeds
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng trial_rng(seed_mix(100, "fd", seed));
    const int n = 5;
    const Mat a_hat = random_symmetric_normalized(trial_rng, n);
    const Mat x = random_mat(trial_rng, n, 4, 0.8);
    GenWeights w;
    w.w = {random_mat(trial_rng, 4, 6, 0.8), random_mat(trial_rng, 6, 3, 0.8)};
    const Mat coeff = random_mat(trial_rng, n, 3);

    const auto cache = propagate_cached(x, a_hat, w);
    const auto grads = backward(cache, a_hat, w, coeff);
    const double h = 1e-5;

    auto check_grad = [&](Mat& param, const Mat& analytic) {
      for (std::size_t i = 0; i < param.data().size(); i += 3) {  // sampled entries
        const double keep = param.data()[i];
        param.data()[i] = keep + h;
        const double up = weighted_output(x, a_hat, w, coeff);
        param.data()[i] = keep - h;
        const double down = weighted_output(x, a_hat, w, coeff);
        param.data()[i] = keep;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({1e-8, std::abs(numeric), std::abs(analytic.data()[i])});
        CHECK(std::abs(numeric - analytic.data()[i]) / denom < 1e-4);
      }
    };
    check_grad(w.w[0], grads.d_w[0]);
    check_grad(w.w[1], grads.d_w[1]);

    // dX via the same scalar function with X perturbed
    Mat x_var = x;
    for (std::size_t i = 0; i < x_var.data().size(); i += 5) {
      const double keep = x_var.data()[i];
      x_var.data()[i] = keep + h;
      const double up = weighted_output(x_var, a_hat, w, coeff);
      x_var.data()[i] = keep - h;
      const double down = weighted_output(x_var, a_hat, w, coeff);
      x_var.data()[i] = keep;
      const double numeric = (up - down) / (2.0 * h);
      const double denom = std::max({1e-8, std::abs(numeric), std::abs(grads.d_x.data()[i])});
      CHECK(std::abs(numeric - grads.d_x.data()[i]) / denom < 1e-4);
    }
  }
}

TEST_CASE("weight init: determinism, bounds, divergence") {
  GenDims dims;
  const auto a = init_weights(9, dims);
  const auto b = init_weights(9, dims);
  CHECK(a.w.size() == 3);
  for (std::size_t l = 0; l < a.w.size(); ++l) CHECK(a.w[l] == b.w[l]);

  const auto shapes = dims.layer_shapes();
  for (std::size_t l = 0; l < a.w.size(); ++l) {
    const double bound = std::sqrt(6.0 / (shapes[l].first + shapes[l].second));
    for (double v : a.w[l].data()) CHECK(std::abs(v) <= bound);
  }

  const auto c = init_weights(10, dims);
  CHECK(a.w[0] != c.w[0]);

  GenDims bad;
  bad.layers = 0;
  CHECK_THROWS_AS(init_weights(1, bad), Error);
}

TEST_CASE("weight save/load round-trip") {
  GenDims dims;
  dims.embedding = 4;
  dims.hidden = 5;
  dims.output = 3;
  const auto w = init_weights(21, dims);
  const std::string path = "/tmp/savnav_test_weights.bin";
  save_weights(w.w, path);
  const auto loaded = load_weights(path);
  REQUIRE(loaded.size() == w.w.size());
  for (std::size_t l = 0; l < loaded.size(); ++l) CHECK(loaded[l] == w.w[l]);
}
