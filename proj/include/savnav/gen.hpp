#pragma once
// Graph encoder network over the 45-vertex graph: node features are word
// embeddings concatenated with per-vertex classification scores, propagated
// as H^(l+1) = ReLU(Ahat H^(l) W^(l)) with no biases, then pooled to a graph
// embedding. Forward, readout, and exact reverse-mode gradients.

#include <cstdint>
#include <string>
#include <vector>

#include "savnav/matrix.hpp"

namespace savnav {

struct GenDims {
  int embedding = 300;  // D
  int hidden = 128;
  int output = 64;  // F
  int layers = 3;   // L

  /// (D+45) -> hidden -> ... -> output.
  std::vector<std::pair<int, int>> layer_shapes() const;
};

struct EmbeddingTable {
  Mat vectors;  // 45 x D, unit-normalized rows
};

/// Seeded Gaussian pseudo-embeddings, each row L2-normalized.
EmbeddingTable make_embedding_table(std::uint64_t seed, int dim = 300);

/// "name v1 ... vD" rows covering every vocabulary entry (rows normalized).
EmbeddingTable load_embedding_table(const std::string& path);

struct GenWeights {
  std::vector<Mat> w;
};

/// Glorot-uniform init, deterministic per seed.
GenWeights init_weights(std::uint64_t seed, const GenDims& dims);

void save_weights(const std::vector<Mat>& mats, const std::string& path);
std::vector<Mat> load_weights(const std::string& path);

/// X: 45 x (D+45). Row v is [embedding(v) ; e_v * scores[v]] where the score
/// block is a 45-wide one-score-per-vertex slot vector.
Mat init_node_features(const Vec& scores45, const EmbeddingTable& table);

struct ForwardCache {
  std::vector<Mat> h;  // h[0] = X .. h[L] = Z
};

Mat propagate(const Mat& x, const Mat& a_hat, const GenWeights& weights);
ForwardCache propagate_cached(const Mat& x, const Mat& a_hat, const GenWeights& weights);

enum class ReadoutMode { kScoreWeighted, kMean };

/// Pooled graph embedding of length F.
Vec readout(const Mat& z, const Vec& scores45, ReadoutMode mode = ReadoutMode::kScoreWeighted);

struct GenGradients {
  std::vector<Mat> d_w;
  Mat d_x;
};

/// Exact reverse-mode gradients through the propagate composition; the ReLU
/// subgradient at 0 is 0.
GenGradients backward(const ForwardCache& cache, const Mat& a_hat, const GenWeights& weights,
                      const Mat& upstream);

}  // namespace savnav
