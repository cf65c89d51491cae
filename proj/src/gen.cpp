#include "savnav/gen.hpp"

#include <algorithm>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "savnav/error.hpp"
#include "savnav/rng.hpp"
#include "savnav/vocab.hpp"

namespace savnav {

std::vector<std::pair<int, int>> GenDims::layer_shapes() const {
  require(embedding > 0 && hidden > 0 && output > 0 && layers >= 1, "gen",
          "GEN dimensions must be positive");
  std::vector<std::pair<int, int>> shapes;
  int in = embedding + Vocabulary::kVertices;
  for (int l = 0; l < layers; ++l) {
    const int out = (l == layers - 1) ? output : hidden;
    shapes.emplace_back(in, out);
    in = out;
  }
  return shapes;
}

EmbeddingTable make_embedding_table(std::uint64_t seed, int dim) {
  require(dim > 0, "gen", "embedding dim must be positive");
  Rng rng(seed_mix(seed, "embed"));
  EmbeddingTable t{Mat(Vocabulary::kVertices, dim)};
  for (int v = 0; v < Vocabulary::kVertices; ++v) {
    double norm2 = 0.0;
    for (int j = 0; j < dim; ++j) {
      t.vectors(v, j) = rng.normal();
      norm2 += t.vectors(v, j) * t.vectors(v, j);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (int j = 0; j < dim; ++j) t.vectors(v, j) *= inv;
  }
  return t;
}

EmbeddingTable load_embedding_table(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "io", "cannot open embedding file '" + path + "'");
  std::vector<std::pair<int, Vec>> rows;
  std::string line;
  int dim = -1;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string name;
    ss >> name;
    Vec values;
    double v;
    while (ss >> v) values.push_back(v);
    require(!values.empty(), "io", "embedding row for '" + name + "' has no values");
    if (dim < 0) dim = static_cast<int>(values.size());
    require(static_cast<int>(values.size()) == dim, "io",
            "embedding row for '" + name + "' has inconsistent width");
    // Names are single tokens in the file; vocabulary entries containing
    // spaces ("dining room") are written with underscores instead.
    int id = -1;
    try {
      id = vocab().vertex_id(name);
    } catch (const Error&) {
      std::string spaced = name;
      std::replace(spaced.begin(), spaced.end(), '_', ' ');
      id = vocab().vertex_id(spaced);
    }
    rows.emplace_back(id, std::move(values));
  }
  require(rows.size() == Vocabulary::kVertices, "io",
          "embedding file must cover all 45 vocabulary entries");
  EmbeddingTable t{Mat(Vocabulary::kVertices, dim)};
  for (auto& [id, values] : rows) {
    double norm2 = 0.0;
    for (double v : values) norm2 += v * v;
    require(norm2 > 0.0, "io", "zero embedding row");
    const double inv = 1.0 / std::sqrt(norm2);
    for (int j = 0; j < dim; ++j) t.vectors(id, j) = values[j] * inv;
  }
  return t;
}

GenWeights init_weights(std::uint64_t seed, const GenDims& dims) {
  GenWeights weights;
  Rng rng(seed_mix(seed, "gen-init"));
  for (auto [fan_in, fan_out] : dims.layer_shapes()) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Mat w(fan_in, fan_out);
    for (auto& v : w.data()) v = rng.uniform(-bound, bound);
    weights.w.push_back(std::move(w));
  }
  return weights;
}

void save_weights(const std::vector<Mat>& mats, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), "io", "cannot open '" + path + "' for writing");
  nlohmann::json header;
  header["dims"] = nlohmann::json::array();
  for (const Mat& m : mats) header["dims"].push_back({m.rows(), m.cols()});
  f << header.dump() << "\n";
  for (const Mat& m : mats)
    f.write(reinterpret_cast<const char*>(m.data().data()),
            static_cast<std::streamsize>(m.data().size() * sizeof(double)));
  require(f.good(), "io", "write failure on '" + path + "'");
}

std::vector<Mat> load_weights(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "io", "cannot open '" + path + "'");
  std::string header_line;
  std::getline(f, header_line);
  const auto header = nlohmann::json::parse(header_line);
  std::vector<Mat> mats;
  for (const auto& d : header.at("dims")) {
    Mat m(d.at(0).get<std::size_t>(), d.at(1).get<std::size_t>());
    f.read(reinterpret_cast<char*>(m.data().data()),
           static_cast<std::streamsize>(m.data().size() * sizeof(double)));
    require(f.good(), "io", "truncated weight file '" + path + "'");
    mats.push_back(std::move(m));
  }
  return mats;
}

Mat init_node_features(const Vec& scores45, const EmbeddingTable& table) {
  const int n = Vocabulary::kVertices;
  require(static_cast<int>(scores45.size()) == n, "gen", "scores must have 45 entries");
  for (double s : scores45)
    require(s >= 0.0 && s <= 1.0, "gen", "score outside [0,1]");
  const int d = static_cast<int>(table.vectors.cols());
  Mat x(n, d + n);
  for (int v = 0; v < n; ++v) {
    std::memcpy(x.row(v), table.vectors.row(v), sizeof(double) * d);
    x(v, d + v) = scores45[v];
  }
  return x;
}

namespace {

void check_shapes(const Mat& x, const Mat& a_hat, const GenWeights& weights) {
  require(a_hat.rows() == a_hat.cols() && a_hat.rows() == x.rows(), "gen",
          "Ahat and X disagree on vertex count");
  std::size_t width = x.cols();
  for (std::size_t l = 0; l < weights.w.size(); ++l) {
    require(weights.w[l].rows() == width, "gen",
            "layer " + std::to_string(l) + " expects input width " +
                std::to_string(weights.w[l].rows()) + ", got " + std::to_string(width));
    width = weights.w[l].cols();
  }
}

Mat relu(Mat m) {
  for (auto& v : m.data())
    if (v < 0.0) v = 0.0;
  return m;
}

}  // namespace

ForwardCache propagate_cached(const Mat& x, const Mat& a_hat, const GenWeights& weights) {
  check_shapes(x, a_hat, weights);
  ForwardCache cache;
  cache.h.push_back(x);
  for (const Mat& w : weights.w)
    cache.h.push_back(relu(matmul(matmul(a_hat, cache.h.back()), w)));
  return cache;
}

Mat propagate(const Mat& x, const Mat& a_hat, const GenWeights& weights) {
  return propagate_cached(x, a_hat, weights).h.back();
}

Vec readout(const Mat& z, const Vec& scores45, ReadoutMode mode) {
  require(z.rows() == scores45.size(), "gen", "readout scores/Z mismatch");
  Vec weights(z.rows(), 1.0 / static_cast<double>(z.rows()));
  if (mode == ReadoutMode::kScoreWeighted) {
    double sum = 0.0;
    for (double s : scores45) sum += s;
    if (sum > 0.0)
      for (std::size_t v = 0; v < z.rows(); ++v) weights[v] = scores45[v] / sum;
    // all-zero scores fall back to uniform pooling
  }
  Vec out(z.cols(), 0.0);
  for (std::size_t v = 0; v < z.rows(); ++v) {
    const double* zv = z.row(v);
    for (std::size_t j = 0; j < z.cols(); ++j) out[j] += weights[v] * zv[j];
  }
  return out;
}

GenGradients backward(const ForwardCache& cache, const Mat& a_hat, const GenWeights& weights,
                      const Mat& upstream) {
  const std::size_t layers = weights.w.size();
  require(cache.h.size() == layers + 1, "gen", "forward cache does not match weights");
  require(upstream.rows() == cache.h.back().rows() && upstream.cols() == cache.h.back().cols(),
          "gen", "upstream gradient shape mismatch");

  GenGradients grads;
  grads.d_w.resize(layers);
  Mat d_h = upstream;
  for (std::size_t l = layers; l-- > 0;) {
    // d_pre = d_h (.) mask; relu output > 0 iff preactivation > 0.
    Mat d_pre = d_h;
    const Mat& out = cache.h[l + 1];
    for (std::size_t i = 0; i < d_pre.data().size(); ++i)
      if (out.data()[i] <= 0.0) d_pre.data()[i] = 0.0;
    const Mat ah = matmul(a_hat, cache.h[l]);
    grads.d_w[l] = matmul(ah.transposed(), d_pre);
    d_h = matmul(matmul(a_hat.transposed(), d_pre), weights.w[l].transposed());
  }
  grads.d_x = std::move(d_h);
  return grads;
}

}  // namespace savnav
