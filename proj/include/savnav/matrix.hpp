#pragma once
// Small dense row-major matrix. Everything in this project is at most a few
// hundred square, so plain loops are plenty.

#include <cstddef>
#include <string>
#include <vector>

#include "savnav/error.hpp"

namespace savnav {

using Vec = std::vector<double>;

class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  Vec& data() { return data_; }
  const Vec& data() const { return data_; }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  Mat transposed() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vec data_;
};

inline Mat matmul(const Mat& a, const Mat& b) {
  require(a.cols() == b.rows(), "shape",
          "matmul " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " * " +
              std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// y = M^T x for a row vector x of length M.rows(); returns length M.cols().
inline Vec vec_mat(const Vec& x, const Mat& m) {
  require(x.size() == m.rows(), "shape", "vec_mat length mismatch");
  Vec y(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* mi = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) y[j] += xi * mi[j];
  }
  return y;
}

}  // namespace savnav
