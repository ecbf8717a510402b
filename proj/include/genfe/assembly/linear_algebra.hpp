#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genfe/error.hpp"

namespace genfe {

/// Compressed sparse row matrix with a fixed, sorted pattern.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> rowPtr, std::vector<std::size_t> colIdx)
      : rows_(rows), cols_(cols), rowPtr_(std::move(rowPtr)), colIdx_(std::move(colIdx)), values_(colIdx_.size(), 0.0) {
    if (rowPtr_.size() != rows_ + 1 || rowPtr_.back() != colIdx_.size()) throw UsageError("CsrMatrix: bad row pointer");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return colIdx_.size(); }
  const std::vector<std::size_t>& rowPtr() const { return rowPtr_; }
  const std::vector<std::size_t>& colIdx() const { return colIdx_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  void setZero() { std::fill(values_.begin(), values_.end(), 0.0); }

  /// Position of (r,c) in the value array; throws when outside the pattern.
  std::size_t find(std::size_t r, std::size_t c) const {
    const auto first = colIdx_.begin() + static_cast<std::ptrdiff_t>(rowPtr_[r]);
    const auto last = colIdx_.begin() + static_cast<std::ptrdiff_t>(rowPtr_[r + 1]);
    const auto it = std::lower_bound(first, last, c);
    if (it == last || *it != c)
      throw UsageError("sparse pattern has no entry (" + std::to_string(r) + "," + std::to_string(c) + ")");
    return static_cast<std::size_t>(it - colIdx_.begin());
  }

  void add(std::size_t r, std::size_t c, double v) { values_[find(r, c)] += v; }
  double at(std::size_t r, std::size_t c) const {
    const auto first = colIdx_.begin() + static_cast<std::ptrdiff_t>(rowPtr_[r]);
    const auto last = colIdx_.begin() + static_cast<std::ptrdiff_t>(rowPtr_[r + 1]);
    const auto it = std::lower_bound(first, last, c);
    return (it == last || *it != c) ? 0.0 : values_[static_cast<std::size_t>(it - colIdx_.begin())];
  }

  /// Replaces row r by the unit row e_r (scale 1) or zeros it (scale 0).
  void setRowToIdentity(std::size_t r, double diagonal = 1.0) {
    for (std::size_t k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k) values_[k] = colIdx_[k] == r ? diagonal : 0.0;
  }

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (std::size_t k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k) s += values_[k] * x[colIdx_[k]];
      y[r] = s;
    }
  }

  /// y += alpha A x
  void multiplyAdd(double alpha, std::span<const double> x, std::span<double> y) const {
    for (std::size_t r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (std::size_t k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k) s += values_[k] * x[colIdx_[k]];
      y[r] += alpha * s;
    }
  }

  /// y = A^T x
  void multiplyTranspose(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k) y[colIdx_[k]] += values_[k] * x[r];
  }

  Eigen::MatrixXd toDense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k)
        d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(colIdx_[k])) += values_[k];
    return d;
  }

  bool samePattern(const CsrMatrix& o) const { return rowPtr_ == o.rowPtr_ && colIdx_ == o.colIdx_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> rowPtr_{0};
  std::vector<std::size_t> colIdx_;
  std::vector<double> values_;
};

/// Dense column-major block of vectors.
class MultiVector {
 public:
  MultiVector() = default;
  MultiVector(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }
  std::span<double> col(std::size_t c) { return {data_.data() + c * rows_, rows_}; }
  std::span<const double> col(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }
  void setZero() { std::fill(data_.begin(), data_.end(), 0.0); }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Stochastic Galerkin block vector: one coefficient vector per basis term.
struct SGVector {
  std::vector<std::vector<double>> blocks;

  SGVector() = default;
  SGVector(std::size_t terms, std::size_t n) : blocks(terms, std::vector<double>(n, 0.0)) {}
  std::size_t terms() const { return blocks.size(); }
  std::size_t size() const { return blocks.empty() ? 0 : blocks.front().size(); }
  std::vector<double>& operator[](std::size_t k) { return blocks[k]; }
  const std::vector<double>& operator[](std::size_t k) const { return blocks[k]; }
  void setZero() {
    for (auto& b : blocks) std::fill(b.begin(), b.end(), 0.0);
  }
};

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const SGVector& v) {
  double s = 0.0;
  for (const auto& b : v.blocks)
    for (double x : b) s += x * x;
  return std::sqrt(s);
}

/// MatrixMarket coordinate real general.
inline void writeMatrixMarket(std::ostream& os, const CsrMatrix& a) {
  os.precision(17);
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << " " << a.cols() << " " << a.nonzeros() << "\n";
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = a.rowPtr()[r]; k < a.rowPtr()[r + 1]; ++k)
      os << r + 1 << " " << a.colIdx()[k] + 1 << " " << a.values()[k] << "\n";
}

/// MatrixMarket array real general (a column vector).
inline void writeMatrixMarket(std::ostream& os, std::span<const double> v) {
  os.precision(17);
  os << "%%MatrixMarket matrix array real general\n" << v.size() << " 1\n";
  for (double x : v) os << x << "\n";
}

}  // namespace genfe
