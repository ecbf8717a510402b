#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/container/small_vector.hpp>

#include "genfe/error.hpp"
#include "genfe/quadrature.hpp"

namespace genfe {

/// Legendre chaos basis of degree P for one uniform random variable on
/// [-1, 1] with density 1/2. Polynomials are unnormalized (P_k(1) = 1), so
/// E[P_k^2] = 1 / (2k + 1) and E[P_0^2] = 1.
///
/// Triple products C_ijk = E[P_i P_j P_k] are tabulated by a Gauss-Legendre
/// rule exact for degree 3P; entries that vanish by parity or by the
/// triangle rule are stored as exact zeros.
class BasisData {
 public:
  /// One nonzero term of the Galerkin product for output coefficient k:
  /// c_k += a_i * b_j * weight, where weight = C_ijk / E[P_k^2].
  struct ProductTerm {
    std::size_t i;
    std::size_t j;
    double weight;
  };

  explicit BasisData(std::size_t degree) : degree_(degree) {
    const std::size_t n = size();
    const std::size_t points = std::max<std::size_t>(1, (3 * degree + 2) / 2);
    rule_ = gaussLegendre(points);

    norms_.resize(n);
    for (std::size_t k = 0; k < n; ++k) norms_[k] = 1.0 / (2.0 * k + 1.0);

    std::vector<std::vector<double>> poly(rule_.nodes.size(), std::vector<double>(n));
    for (std::size_t q = 0; q < rule_.nodes.size(); ++q)
      for (std::size_t k = 0; k < n; ++k) poly[q][k] = legendre(k, rule_.nodes[q]);

    triple_.assign(n * n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          if (vanishes(i, j, k)) continue;
          double sum = 0.0;
          if (i == 0 || j == 0 || k == 0) {
            // E[P_0 P_m P_m] = norms[m] exactly
            sum = norms_[i == 0 ? j : i];
          } else {
            for (std::size_t q = 0; q < rule_.nodes.size(); ++q)
              sum += 0.5 * rule_.weights[q] * poly[q][i] * poly[q][j] * poly[q][k];
          }
          triple_[(i * n + j) * n + k] = sum;
        }
      }
    }
    // symmetrize so that every permutation reads the same bits
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        for (std::size_t k = j; k < n; ++k) {
          const double v = triple_[(i * n + j) * n + k];
          for (auto [a, b, c] : {std::array{i, j, k}, std::array{i, k, j}, std::array{j, i, k},
                                 std::array{j, k, i}, std::array{k, i, j}, std::array{k, j, i}})
            triple_[(a * n + b) * n + c] = v;
        }

    terms_.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double c = triple_[(i * n + j) * n + k];
          if (c != 0.0) terms_[k].push_back({i, j, c / norms_[k]});
        }
  }

  std::size_t degree() const { return degree_; }
  std::size_t size() const { return degree_ + 1; }
  double norm(std::size_t k) const { return norms_.at(k); }
  const std::vector<double>& norms() const { return norms_; }

  double tripleProduct(std::size_t i, std::size_t j, std::size_t k) const {
    const std::size_t n = size();
    if (i >= n || j >= n || k >= n) throw UsageError("tripleProduct: index exceeds basis degree");
    return triple_[(i * n + j) * n + k];
  }

  const std::vector<ProductTerm>& productTerms(std::size_t k) const { return terms_[k]; }
  const GaussLegendreRule& quadrature() const { return rule_; }

  /// True when C_ijk is identically zero: odd total degree, or one index
  /// exceeding the sum of the other two.
  static bool vanishes(std::size_t i, std::size_t j, std::size_t k) {
    return (i + j + k) % 2 == 1 || i > j + k || j > i + k || k > i + j;
  }

 private:
  std::size_t degree_;
  GaussLegendreRule rule_;
  std::vector<double> norms_;
  std::vector<double> triple_;
  std::vector<std::vector<ProductTerm>> terms_;
};

inline std::shared_ptr<const BasisData> buildBasisData(std::size_t degree) {
  return std::make_shared<const BasisData>(degree);
}

/// Polynomial chaos expansion sum_k c_k P_k(xi).
///
/// A Pce without a basis is a deterministic constant holding one
/// coefficient. Expansions with a basis hold exactly P + 1 coefficients and
/// reference (not own) their BasisData, which must outlive them.
class Pce {
 public:
  using Coefficients = boost::container::small_vector<double, 8>;

  Pce() : coeffs_{0.0} {}
  Pce(double c) : coeffs_{c} {}  // NOLINT: implicit promotion from real

  Pce(const BasisData& basis, std::span<const double> coeffs) : basis_(&basis), coeffs_(basis.size(), 0.0) {
    if (coeffs.size() > basis.size()) throw UsageError("Pce: more coefficients than the basis holds");
    std::copy(coeffs.begin(), coeffs.end(), coeffs_.begin());
  }

  Pce(const BasisData& basis, std::initializer_list<double> coeffs)
      : Pce(basis, std::span<const double>(coeffs.begin(), coeffs.size())) {}

  static Pce zero(const BasisData& basis) { return Pce(basis, std::span<const double>{}); }

  const BasisData* basis() const { return basis_; }
  std::size_t size() const { return coeffs_.size(); }
  double mean() const { return coeffs_[0]; }
  double coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }
  double& coeffRef(std::size_t k) { return coeffs_.at(k); }
  const Coefficients& coefficients() const { return coeffs_; }

  /// True when every coefficient above the mean is exactly zero.
  bool deterministic() const {
    return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](double c) { return c == 0.0; });
  }

  /// Variance under the uniform measure: sum_{k>=1} c_k^2 E[P_k^2].
  double variance() const {
    if (!basis_) return 0.0;
    double v = 0.0;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) v += coeffs_[k] * coeffs_[k] * basis_->norm(k);
    return v;
  }

  /// sum_k c_k P_k(xi) by the three-term recurrence. |xi| <= 1 is the
  /// caller's responsibility.
  double evaluate(double xi) const {
    double sum = coeffs_[0];
    double pm1 = 1.0;
    double p = xi;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
      sum += coeffs_[k] * p;
      const double next = ((2.0 * k + 1.0) * xi * p - k * pm1) / (k + 1.0);
      pm1 = p;
      p = next;
    }
    return sum;
  }

  Pce operator-() const {
    Pce r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  Pce& operator+=(const Pce& b) { return *this = *this + b; }
  Pce& operator-=(const Pce& b) { return *this = *this - b; }
  Pce& operator*=(const Pce& b) { return *this = *this * b; }
  Pce& operator/=(const Pce& b) { return *this = *this / b; }

  friend Pce operator+(const Pce& a, const Pce& b) {
    Pce r = shaped(a, b);
    for (std::size_t k = 0; k < r.size(); ++k) r.coeffs_[k] = a.coeff(k) + b.coeff(k);
    return r;
  }

  friend Pce operator-(const Pce& a, const Pce& b) {
    Pce r = shaped(a, b);
    for (std::size_t k = 0; k < r.size(); ++k) r.coeffs_[k] = a.coeff(k) - b.coeff(k);
    return r;
  }

  /// Galerkin product truncated to degree P.
  friend Pce operator*(const Pce& a, const Pce& b) {
    if (a.size() == 1 || b.size() == 1) {
      const Pce& scalar = a.size() == 1 ? a : b;
      const Pce& other = a.size() == 1 ? b : a;
      Pce r = other;
      for (auto& c : r.coeffs_) c = c * scalar.coeffs_[0];
      if (!r.basis_) r.basis_ = scalar.basis_;
      return r;
    }
    Pce r = shaped(a, b);
    const BasisData& basis = *r.basis_;
    for (std::size_t k = 0; k < r.size(); ++k) {
      double sum = 0.0;
      for (const auto& t : basis.productTerms(k)) sum += a.coeffs_[t.i] * b.coeffs_[t.j] * t.weight;
      r.coeffs_[k] = sum;
    }
    return r;
  }

  /// Galerkin quotient: solves sum_j M_kj x_j = a_k with
  /// M_kj = sum_i b_i C_ijk / E[P_k^2].
  friend Pce operator/(const Pce& a, const Pce& b) {
    if (b.size() == 1 || b.deterministic()) {
      if (b.coeffs_[0] == 0.0) throw DomainError("Pce division by zero");
      Pce r = a;
      for (auto& c : r.coeffs_) c = c / b.coeffs_[0];
      if (r.size() == 1 && b.size() > 1) r = shaped(a, b) + r;
      return r;
    }
    const Pce shape = shaped(a, b);
    const BasisData& basis = *shape.basis_;
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < basis.size(); ++k)
      for (const auto& t : basis.productTerms(k)) m(k, t.j) += b.coeffs_[t.i] * t.weight;
    Eigen::VectorXd rhs(n);
    for (Eigen::Index k = 0; k < n; ++k) rhs(k) = a.coeff(k);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14)) {
      std::ostringstream os;
      os << "singular spectral divisor (reciprocal condition estimate " << rcond << ")";
      throw DomainError(os.str());
    }
    const Eigen::VectorXd x = lu.solve(rhs);
    Pce r = shape;
    for (Eigen::Index k = 0; k < n; ++k) r.coeffs_[k] = x(k);
    return r;
  }

  // Comparisons look at the mean only.
  friend bool operator<(const Pce& a, const Pce& b) { return a.mean() < b.mean(); }
  friend bool operator>(const Pce& a, const Pce& b) { return a.mean() > b.mean(); }
  friend bool operator<=(const Pce& a, const Pce& b) { return a.mean() <= b.mean(); }
  friend bool operator>=(const Pce& a, const Pce& b) { return a.mean() >= b.mean(); }
  friend bool operator==(const Pce& a, const Pce& b) { return a.mean() == b.mean(); }
  friend bool operator!=(const Pce& a, const Pce& b) { return a.mean() != b.mean(); }

 private:
  // Zero expansion on the common basis of a and b.
  static Pce shaped(const Pce& a, const Pce& b) {
    const BasisData* basis = a.basis_ ? a.basis_ : b.basis_;
    if (a.basis_ && b.basis_ && a.basis_ != b.basis_) throw UsageError("Pce operands use different BasisData");
    Pce r;
    r.basis_ = basis;
    r.coeffs_.assign(basis ? basis->size() : 1, 0.0);
    return r;
  }

  const BasisData* basis_ = nullptr;
  Coefficients coeffs_;
};

inline double pceEvaluate(const Pce& a, double xi) { return a.evaluate(xi); }

}  // namespace genfe
