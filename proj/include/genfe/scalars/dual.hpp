#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <ostream>
#include <string>
#include <type_traits>

#include <boost/container/small_vector.hpp>

#include "genfe/error.hpp"
#include "genfe/scalars/pce.hpp"

namespace genfe {

/// Derivative arrays up to this width live inline; wider ones spill to the
/// heap. 16 covers a dense element Jacobian of 8 nodes x 2 equations.
inline constexpr std::size_t kInlineDerivativeWidth = 16;

/// Forward-mode dual number: a value plus an array of partial derivatives.
///
/// The derivative width is a run-time property. A width of zero marks a
/// constant (all partials zero) and combines with any width; combining two
/// different nonzero widths is an error.
///
/// V is the value type: double for first-order AD, Pce for derivatives of
/// stochastic Galerkin expansions.
template <class V>
class DualNumber {
 public:
  using value_type = V;
  using Partials = boost::container::small_vector<V, kInlineDerivativeWidth>;

  DualNumber() : val_(0.0) {}

  DualNumber(const V& v) : val_(v) {}  // NOLINT: constants promote implicitly

  template <class T>
    requires(std::is_arithmetic_v<T> && !std::is_same_v<T, V>)
  DualNumber(T c) : val_(static_cast<double>(c)) {}  // NOLINT

  /// Value with `width` zero partials.
  DualNumber(const V& v, std::size_t width) : val_(v), dx_(width, V(0.0)) {}

  /// Independent variable: partial `index` of `width` set to one.
  static DualNumber seeded(const V& v, std::size_t width, std::size_t index) {
    DualNumber d(v, width);
    d.dx_.at(index) = V(1.0);
    return d;
  }

  const V& val() const { return val_; }
  V& val() { return val_; }

  std::size_t size() const { return dx_.size(); }
  bool isConstant() const { return dx_.empty(); }

  /// Partial i, reading zero for a constant.
  V dx(std::size_t i) const { return dx_.empty() ? V(0.0) : dx_[i]; }

  V& fastAccessDx(std::size_t i) { return dx_[i]; }
  const V& fastAccessDx(std::size_t i) const { return dx_[i]; }

  const Partials& partials() const { return dx_; }

  void resize(std::size_t width) { dx_.resize(width, V(0.0)); }

  DualNumber operator-() const {
    DualNumber r(-val_);
    r.dx_.resize(dx_.size());
    for (std::size_t i = 0; i < dx_.size(); ++i) r.dx_[i] = -dx_[i];
    return r;
  }
  DualNumber operator+() const { return *this; }

  DualNumber& operator+=(const DualNumber& b) { return *this = *this + b; }
  DualNumber& operator-=(const DualNumber& b) { return *this = *this - b; }
  DualNumber& operator*=(const DualNumber& b) { return *this = *this * b; }
  DualNumber& operator/=(const DualNumber& b) { return *this = *this / b; }

  friend DualNumber operator+(const DualNumber& a, const DualNumber& b) {
    const std::size_t n = commonWidth(a.size(), b.size());
    DualNumber r(a.val_ + b.val_);
    r.dx_.resize(n);
    if (a.size() && b.size()) {
      for (std::size_t i = 0; i < n; ++i) r.dx_[i] = a.dx_[i] + b.dx_[i];
    } else if (a.size()) {
      for (std::size_t i = 0; i < n; ++i) r.dx_[i] = a.dx_[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) r.dx_[i] = b.dx_[i];
    }
    return r;
  }

  friend DualNumber operator-(const DualNumber& a, const DualNumber& b) {
    const std::size_t n = commonWidth(a.size(), b.size());
    DualNumber r(a.val_ - b.val_);
    r.dx_.resize(n);
    if (a.size() && b.size()) {
      for (std::size_t i = 0; i < n; ++i) r.dx_[i] = a.dx_[i] - b.dx_[i];
    } else if (a.size()) {
      for (std::size_t i = 0; i < n; ++i) r.dx_[i] = a.dx_[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) r.dx_[i] = -b.dx_[i];
    }
    return r;
  }

  friend DualNumber operator*(const DualNumber& a, const DualNumber& b) {
    const std::size_t n = commonWidth(a.size(), b.size());
    DualNumber r(a.val_ * b.val_);
    r.dx_.resize(n);
    if (a.size() && b.size()) {
      for (std::size_t i = 0; i < n; ++i) r.dx_[i] = a.dx_[i] * b.val_ + a.val_ * b.dx_[i];
    } else if (a.size()) {
      for (std::size_t i = 0; i < n; ++i) r.dx_[i] = a.dx_[i] * b.val_;
    } else {
      for (std::size_t i = 0; i < n; ++i) r.dx_[i] = a.val_ * b.dx_[i];
    }
    return r;
  }

  /// Quotient q = a / b with partials (a' - q b') / b.
  friend DualNumber operator/(const DualNumber& a, const DualNumber& b) {
    const std::size_t n = commonWidth(a.size(), b.size());
    if (isZero(b.val_)) throw DomainError("dual division by a zero value");
    DualNumber r(a.val_ / b.val_);
    r.dx_.resize(n);
    if (a.size() && b.size()) {
      for (std::size_t i = 0; i < n; ++i) r.dx_[i] = (a.dx_[i] - r.val_ * b.dx_[i]) / b.val_;
    } else if (a.size()) {
      for (std::size_t i = 0; i < n; ++i) r.dx_[i] = a.dx_[i] / b.val_;
    } else {
      for (std::size_t i = 0; i < n; ++i) r.dx_[i] = -(r.val_ * b.dx_[i]) / b.val_;
    }
    return r;
  }

 private:
  static std::size_t commonWidth(std::size_t a, std::size_t b) {
    if (a == 0) return b;
    if (b == 0 || a == b) return a;
    throw UsageError("derivative dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }

  static bool isZero(const V& v) {
    if constexpr (std::is_same_v<V, double>)
      return v == 0.0;
    else
      return v.size() == 1 && v.mean() == 0.0;
  }

  V val_;
  Partials dx_;
};

using Dual = DualNumber<double>;
using NestedDual = DualNumber<Pce>;

// Mixed operations with passive operands (the value type or plain reals).
template <class V, class T>
concept PassiveFor = std::is_arithmetic_v<T> || std::same_as<T, V>;

template <class V, class T>
  requires PassiveFor<V, T>
DualNumber<V> operator+(const DualNumber<V>& a, const T& b) { return a + DualNumber<V>(b); }
template <class V, class T>
  requires PassiveFor<V, T>
DualNumber<V> operator+(const T& a, const DualNumber<V>& b) { return DualNumber<V>(a) + b; }
template <class V, class T>
  requires PassiveFor<V, T>
DualNumber<V> operator-(const DualNumber<V>& a, const T& b) { return a - DualNumber<V>(b); }
template <class V, class T>
  requires PassiveFor<V, T>
DualNumber<V> operator-(const T& a, const DualNumber<V>& b) { return DualNumber<V>(a) - b; }
template <class V, class T>
  requires PassiveFor<V, T>
DualNumber<V> operator*(const DualNumber<V>& a, const T& b) { return a * DualNumber<V>(b); }
template <class V, class T>
  requires PassiveFor<V, T>
DualNumber<V> operator*(const T& a, const DualNumber<V>& b) { return DualNumber<V>(a) * b; }
template <class V, class T>
  requires PassiveFor<V, T>
DualNumber<V> operator/(const DualNumber<V>& a, const T& b) { return a / DualNumber<V>(b); }
template <class V, class T>
  requires PassiveFor<V, T>
DualNumber<V> operator/(const T& a, const DualNumber<V>& b) { return DualNumber<V>(a) / b; }

template <class V, class T>
  requires PassiveFor<V, T>
DualNumber<V>& operator+=(DualNumber<V>& a, const T& b) { return a += DualNumber<V>(b); }
template <class V, class T>
  requires PassiveFor<V, T>
DualNumber<V>& operator-=(DualNumber<V>& a, const T& b) { return a -= DualNumber<V>(b); }
template <class V, class T>
  requires PassiveFor<V, T>
DualNumber<V>& operator*=(DualNumber<V>& a, const T& b) { return a *= DualNumber<V>(b); }
template <class V, class T>
  requires PassiveFor<V, T>
DualNumber<V>& operator/=(DualNumber<V>& a, const T& b) { return a /= DualNumber<V>(b); }

// Pce with plain reals.
template <class T>
  requires std::is_arithmetic_v<T>
Pce operator+(const Pce& a, T b) { return a + Pce(static_cast<double>(b)); }
template <class T>
  requires std::is_arithmetic_v<T>
Pce operator+(T a, const Pce& b) { return Pce(static_cast<double>(a)) + b; }
template <class T>
  requires std::is_arithmetic_v<T>
Pce operator-(const Pce& a, T b) { return a - Pce(static_cast<double>(b)); }
template <class T>
  requires std::is_arithmetic_v<T>
Pce operator-(T a, const Pce& b) { return Pce(static_cast<double>(a)) - b; }
template <class T>
  requires std::is_arithmetic_v<T>
Pce operator*(const Pce& a, T b) { return a * Pce(static_cast<double>(b)); }
template <class T>
  requires std::is_arithmetic_v<T>
Pce operator*(T a, const Pce& b) { return Pce(static_cast<double>(a)) * b; }
template <class T>
  requires std::is_arithmetic_v<T>
Pce operator/(const Pce& a, T b) { return a / Pce(static_cast<double>(b)); }
template <class T>
  requires std::is_arithmetic_v<T>
Pce operator/(T a, const Pce& b) { return Pce(static_cast<double>(a)) / b; }

/// Mean / value component as a plain real.
inline double scalarValue(double x) { return x; }
inline double scalarValue(const Pce& x) { return x.mean(); }
template <class V>
double scalarValue(const DualNumber<V>& x) {
  return scalarValue(x.val());
}

/// Explicit removal of derivative information; never implicit.
template <class V>
V stripDerivatives(const DualNumber<V>& x) {
  return x.val();
}
inline double stripDerivatives(double x) { return x; }
inline const Pce& stripDerivatives(const Pce& x) { return x; }

// Comparisons use the value (mean) only.
template <class V>
bool operator<(const DualNumber<V>& a, const DualNumber<V>& b) { return scalarValue(a) < scalarValue(b); }
template <class V>
bool operator>(const DualNumber<V>& a, const DualNumber<V>& b) { return scalarValue(a) > scalarValue(b); }
template <class V>
bool operator<=(const DualNumber<V>& a, const DualNumber<V>& b) { return scalarValue(a) <= scalarValue(b); }
template <class V>
bool operator>=(const DualNumber<V>& a, const DualNumber<V>& b) { return scalarValue(a) >= scalarValue(b); }
template <class V>
bool operator==(const DualNumber<V>& a, const DualNumber<V>& b) { return scalarValue(a) == scalarValue(b); }
template <class V>
bool operator!=(const DualNumber<V>& a, const DualNumber<V>& b) { return scalarValue(a) != scalarValue(b); }
template <class V>
bool operator<(const DualNumber<V>& a, double b) { return scalarValue(a) < b; }
template <class V>
bool operator>(const DualNumber<V>& a, double b) { return scalarValue(a) > b; }
template <class V>
bool operator<=(const DualNumber<V>& a, double b) { return scalarValue(a) <= b; }
template <class V>
bool operator>=(const DualNumber<V>& a, double b) { return scalarValue(a) >= b; }

// Elementary functions. Each partial is scaled by f'(value).
template <class V>
DualNumber<V> exp(const DualNumber<V>& a) {
  using std::exp;
  const V e = exp(a.val());
  DualNumber<V> r(e, a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r.fastAccessDx(i) = e * a.fastAccessDx(i);
  return r;
}

template <class V>
DualNumber<V> sin(const DualNumber<V>& a) {
  using std::cos;
  using std::sin;
  const V c = cos(a.val());
  DualNumber<V> r(sin(a.val()), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r.fastAccessDx(i) = c * a.fastAccessDx(i);
  return r;
}

template <class V>
DualNumber<V> cos(const DualNumber<V>& a) {
  using std::cos;
  using std::sin;
  const V s = sin(a.val());
  DualNumber<V> r(cos(a.val()), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r.fastAccessDx(i) = -(s * a.fastAccessDx(i));
  return r;
}

template <class V>
DualNumber<V> log(const DualNumber<V>& a) {
  using std::log;
  if (!(scalarValue(a) > 0.0)) throw DomainError("log of non-positive value " + std::to_string(scalarValue(a)));
  DualNumber<V> r(log(a.val()), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r.fastAccessDx(i) = a.fastAccessDx(i) / a.val();
  return r;
}

template <class V>
DualNumber<V> sqrt(const DualNumber<V>& a) {
  using std::sqrt;
  const double v = scalarValue(a);
  if (v < 0.0) throw DomainError("sqrt of negative value " + std::to_string(v));
  if (v == 0.0 && !a.isConstant()) throw DomainError("sqrt is not differentiable at zero");
  const V s = sqrt(a.val());
  DualNumber<V> r(s, a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r.fastAccessDx(i) = a.fastAccessDx(i) / (2.0 * s);
  return r;
}

/// a^e for a real exponent.
template <class V>
DualNumber<V> pow(const DualNumber<V>& a, double e) {
  using std::pow;
  const V p = pow(a.val(), e);
  DualNumber<V> r(p, a.size());
  if (a.size() == 0) return r;
  const V slope = e * pow(a.val(), e - 1.0);
  for (std::size_t i = 0; i < a.size(); ++i) r.fastAccessDx(i) = slope * a.fastAccessDx(i);
  return r;
}

/// a^b = exp(b log a); requires a > 0 whenever b carries derivatives.
template <class V>
DualNumber<V> pow(const DualNumber<V>& a, const DualNumber<V>& b) {
  using std::log, std::pow;
  if (b.isConstant()) return pow(a, scalarValue(b.val()));
  if (!(scalarValue(a) > 0.0)) throw DomainError("pow with a differentiated exponent needs a positive base");
  const std::size_t n = a.isConstant() ? b.size() : a.size();
  if (!a.isConstant() && a.size() != b.size()) throw UsageError("derivative dimension mismatch in pow");
  const V p = pow(a.val(), b.val());
  const V dBase = b.val() * pow(a.val(), b.val() - 1.0);
  const V dExp = p * log(a.val());
  DualNumber<V> r(p, n);
  for (std::size_t i = 0; i < n; ++i) r.fastAccessDx(i) = dBase * a.dx(i) + dExp * b.fastAccessDx(i);
  return r;
}

template <class V>
DualNumber<V> pow(double a, const DualNumber<V>& b) {
  return pow(DualNumber<V>(a), b);
}

template <class V>
std::ostream& operator<<(std::ostream& os, const DualNumber<V>& a) {
  os << "[" << scalarValue(a) << " |";
  for (std::size_t i = 0; i < a.size(); ++i) os << " " << scalarValue(a.fastAccessDx(i));
  return os << "]";
}

}  // namespace genfe
