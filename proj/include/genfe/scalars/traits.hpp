#pragma once

#include <type_traits>

#include "genfe/scalars/dual.hpp"
#include "genfe/scalars/pce.hpp"

namespace genfe {

/// Result type of arithmetic between two scalar kinds.
template <class A, class B>
struct Promote;

template <class A>
struct Promote<A, A> {
  using type = A;
};
template <class A>
  requires(!std::is_same_v<A, double>)
struct Promote<A, double> {
  using type = A;
};
template <class B>
  requires(!std::is_same_v<B, double>)
struct Promote<double, B> {
  using type = B;
};
template <>
struct Promote<Pce, NestedDual> {
  using type = NestedDual;
};
template <>
struct Promote<NestedDual, Pce> {
  using type = NestedDual;
};

template <class A, class B>
using promote_t = typename Promote<A, B>::type;

template <class S>
inline constexpr bool is_dual_v = false;
template <class V>
inline constexpr bool is_dual_v<DualNumber<V>> = true;

/// Scalar of type S with the given real value and no embedded information.
template <class S>
S constantScalar(double c) {
  return S(c);
}

}  // namespace genfe
