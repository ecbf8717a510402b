#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "genfe/error.hpp"
#include "genfe/fields/layout.hpp"

namespace genfe {

/// Dense multidimensional array of scalars S with a name and a layout.
template <class S>
class Field {
 public:
  using scalar_type = S;

  Field() = default;
  Field(std::string name, Layout layout) : name_(std::move(name)), layout_(std::move(layout)) {
    data_.resize(layout_.size());
    strides_.resize(layout_.rank());
    std::size_t stride = 1;
    for (std::size_t i = layout_.rank(); i-- > 0;) {
      strides_[i] = stride;
      stride *= layout_.extent(i);
    }
  }

  const std::string& name() const { return name_; }
  const Layout& layout() const { return layout_; }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t i) const { return layout_.extent(i); }

  std::span<S> data() { return data_; }
  std::span<const S> data() const { return data_; }

  S& operator[](std::size_t linear) { return data_[linear]; }
  const S& operator[](std::size_t linear) const { return data_[linear]; }

  template <class... I>
  S& operator()(I... index) {
    return data_[linearize(index...)];
  }
  template <class... I>
  const S& operator()(I... index) const {
    return data_[linearize(index...)];
  }

 private:
  template <class... I>
  std::size_t linearize(I... index) const {
    const std::array<std::size_t, sizeof...(I)> idx{static_cast<std::size_t>(index)...};
#ifndef NDEBUG
    if (idx.size() != layout_.rank()) throw UsageError("field '" + name_ + "': rank mismatch");
    for (std::size_t i = 0; i < idx.size(); ++i)
      if (idx[i] >= layout_.extent(i)) throw UsageError("field '" + name_ + "': index out of bounds");
#endif
    std::size_t linear = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) linear += idx[i] * strides_[i];
    return linear;
  }

  std::string name_;
  Layout layout_;
  std::vector<std::size_t> strides_;
  std::vector<S> data_;
};

/// Sets every entry to the constant c with no embedded information.
template <class S>
void fillConstant(Field<S>& f, double c) {
  for (auto& v : f.data()) v = S(c);
}

}  // namespace genfe
