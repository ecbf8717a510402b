#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "genfe/assembly/dof_map.hpp"
#include "genfe/assembly/linear_algebra.hpp"
#include "genfe/discretization/mesh.hpp"
#include "genfe/scalars/pce.hpp"

namespace genfe {

/// Destination of element contributions extracted by the scatter evaluators.
class ScatterSink {
 public:
  virtual ~ScatterSink() = default;
  virtual void residual(std::size_t row, double v) = 0;
  virtual void jacobian(std::size_t row, std::size_t col, double v) = 0;
  virtual void tangent(std::size_t row, std::size_t col, double v) = 0;
  virtual void sgResidual(std::size_t term, std::size_t row, double v) = 0;
  virtual void sgJacobian(std::size_t term, std::size_t row, std::size_t col, double v) = 0;
};

/// Global objects filled by one assembly. Null members are not assembled.
struct AssemblyOutputs {
  std::vector<double>* f = nullptr;
  CsrMatrix* jacobian = nullptr;
  MultiVector* dfdp = nullptr;
  SGVector* sgF = nullptr;
  std::vector<CsrMatrix>* sgJ = nullptr;
};

/// Adds contributions straight into the global objects.
class DirectSink final : public ScatterSink {
 public:
  explicit DirectSink(AssemblyOutputs out) : out_(out) {}
  void residual(std::size_t row, double v) override {
    if (out_.f) (*out_.f)[row] += v;
  }
  void jacobian(std::size_t row, std::size_t col, double v) override {
    if (out_.jacobian) out_.jacobian->add(row, col, v);
  }
  void tangent(std::size_t row, std::size_t col, double v) override {
    if (out_.dfdp) (*out_.dfdp)(row, col) += v;
  }
  void sgResidual(std::size_t term, std::size_t row, double v) override {
    if (out_.sgF) (*out_.sgF)[term][row] += v;
  }
  void sgJacobian(std::size_t term, std::size_t row, std::size_t col, double v) override {
    if (out_.sgJ) (*out_.sgJ)[term].add(row, col, v);
  }

 private:
  AssemblyOutputs out_;
};

/// Records contributions so that worksets run on different threads can be
/// replayed in workset order, reproducing the serial summation exactly.
class RecordingSink final : public ScatterSink {
 public:
  void residual(std::size_t row, double v) override { ops_.push_back({Kind::F, 0, row, 0, v}); }
  void jacobian(std::size_t row, std::size_t col, double v) override { ops_.push_back({Kind::J, 0, row, col, v}); }
  void tangent(std::size_t row, std::size_t col, double v) override { ops_.push_back({Kind::T, 0, row, col, v}); }
  void sgResidual(std::size_t term, std::size_t row, double v) override {
    ops_.push_back({Kind::SGF, static_cast<std::uint32_t>(term), row, 0, v});
  }
  void sgJacobian(std::size_t term, std::size_t row, std::size_t col, double v) override {
    ops_.push_back({Kind::SGJ, static_cast<std::uint32_t>(term), row, col, v});
  }

  void replay(ScatterSink& target) const {
    for (const auto& op : ops_) {
      switch (op.kind) {
        case Kind::F: target.residual(op.row, op.v); break;
        case Kind::J: target.jacobian(op.row, op.col, op.v); break;
        case Kind::T: target.tangent(op.row, op.col, op.v); break;
        case Kind::SGF: target.sgResidual(op.term, op.row, op.v); break;
        case Kind::SGJ: target.sgJacobian(op.term, op.row, op.col, op.v); break;
      }
    }
  }
  void clear() { ops_.clear(); }

 private:
  enum class Kind : std::uint8_t { F, J, T, SGF, SGJ };
  struct Op {
    Kind kind;
    std::uint32_t term;
    std::size_t row;
    std::size_t col;
    double v;
  };
  std::vector<Op> ops_;
};

/// Global state visible to the gather and scatter evaluators of one workset.
struct AssemblyContext {
  const Mesh* mesh = nullptr;
  const DofMap* dofs = nullptr;
  std::span<const double> x;
  const SGVector* sgX = nullptr;
  const BasisData* sgBasis = nullptr;
  // rows node * 2 + d, one column per shape parameter
  const MultiVector* coordSensitivity = nullptr;
  // Tangent: leading columns belong to model parameters, then one per direction
  const MultiVector* directions = nullptr;
  std::size_t tangentParams = 0;
  ScatterSink* sink = nullptr;

  std::size_t tangentWidth() const { return tangentParams + (directions ? directions->cols() : 0); }
};

}  // namespace genfe
