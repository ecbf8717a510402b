#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "genfe/assembly/context.hpp"
#include "genfe/assembly/dof_map.hpp"
#include "genfe/error.hpp"
#include "genfe/graph/registry.hpp"

namespace genfe {

struct AssemblerOptions {
  std::size_t worksetSize = 64;
  std::size_t threads = 1;
};

/// Runs gather, compute and scatter over all worksets of a mesh topology.
///
/// Every worker thread owns its own graph set (built by the factory) and so
/// its own field arenas. With more than one worker the scatter is recorded
/// per workset and replayed in workset order, so the sums are the same as
/// in a serial run.
class Assembler {
 public:
  using GraphFactory = std::function<GraphSet()>;

  Assembler(const Mesh& topology, std::size_t numEq, const GraphFactory& factory, AssemblerOptions options = {})
      : dofs_(topology, numEq), worksets_(buildWorksets(topology, options.worksetSize)), options_(options),
        pattern_(dofs_.pattern()) {
    const std::size_t workers = std::max<std::size_t>(1, std::min(options.threads, worksets_.size()));
    for (std::size_t w = 0; w < workers; ++w) graphs_.push_back(factory());
  }

  const DofMap& dofs() const { return dofs_; }
  const std::vector<Workset>& worksets() const { return worksets_; }
  const AssemblerOptions& options() const { return options_; }
  std::size_t numWorkers() const { return graphs_.size(); }
  GraphSet& graphs(std::size_t worker = 0) { return graphs_.at(worker); }

  /// Zero matrix with the assembly sparsity pattern.
  CsrMatrix makeMatrix() const { return pattern_; }

  /// Zeroes the requested outputs and assembles them. `base` supplies the
  /// inputs; its sink is replaced.
  template <class EvalT>
  void assemble(const AssemblyContext& base, const AssemblyOutputs& out) {
    if (!base.mesh || base.mesh->numElements() != dofs_.numElements())
      throw UsageError("assembly mesh does not match the assembler topology");
    zero(out);
    AssemblyContext shared = base;
    shared.dofs = &dofs_;
    DirectSink direct(out);
    if (graphs_.size() == 1) {
      auto& graph = graphs_[0].get<EvalT>();
      AssemblyContext ctx = shared;
      ctx.sink = &direct;
      for (Workset ws : worksets_) {
        ws.context = &ctx;
        graph.execute(ws);
      }
      return;
    }
    std::vector<RecordingSink> records(worksets_.size());
    std::vector<std::exception_ptr> errors(worksets_.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < graphs_.size(); ++t)
      pool.emplace_back([&, t] {
        auto& graph = graphs_[t].get<EvalT>();
        for (std::size_t w = t; w < worksets_.size(); w += graphs_.size()) {
          AssemblyContext ctx = shared;
          ctx.sink = &records[w];
          Workset ws = worksets_[w];
          ws.context = &ctx;
          try {
            graph.execute(ws);
          } catch (...) {
            errors[w] = std::current_exception();
            return;
          }
        }
      });
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (const auto& r : records) r.replay(direct);
  }

 private:
  static void zero(const AssemblyOutputs& out) {
    if (out.f) std::fill(out.f->begin(), out.f->end(), 0.0);
    if (out.jacobian) out.jacobian->setZero();
    if (out.dfdp) out.dfdp->setZero();
    if (out.sgF) out.sgF->setZero();
    if (out.sgJ)
      for (auto& m : *out.sgJ) m.setZero();
  }

  DofMap dofs_;
  std::vector<Workset> worksets_;
  AssemblerOptions options_;
  CsrMatrix pattern_;
  std::vector<GraphSet> graphs_;
};

}  // namespace genfe
