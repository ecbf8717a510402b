#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "genfe/error.hpp"
#include "genfe/graph/evaluator.hpp"

namespace genfe {

/// A field a graph must produce, identified by name and kind.
struct FieldRequest {
  std::string name;
  ScalarKind kind = ScalarKind::Scalar;
};

/// Producer -> consumer dependency through one field.
struct GraphEdge {
  std::string producer;
  std::string consumer;
  std::string field;
  auto operator<=>(const GraphEdge&) const = default;
};

/// DAG of evaluators for one evaluation type.
///
/// Evaluators are registered, then finalize() keeps only those transitively
/// needed for the requested fields, orders them topologically (ties broken
/// by registration order), allocates the arena and binds field handles.
template <class EvalT>
class EvaluatorGraph {
 public:
  using Arena = ArenaFor<EvalT>;

  void registerEvaluator(std::unique_ptr<Evaluator<EvalT>> e) {
    if (finalized_) throw UsageError("cannot register evaluator '" + e->name() + "' after finalize");
    evaluators_.push_back(std::move(e));
  }

  /// Field supplied by the application rather than by an evaluator.
  void registerExternalField(FieldTag tag) { externals_.push_back(std::move(tag)); }

  void requireField(FieldRequest request) { required_.push_back(std::move(request)); }

  void finalize() {
    if (finalized_) return;
    std::map<std::pair<std::string, ScalarKind>, std::size_t> producerOf;
    std::map<std::pair<std::string, ScalarKind>, const FieldTag*> producedTag;
    for (std::size_t i = 0; i < evaluators_.size(); ++i) {
      const auto& e = *evaluators_[i];
      if (e.evaluatedFields().empty()) throw UsageError("evaluator '" + e.name() + "' evaluates no fields");
      for (const auto& tag : e.evaluatedFields()) {
        for (const auto& dep : e.dependentFields())
          if (dep.key() == tag.key())
            throw UsageError("evaluator '" + e.name() + "' both depends on and evaluates field " + tag.str());
        auto [it, inserted] = producerOf.emplace(tag.key(), i);
        if (!inserted)
          throw UsageError("field " + tag.str() + " has duplicate producers '" + evaluators_[it->second]->name() +
                           "' and '" + e.name() + "'");
        producedTag[tag.key()] = &tag;
      }
    }
    std::map<std::pair<std::string, ScalarKind>, const FieldTag*> externalTag;
    for (const auto& t : externals_) externalTag[t.key()] = &t;

    // transitive closure of producers needed for the requested fields
    std::vector<bool> needed(evaluators_.size(), false);
    std::vector<std::size_t> stack;
    for (const auto& r : required_) {
      auto it = producerOf.find({r.name, r.kind});
      if (it == producerOf.end()) {
        if (externalTag.count({r.name, r.kind})) continue;
        throw UsageError(std::string("requested field '") + r.name + "' <" + kindName(r.kind) + "> has no producer");
      }
      stack.push_back(it->second);
    }
    std::map<std::size_t, std::set<std::size_t>> preds;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      if (needed[i]) continue;
      needed[i] = true;
      for (const auto& dep : evaluators_[i]->dependentFields()) {
        auto it = producerOf.find(dep.key());
        if (it == producerOf.end()) {
          auto ext = externalTag.find(dep.key());
          if (ext == externalTag.end())
            throw UsageError("unsatisfied dependency: field " + dep.str() + " needed by '" + evaluators_[i]->name() +
                             "' has no producer");
          if (ext->second->layout != dep.layout)
            throw UsageError("layout mismatch for external field '" + dep.name + "' consumed by '" +
                             evaluators_[i]->name() + "'");
          continue;
        }
        const FieldTag& produced = *producedTag.at(dep.key());
        if (produced.layout != dep.layout)
          throw UsageError("layout mismatch for field '" + dep.name + "': produced as " + produced.layout.str() +
                           " by '" + evaluators_[it->second]->name() + "', consumed as " + dep.layout.str() + " by '" +
                           evaluators_[i]->name() + "'");
        preds[i].insert(it->second);
        edges_.push_back({evaluators_[it->second]->name(), evaluators_[i]->name(), dep.name});
        stack.push_back(it->second);
      }
    }

    // Kahn's algorithm; the ready set is ordered by registration index
    std::vector<std::size_t> indegree(evaluators_.size(), 0);
    std::map<std::size_t, std::vector<std::size_t>> succs;
    for (const auto& [i, ps] : preds) {
      indegree[i] = ps.size();
      for (auto p : ps) succs[p].push_back(i);
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    std::size_t neededCount = 0;
    for (std::size_t i = 0; i < evaluators_.size(); ++i)
      if (needed[i]) {
        ++neededCount;
        if (indegree[i] == 0) ready.push(i);
      }
    while (!ready.empty()) {
      const std::size_t i = ready.top();
      ready.pop();
      schedule_.push_back(i);
      for (auto s : succs[i])
        if (--indegree[s] == 0) ready.push(s);
    }
    if (schedule_.size() != neededCount) throw UsageError("evaluator graph has a cycle: " + describeCycle(needed, preds));

    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    for (const auto& t : externals_) arena_.allocate(t);
    for (auto i : schedule_) {
      for (const auto& t : evaluators_[i]->evaluatedFields()) arena_.allocate(t);
      for (const auto& t : evaluators_[i]->dependentFields()) arena_.allocate(t);
    }
    for (auto i : schedule_) evaluators_[i]->bindFields(arena_);
    finalized_ = true;
  }

  /// Runs every scheduled kernel once, in order. Errors are re-raised with
  /// the evaluator's name attached.
  void execute(const Workset& ws) {
    if (!finalized_) throw UsageError("execute called before finalize");
    for (auto i : schedule_) {
      auto& e = *evaluators_[i];
      try {
        e.evaluate(ws);
      } catch (Error& err) {
        err.addContext("evaluator '" + e.name() + "'");
        throw;
      } catch (const std::exception& err) {
        throw NumericalError("evaluator '" + e.name() + "': " + err.what());
      }
      ++executions_;
    }
  }

  bool finalized() const { return finalized_; }
  Arena& arena() { return arena_; }
  std::size_t executionCount() const { return executions_; }

  std::vector<std::string> scheduleNames() const {
    std::vector<std::string> names;
    for (auto i : schedule_) names.push_back(evaluators_[i]->name());
    return names;
  }

  const std::vector<GraphEdge>& edges() const { return edges_; }

  /// Scheduled evaluators (in order) with the fields they read and write.
  std::vector<const Evaluator<EvalT>*> scheduled() const {
    std::vector<const Evaluator<EvalT>*> out;
    for (auto i : schedule_) out.push_back(evaluators_[i].get());
    return out;
  }

  /// Plain-text adjacency list: one line per scheduled evaluator.
  std::string dumpText() const {
    std::ostringstream os;
    for (auto i : schedule_) {
      const auto& e = *evaluators_[i];
      os << e.name() << " <-";
      bool any = false;
      for (const auto& edge : edges_)
        if (edge.consumer == e.name()) {
          os << " " << edge.producer << "[" << edge.field << "]";
          any = true;
        }
      if (!any) os << " (none)";
      os << "\n";
    }
    return os.str();
  }

  /// Graphviz digraph; fields label the edges.
  std::string dumpDot(const std::string& graphName = "evaluators") const {
    std::ostringstream os;
    os << "digraph \"" << graphName << "\" {\n  rankdir=BT;\n";
    for (auto i : schedule_) os << "  \"" << evaluators_[i]->name() << "\" [shape=box];\n";
    for (const auto& e : edges_)
      os << "  \"" << e.producer << "\" -> \"" << e.consumer << "\" [label=\"" << e.field << "\"];\n";
    os << "}\n";
    return os.str();
  }

 private:
  std::string describeCycle(const std::vector<bool>& needed,
                            const std::map<std::size_t, std::set<std::size_t>>& preds) const {
    // depth-first search over predecessor links for a back edge
    std::vector<int> state(evaluators_.size(), 0);
    std::vector<std::size_t> path;
    std::string found;
    std::function<bool(std::size_t)> visit = [&](std::size_t i) {
      state[i] = 1;
      path.push_back(i);
      auto it = preds.find(i);
      if (it != preds.end())
        for (auto p : it->second) {
          if (state[p] == 1) {
            auto start = std::find(path.begin(), path.end(), p);
            std::ostringstream os;
            for (auto q = path.end(); q != start;) os << evaluators_[*--q]->name() << " -> ";
            os << evaluators_[p]->name();
            found = os.str();
            return true;
          }
          if (state[p] == 0 && visit(p)) return true;
        }
      state[i] = 2;
      path.pop_back();
      return false;
    };
    for (std::size_t i = 0; i < evaluators_.size(); ++i)
      if (needed[i] && state[i] == 0 && visit(i)) return found;
    return "(unknown)";
  }

  std::vector<std::unique_ptr<Evaluator<EvalT>>> evaluators_;
  std::vector<FieldTag> externals_;
  std::vector<FieldRequest> required_;
  std::vector<std::size_t> schedule_;
  std::vector<GraphEdge> edges_;
  Arena arena_;
  std::size_t executions_ = 0;
  bool finalized_ = false;
};

/// Builds and finalizes a graph from evaluators and requested outputs.
template <class EvalT>
std::unique_ptr<EvaluatorGraph<EvalT>> buildGraph(std::vector<std::unique_ptr<Evaluator<EvalT>>> evaluators,
                                                  const std::vector<FieldRequest>& requiredOutputs,
                                                  const std::vector<FieldTag>& externals = {}) {
  auto g = std::make_unique<EvaluatorGraph<EvalT>>();
  for (auto& e : evaluators) g->registerEvaluator(std::move(e));
  for (const auto& t : externals) g->registerExternalField(t);
  for (const auto& r : requiredOutputs) g->requireField(r);
  g->finalize();
  return g;
}

}  // namespace genfe
