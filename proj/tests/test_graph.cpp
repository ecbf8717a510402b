#include <algorithm>
#include <cstring>
#include <memory>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "genfe/graph.hpp"

namespace {

using namespace genfe;

const Layout kLayout{{Dim::Cell, 2}, {Dim::QuadPoint, 3}};

struct ToySpec {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

// out = 1 + sum(inputs) + in0 * in0, written once for all evaluation types
template <class EvalT>
class Toy : public Evaluator<EvalT> {
 public:
  explicit Toy(const ToySpec& spec) : Evaluator<EvalT>(spec.name) {
    in_.resize(spec.inputs.size());
    out_.resize(spec.outputs.size());
    for (std::size_t i = 0; i < in_.size(); ++i) this->dependsOn(in_[i], spec.inputs[i], kLayout);
    for (std::size_t i = 0; i < out_.size(); ++i) this->evaluates(out_[i], spec.outputs[i], kLayout);
  }

  void evaluate(const Workset& ws) override {
    for (std::size_t c = 0; c < ws.numElements; ++c)
      for (std::size_t q = 0; q < 3; ++q)
        for (auto& o : out_) {
          typename EvalT::ScalarT v = 1.0;
          for (auto& i : in_) v += i(c, q);
          if (!in_.empty()) v += in_[0](c, q) * in_[0](c, q);
          o(c, q) = v;
        }
  }

 private:
  std::vector<ScalarRef<EvalT>> in_;
  std::vector<ScalarRef<EvalT>> out_;
};

template <class EvalT>
std::unique_ptr<Evaluator<EvalT>> toy(const ToySpec& s) {
  return std::make_unique<Toy<EvalT>>(s);
}

template <class EvalT>
std::vector<std::unique_ptr<Evaluator<EvalT>>> chain() {
  std::vector<std::unique_ptr<Evaluator<EvalT>>> v;
  v.push_back(toy<EvalT>({"A", {}, {"a"}}));
  v.push_back(toy<EvalT>({"B", {"a"}, {"b"}}));
  v.push_back(toy<EvalT>({"C", {"b"}, {"c"}}));
  return v;
}

using R = eval::Residual;

TEST(Graph, ChainSchedule) {
  auto g = buildGraph<R>(chain<R>(), {{"c"}});
  EXPECT_EQ(g->scheduleNames(), (std::vector<std::string>{"A", "B", "C"}));
}

TEST(Graph, ChainRegisteredInReverseStillOrdered) {
  auto v = chain<R>();
  std::reverse(v.begin(), v.end());
  auto g = buildGraph<R>(std::move(v), {{"c"}});
  EXPECT_EQ(g->scheduleNames(), (std::vector<std::string>{"A", "B", "C"}));
}

TEST(Graph, DiamondTieBreakByRegistration) {
  std::vector<std::unique_ptr<Evaluator<R>>> v;
  v.push_back(toy<R>({"D", {"b", "c"}, {"d"}}));
  v.push_back(toy<R>({"B", {"a"}, {"b"}}));
  v.push_back(toy<R>({"C", {"a"}, {"c"}}));
  v.push_back(toy<R>({"A", {}, {"a"}}));
  auto g = buildGraph<R>(std::move(v), {{"d"}});
  EXPECT_EQ(g->scheduleNames(), (std::vector<std::string>{"A", "B", "C", "D"}));
}

TEST(Graph, PrunesUnrequested) {
  auto g = buildGraph<R>(chain<R>(), {{"b"}});
  EXPECT_EQ(g->scheduleNames(), (std::vector<std::string>{"A", "B"}));
}

TEST(Graph, CycleIsReported) {
  std::vector<std::unique_ptr<Evaluator<R>>> v;
  v.push_back(toy<R>({"X", {"z"}, {"x"}}));
  v.push_back(toy<R>({"Y", {"x"}, {"y"}}));
  v.push_back(toy<R>({"Z", {"y"}, {"z"}}));
  try {
    buildGraph<R>(std::move(v), {{"z"}});
    FAIL() << "expected cycle error";
  } catch (const UsageError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("cycle"), std::string::npos);
    EXPECT_NE(msg.find("X"), std::string::npos);
    EXPECT_NE(msg.find("Y"), std::string::npos);
    EXPECT_NE(msg.find("Z"), std::string::npos);
  }
}

TEST(Graph, UnsatisfiedDependencyNamesFieldAndConsumer) {
  std::vector<std::unique_ptr<Evaluator<R>>> v;
  v.push_back(toy<R>({"B", {"a"}, {"b"}}));
  try {
    buildGraph<R>(std::move(v), {{"b"}});
    FAIL();
  } catch (const UsageError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("'a'") == std::string::npos ? msg.find("a<") : 0, std::string::npos);
    EXPECT_NE(msg.find("'B'"), std::string::npos);
  }
}

TEST(Graph, DuplicateProducerRejected) {
  std::vector<std::unique_ptr<Evaluator<R>>> v;
  v.push_back(toy<R>({"A1", {}, {"a"}}));
  v.push_back(toy<R>({"A2", {}, {"a"}}));
  EXPECT_THROW(buildGraph<R>(std::move(v), {{"a"}}), UsageError);
}

TEST(Graph, LayoutMismatchRejected) {
  struct Wide : Evaluator<R> {
    ScalarRef<R> in;
    MeshRef<R> dummy;
    Wide() : Evaluator<R>("Wide") {
      dependsOn(in, "a", Layout{{Dim::Cell, 5}});
      evaluates(dummy, "w", Layout{{Dim::Cell, 5}});
    }
    void evaluate(const Workset&) override {}
  };
  std::vector<std::unique_ptr<Evaluator<R>>> v;
  v.push_back(toy<R>({"A", {}, {"a"}}));
  v.push_back(std::make_unique<Wide>());
  EXPECT_THROW(buildGraph<R>(std::move(v), {{"w", ScalarKind::Mesh}}), UsageError);
}

TEST(Graph, ExecutionCountsAndEmptyRequest) {
  auto g = buildGraph<R>(chain<R>(), {{"c"}});
  Workset ws{0, 0, 2, 0, nullptr};
  g->execute(ws);
  EXPECT_EQ(g->executionCount(), g->scheduleNames().size());
  EXPECT_DOUBLE_EQ(g->arena().get<ScalarKind::Scalar>("a")(0, 0), 1.0);
  // a = 1, b = 1 + a + a^2 = 3, c = 1 + b + b^2 = 13
  EXPECT_DOUBLE_EQ(g->arena().get<ScalarKind::Scalar>("c")(1, 2), 13.0);

  auto empty = buildGraph<R>(chain<R>(), {});
  empty->execute(ws);
  EXPECT_EQ(empty->executionCount(), 0u);
  EXPECT_TRUE(empty->scheduleNames().empty());
}

TEST(Graph, ReexecutionDoesNotReallocate) {
  auto g = buildGraph<R>(chain<R>(), {{"c"}});
  const auto allocations = g->arena().allocationCount();
  g->execute(Workset{0, 0, 2, 0, nullptr});
  g->execute(Workset{1, 2, 1, 0, nullptr});
  EXPECT_EQ(g->arena().allocationCount(), allocations);
}

TEST(Graph, KernelErrorsCarryEvaluatorName) {
  struct Failing : Evaluator<R> {
    ScalarRef<R> out;
    Failing() : Evaluator<R>("Failing Kernel") { evaluates(out, "f", kLayout); }
    void evaluate(const Workset&) override { throw DomainError("bad state"); }
  };
  std::vector<std::unique_ptr<Evaluator<R>>> v;
  v.push_back(std::make_unique<Failing>());
  auto g = buildGraph<R>(std::move(v), {{"f"}});
  try {
    g->execute(Workset{0, 0, 1, 0, nullptr});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("Failing Kernel"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("bad state"), std::string::npos);
  }
}

TEST(Graph, ScheduleIsTopologicalOrder) {
  // random DAGs: every producer precedes its consumers
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 12;
    std::vector<ToySpec> specs;
    for (int i = 0; i < n; ++i) {
      ToySpec s{"E" + std::to_string(i), {}, {"f" + std::to_string(i)}};
      for (int j = 0; j < i; ++j)
        if (rng() % 3 == 0) s.inputs.push_back("f" + std::to_string(j));
      specs.push_back(s);
    }
    std::shuffle(specs.begin(), specs.end(), rng);
    std::vector<std::unique_ptr<Evaluator<R>>> v;
    for (const auto& s : specs) v.push_back(toy<R>(s));
    std::vector<FieldRequest> req;
    for (int i = 0; i < n; ++i) req.push_back({"f" + std::to_string(i)});
    auto g = buildGraph<R>(std::move(v), req);
    const auto names = g->scheduleNames();
    ASSERT_EQ(names.size(), static_cast<std::size_t>(n));
    auto pos = [&](const std::string& name) { return std::find(names.begin(), names.end(), name) - names.begin(); };
    for (const auto& e : g->edges()) EXPECT_LT(pos(e.producer), pos(e.consumer));
  }
}

ToySpec specs[] = {{"A", {}, {"a"}}, {"B", {"a"}, {"b"}}, {"C", {"a"}, {"c"}}, {"D", {"b", "c"}, {"d"}}};

std::vector<Registrar> toyRegistrars() {
  std::vector<Registrar> regs;
  for (const auto& s : specs) regs.push_back(makeRegistrar<Toy>(s.name, s));
  return regs;
}

TEST(Registry, SingleType) {
  auto set = instantiateForAllTypes(toyRegistrars(), {EvalTag::Residual}, {{"d"}});
  EXPECT_TRUE(set.has(EvalTag::Residual));
  EXPECT_FALSE(set.has(EvalTag::Jacobian));
  EXPECT_THROW(set.get<eval::Jacobian>(), UsageError);
}

TEST(Registry, StructureIdenticalAcrossTypes) {
  auto set = instantiateForAllTypes(
      toyRegistrars(),
      {EvalTag::Residual, EvalTag::Jacobian, EvalTag::Tangent, EvalTag::ShapeTangent, EvalTag::SGResidual,
       EvalTag::SGJacobian},
      {{"d"}});
  const auto names = set.get<eval::Residual>().scheduleNames();
  const auto edges = set.get<eval::Residual>().edges();
  EXPECT_EQ(set.get<eval::Jacobian>().scheduleNames(), names);
  EXPECT_EQ(set.get<eval::SGJacobian>().scheduleNames(), names);
  EXPECT_EQ(set.get<eval::ShapeTangent>().edges(), edges);
  EXPECT_EQ(set.get<eval::SGResidual>().edges(), edges);
}

TEST(Registry, MissingSpecializationNamesRegistrar) {
  auto regs = toyRegistrars();
  Registrar partial("Residual Only");
  partial.set<eval::Residual>([] { return toy<eval::Residual>({"E", {"d"}, {"e"}}); });
  regs.push_back(partial);
  EXPECT_NO_THROW(instantiateForAllTypes(regs, {EvalTag::Residual}, {{"e"}}));
  try {
    instantiateForAllTypes(regs, {EvalTag::Jacobian}, {{"e"}});
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("Residual Only"), std::string::npos);
  }
  try {
    instantiateForAllTypes(regs, {static_cast<EvalTag>(42)}, {{"e"}});
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("registrar"), std::string::npos);
  }
}

bool sameBits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

TEST(Registry, JacobianValuesReproduceResidualBitwise) {
  const std::vector<FieldTag> ext{{"x", kLayout, ScalarKind::Scalar}};
  auto regs = toyRegistrars();
  regs[0] = makeRegistrar<Toy>("A", ToySpec{"A", {"x"}, {"a"}});
  auto set = instantiateForAllTypes(regs, {EvalTag::Residual, EvalTag::Jacobian}, {{"d"}}, ext);
  auto& gr = set.get<eval::Residual>();
  auto& gj = set.get<eval::Jacobian>();
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t i = 0; i < kLayout.size(); ++i) {
    const double x = u(rng);
    gr.arena().get<ScalarKind::Scalar>("x")[i] = x;
    gj.arena().get<ScalarKind::Scalar>("x")[i] = Dual::seeded(x, 6, i);
  }
  gr.execute(Workset{0, 0, 2, 0, nullptr});
  gj.execute(Workset{0, 0, 2, 0, nullptr});
  for (std::size_t i = 0; i < kLayout.size(); ++i)
    EXPECT_TRUE(sameBits(gr.arena().get<ScalarKind::Scalar>("d")[i], gj.arena().get<ScalarKind::Scalar>("d")[i].val()));
}

TEST(Graph, DotAndTextDumps) {
  auto g = buildGraph<R>(chain<R>(), {{"c"}});
  const auto dot = g->dumpDot();
  EXPECT_NE(dot.find("\"A\" -> \"B\""), std::string::npos);
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  const auto text = g->dumpText();
  EXPECT_NE(text.find("C <- B[b]"), std::string::npos);
}

}  // namespace
