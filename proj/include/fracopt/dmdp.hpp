#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "fracopt/gaingraph.hpp"
#include "fracopt/m2vpi.hpp"
#include "fracopt/newton.hpp"

namespace fracopt {

// Gain graph with discount factors in (0, 1] and no dead-end nodes.
template <Scalar S>
class DmdpInstance {
 public:
  static DmdpInstance make(GainGraph<S> g);
  const GainGraph<S>& graph() const { return g_; }

 private:
  explicit DmdpInstance(GainGraph<S> g) : g_(std::move(g)) {}
  GainGraph<S> g_;
};

template <Scalar S>
struct ShortestPathTree {
  NodeId root = 0;
  std::vector<std::optional<ArcId>> pred;
  std::vector<NodeId> extraction_order;
  std::vector<S> extraction_keys;  // relabel offsets at extraction time
};

template <Scalar S>
struct RelabelResult {
  Labels<S> labels;
  ShortestPathTree<S> tree;
};

// Lowers y_t to alpha and repairs all labels Dijkstra-style. Nodes with
// infinite labels are left untouched.
template <Scalar S>
RelabelResult<S> dijkstra_relabel(const GainGraph<S>& g, NodeId t, const Labels<S>& y, const S& alpha,
                                  const Tolerance& tol = {}, bool check_heap_order = false);

struct Policy {
  std::vector<ArcId> choice;
};

template <Scalar S>
struct DmdpSolution {
  Labels<S> values;
  Policy policy;
};

template <Scalar S>
struct DmdpOutcome {
  std::variant<DmdpSolution<S>, NegativeUnitGainCycle> result;
  std::vector<PhaseRecord<S>> phases;

  bool feasible() const { return std::holds_alternative<DmdpSolution<S>>(result); }
  const DmdpSolution<S>& solution() const { return std::get<DmdpSolution<S>>(result); }
  const Walk& cycle() const { return std::get<NegativeUnitGainCycle>(result).cycle; }
};

template <Scalar S>
DmdpOutcome<S> solve_dmdp(const DmdpInstance<S>& inst, const NewtonConfig& cfg, const SolveOptions& opts = {});

// Tight-arc policy for optimal values y.
template <Scalar S>
Policy extract_policy(const GainGraph<S>& g, const Labels<S>& y, const Tolerance& tol = {});

// Closed-form value of following the policy from every node; nullopt when the
// policy closes a negative unit-gain cycle.
template <Scalar S>
std::optional<Labels<S>> evaluate_policy(const GainGraph<S>& g, const Policy& policy, const Tolerance& tol = {});

}  // namespace fracopt
