#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fracopt/numerics.hpp"

namespace fracopt {

using NodeId = std::size_t;
using ArcId = std::size_t;

template <Scalar S>
struct Arc {
  NodeId tail;
  NodeId head;
  S gamma;
  S cost;
};

// Directed multigraph with gain factors. Arc (v, w, gamma, c) also reads as
// the constraint y_v - gamma * y_w <= c.
template <Scalar S>
class GainGraph {
 public:
  GainGraph() = default;
  explicit GainGraph(std::size_t n) : out_(n), in_(n) {}

  NodeId add_node() {
    out_.emplace_back();
    in_.emplace_back();
    return out_.size() - 1;
  }
  ArcId add_arc(NodeId tail, NodeId head, S gamma, S cost);

  std::size_t node_count() const { return out_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }
  const Arc<S>& arc(ArcId e) const { return arcs_.at(e); }
  std::span<const Arc<S>> arcs() const { return arcs_; }
  std::span<const ArcId> out_arcs(NodeId v) const { return out_.at(v); }
  std::span<const ArcId> in_arcs(NodeId v) const { return in_.at(v); }

  // Same node set, only the listed arcs (renumbered in the given order).
  GainGraph subgraph(std::span<const ArcId> ids) const;

 private:
  std::vector<Arc<S>> arcs_;
  std::vector<std::vector<ArcId>> out_;
  std::vector<std::vector<ArcId>> in_;
};

template <Scalar S>
using Labels = std::vector<ExtScalar<S>>;

template <Scalar S>
Labels<S> infinite_labels(std::size_t n) {
  return Labels<S>(n, ExtScalar<S>::infinity());
}

struct Walk {
  NodeId start = 0;
  std::vector<ArcId> arcs;

  bool empty() const { return arcs.empty(); }
  std::size_t size() const { return arcs.size(); }
  friend bool operator==(const Walk&, const Walk&) = default;
};

template <Scalar S>
struct WalkValue {
  S cost;
  S gamma;
};

template <Scalar S>
WalkValue<S> walk_eval(const GainGraph<S>& g, const Walk& p);

template <Scalar S>
NodeId walk_end(const GainGraph<S>& g, const Walk& p);

template <Scalar S>
std::vector<NodeId> walk_nodes(const GainGraph<S>& g, const Walk& p);

enum class CycleClass { FlowGenerating, UnitGain, FlowAbsorbing };

struct CycleInfo {
  CycleClass cls;
  bool negative_unit_gain = false;
};

template <Scalar S>
CycleInfo classify_cycle(const GainGraph<S>& g, const Walk& c, const Tolerance& tol = {});

// Bound implied on the start node by a non-unit-gain cycle: y_u <= c/(1-gamma)
// when absorbing, y_u >= c/(1-gamma) when generating.
template <Scalar S>
S cycle_bound(const WalkValue<S>& v) {
  return v.cost / (S(1) - v.gamma);
}

template <Scalar S>
std::optional<Walk> find_flow_absorbing_cycle(const GainGraph<S>& g, NodeId u, const Tolerance& tol = {});

template <Scalar S>
std::optional<Walk> detect_negative_unit_gain_cycle(const GainGraph<S>& g, const Tolerance& tol = {});

// Strongly connected components; ids are in reverse topological order
// (component 0 has no arcs to other components).
template <Scalar S>
std::vector<std::size_t> strong_components(const GainGraph<S>& g, std::size_t* count = nullptr);

template <Scalar S>
struct SplitGraph {
  GainGraph<S> graph;  // arc ids coincide with the source graph
  NodeId u;
  NodeId u_prime;
};

template <Scalar S>
SplitGraph<S> split_at(const GainGraph<S>& g, NodeId u);

template <Scalar S>
bool is_violated(const Arc<S>& a, const Labels<S>& y, const Compare<S>& cmp) {
  return ext_less(ext_add_mul(a.cost, a.gamma, y[a.head]), y[a.tail], cmp);
}

template <Scalar S>
std::optional<ArcId> find_violated_arc(const GainGraph<S>& g, const Labels<S>& y, const Tolerance& tol = {});

template <Scalar S>
bool is_tight(const Arc<S>& a, const Labels<S>& y, const Compare<S>& cmp) {
  if (y[a.tail].is_infinite() || y[a.head].is_infinite()) return false;
  return cmp.eq(y[a.tail].value(), a.cost + a.gamma * y[a.head].value());
}

struct AbsorbingWitness {
  Walk path;   // v to the start of `cycle`
  Walk cycle;  // flow-absorbing
};

// Tight walk from v into a tight flow-absorbing cycle, which certifies y_v as
// an upper bound: y_v = c(path) + gamma(path) * c(cycle) / (1 - gamma(cycle)).
template <Scalar S>
std::optional<AbsorbingWitness> tight_absorbing_witness(const GainGraph<S>& g, const Labels<S>& y, NodeId v,
                                                        const Tolerance& tol = {});

template <Scalar S>
Walk reverse_walk(const GainGraph<S>& reversed, const Walk& w);

Walk concat(const Walk& a, const Walk& b);

// Rotates a cycle so that it starts at node v (which must lie on it).
template <Scalar S>
Walk rotate_cycle(const GainGraph<S>& g, const Walk& c, NodeId v);

}  // namespace fracopt
