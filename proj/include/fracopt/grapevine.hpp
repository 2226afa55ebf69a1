#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "fracopt/gaingraph.hpp"

namespace fracopt {

class PredTable {
 public:
  PredTable() = default;
  PredTable(std::size_t nodes, std::size_t rounds) : nodes_(nodes), rounds_(rounds), data_(nodes * rounds) {}

  // round is 1-based.
  std::optional<ArcId> at(NodeId v, std::size_t round) const { return data_.at((round - 1) * nodes_ + v); }
  void set(NodeId v, std::size_t round, ArcId e) { data_.at((round - 1) * nodes_ + v) = e; }
  std::size_t rounds() const { return rounds_; }
  std::size_t nodes() const { return nodes_; }

 private:
  std::size_t nodes_ = 0;
  std::size_t rounds_ = 0;
  std::vector<std::optional<ArcId>> data_;
};

template <Scalar S>
struct GrapevineOutput {
  Labels<S> labels;
  Walk walk;
  PredTable pred;
  std::size_t rounds_run = 0;
};

// Runs `rounds` synchronous relaxation rounds (default: node count).
template <Scalar S>
GrapevineOutput<S> grapevine(const GainGraph<S>& g, Labels<S> y0, NodeId u, const Tolerance& tol = {},
                             std::optional<std::size_t> rounds = std::nullopt);

// Reverse-chronological trace starting at pred(from, level).
template <Scalar S>
Walk trace_walk(const GainGraph<S>& g, const PredTable& pred, NodeId from, std::size_t level);

template <Scalar S>
struct DualInfeasible {
  ArcId violated_arc;
  Walk cycle;  // flow-generating cycle avoiding u
  Walk path;   // from the cycle node to the end of the traced walk
  S end_label;  // label at the end of `path` (delta' when it ends at u')
  Labels<S> labels;
};

template <Scalar S>
struct DualUpdated {
  Labels<S> labels;
  Walk path;
  bool reaches_split = false;
  S supergradient;
};

template <Scalar S>
using DualUpdateResult = std::variant<DualUpdated<S>, DualInfeasible<S>>;

// y holds labels over V (entry for u' optional and overwritten by delta).
template <Scalar S>
DualUpdateResult<S> update_dual(const SplitGraph<S>& split, Labels<S> y, const S& delta, const Tolerance& tol = {});

// Turns the walk e.R (violated arc followed by the trace from its head) into a
// cycle and a simple suffix path. Returns nullopt when the walk has no repeated node.
template <Scalar S>
std::optional<std::pair<Walk, Walk>> decompose_violation(const GainGraph<S>& g, const PredTable& pred, ArcId violated);

template <Scalar S>
S supergradient_of(const SplitGraph<S>& split, const Walk& p, bool* reaches_split = nullptr);

// inf of the superdifferential at the labels' parameter, read off the tight subgraph.
template <Scalar S>
std::optional<S> tight_right_derivative(const SplitGraph<S>& split, const Labels<S>& z, const Tolerance& tol = {});

// True when some flow-absorbing cycle is reachable from `from` using only the allowed arcs.
template <Scalar S>
bool reaches_absorbing_cycle(const GainGraph<S>& g, NodeId from, const std::vector<bool>& allowed,
                             const Tolerance& tol = {});

}  // namespace fracopt
