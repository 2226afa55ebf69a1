#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fracopt/gaingraph.hpp"
#include "fracopt/grapevine.hpp"
#include "fracopt/newton.hpp"

namespace fracopt {

// Arc (u, v, gamma, c) encodes y_u - gamma * y_v <= c.
template <Scalar S>
using M2vpiSystem = GainGraph<S>;

template <Scalar S>
struct TvpiRow {
  S a;
  NodeId u;
  S b;
  NodeId v;
  S c;
};

// Rows a*y_u + b*y_v <= c.
template <Scalar S>
struct Tvpi2System {
  std::size_t n = 0;
  std::vector<TvpiRow<S>> rows;
};

template <Scalar S>
struct PhaseEvaluation {
  S delta;
  bool finite = false;
  std::optional<S> value;
  std::optional<S> supergradient;
  std::optional<S> right_derivative;
  Walk path;
  bool path_reaches_split = false;
};

template <Scalar S>
struct PhaseRecord {
  NodeId node = 0;
  std::size_t arc_count = 0;
  bool seeded_by_cycle = false;
  bool ran_newton = false;
  NewtonTrace<S> trace;
  std::size_t oracle_calls = 0;
  std::optional<S> root;
  std::vector<PhaseEvaluation<S>> evaluations;
  std::vector<Labels<S>> snapshots;  // labels after the phase-initial sweep and at each accepted iterate
};

// A violated arc survived the phase-initial sweep (or an oracle query);
// `cycle` is flow-generating and `path` leads from it to the split copy of u.
template <Scalar S>
struct ViolatedAfterGrapevine {
  ArcId arc;
  Labels<S> labels;
  std::optional<Walk> cycle;
  std::optional<Walk> path;
  std::optional<S> end_label;
};

// Closed walk at the phase node with gain >= 1 and f < 0.
template <Scalar S>
struct NonContractingPath {
  NodeId node;
  Walk path;
  S delta;
};

template <Scalar S>
struct NewtonNoRoot {
  NoRoot<S> witness;
  std::optional<Walk> cycle;
  std::optional<Walk> path;
  std::optional<S> end_label;
};

struct NegativeUnitGainCycle {
  Walk cycle;
};

// `generating` (gain > 1, closed at a) forces y_a >= c/(1 - gamma); the walk
// `connector` from a into the closed walk `absorbing` (gain < 1) forces a
// smaller upper bound on y_a.
struct NegativeBicycle {
  Walk generating;
  Walk connector;
  Walk absorbing;
};

// Self-contained infeasibility proof over the original system.
using Certificate = std::variant<NegativeUnitGainCycle, NegativeBicycle>;

template <Scalar S>
struct InfeasibilityEvidence {
  std::variant<ViolatedAfterGrapevine<S>, NonContractingPath<S>, NewtonNoRoot<S>, NegativeUnitGainCycle> kind;
  // Walks in `kind` refer to reverse_system(sys) (same arc ids, reversed arcs).
  bool in_reversed_system = false;
  std::optional<Certificate> certificate;
};

template <Scalar S>
std::string evidence_kind(const InfeasibilityEvidence<S>& ev);

template <Scalar S>
struct MaxSolution {
  Labels<S> y;
};

template <Scalar S>
struct Infeasible {
  NodeId phase = 0;
  InfeasibilityEvidence<S> evidence;
};

struct SolveOptions {
  bool audit = false;      // record right derivatives and per-evaluation data
  bool snapshots = false;  // record label vectors inside phases
  bool complete = true;    // run the negative unit-gain check on the infinite part
};

template <Scalar S>
struct SolveOutcome {
  std::variant<MaxSolution<S>, Infeasible<S>> result;
  std::vector<PhaseRecord<S>> phases;
  std::vector<PhaseRecord<S>> reverse_phases;
  std::optional<Labels<S>> reverse_labels;  // y^max of the reversed system, i.e. -y^min

  bool feasible() const { return std::holds_alternative<MaxSolution<S>>(result); }
  const Labels<S>& labels() const { return std::get<MaxSolution<S>>(result).y; }
  const Infeasible<S>& infeasible() const { return std::get<Infeasible<S>>(result); }
};

template <Scalar S>
SolveOutcome<S> solve_m2vpi(const M2vpiSystem<S>& sys, const NewtonConfig& cfg, const SolveOptions& opts = {});

template <Scalar S>
M2vpiSystem<S> reverse_system(const M2vpiSystem<S>& sys);

template <Scalar S>
struct Reduction {
  M2vpiSystem<S> system;  // variables y+_u = u, y-_u = n + u
  std::size_t original_n = 0;

  std::vector<S> back_map(const std::vector<S>& reduced) const;
};

template <Scalar S>
Reduction<S> reduce_2vpi(const Tvpi2System<S>& sys);

template <Scalar S>
struct FeasiblePoint {
  std::vector<S> y;
};

template <Scalar S>
struct RecoveryOutcome {
  std::variant<FeasiblePoint<S>, Infeasible<S>> result;
  std::size_t fixed_coordinates = 0;

  bool feasible() const { return std::holds_alternative<FeasiblePoint<S>>(result); }
  const std::vector<S>& point() const { return std::get<FeasiblePoint<S>>(result).y; }
};

template <Scalar S>
RecoveryOutcome<S> recover_finite_solution(const M2vpiSystem<S>& sys, const NewtonConfig& cfg);

// Re-validation helpers used by the CLI and the tests.
template <Scalar S>
bool satisfies(const M2vpiSystem<S>& sys, const Labels<S>& y, const Tolerance& tol = {});

template <Scalar S>
bool satisfies(const Tvpi2System<S>& sys, const std::vector<S>& y, const Tolerance& tol = {});

// Arithmetic re-check against the instance; empty string when it checks out,
// otherwise the reason.
template <Scalar S>
std::string check_certificate(const M2vpiSystem<S>& sys, const Certificate& cert, const Tolerance& tol = {});

template <Scalar S>
std::string check_evidence(const M2vpiSystem<S>& sys, const InfeasibilityEvidence<S>& ev, const Tolerance& tol = {});

// Same certificate read in the original orientation of a reversed system.
template <Scalar S>
Certificate unreverse(const M2vpiSystem<S>& reversed, const Certificate& cert);

}  // namespace fracopt
