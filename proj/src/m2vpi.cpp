#include "fracopt/m2vpi.hpp"

#include <algorithm>

#include "fracopt/errors.hpp"
#include "phase_loop.hpp"

namespace fracopt {

template <Scalar S>
std::string evidence_kind(const InfeasibilityEvidence<S>& ev) {
  switch (ev.kind.index()) {
    case 0:
      return "violated_arc";
    case 1:
      return "non_contracting_path";
    case 2:
      return "newton_no_root";
    default:
      return "negative_unit_gain_cycle";
  }
}

template <Scalar S>
SolveOutcome<S> solve_m2vpi(const M2vpiSystem<S>& sys, const NewtonConfig& cfg, const SolveOptions& opts) {
  detail::CoreResult<S> core = detail::run_phases(sys, cfg, opts, detail::GrapevineUpdate<S>{});
  SolveOutcome<S> out{MaxSolution<S>{}, std::move(core.phases), {}, std::nullopt};
  if (auto* bad = std::get_if<Infeasible<S>>(&core.result)) {
    out.result = std::move(*bad);
    return out;
  }
  Labels<S> y = std::get<Labels<S>>(std::move(core.result));
  bool any_infinite = std::any_of(y.begin(), y.end(), [](const ExtScalar<S>& v) { return v.is_infinite(); });
  if (opts.complete && any_infinite) {
    SolveOptions inner = opts;
    inner.complete = false;
    detail::CoreResult<S> rev = detail::run_phases(reverse_system(sys), cfg, inner, detail::GrapevineUpdate<S>{});
    out.reverse_phases = std::move(rev.phases);
    if (auto* bad = std::get_if<Infeasible<S>>(&rev.result)) {
      bad->evidence.in_reversed_system = true;
      if (bad->evidence.certificate) bad->evidence.certificate = unreverse(reverse_system(sys), *bad->evidence.certificate);
      out.result = std::move(*bad);
      return out;
    }
    Labels<S> z = std::get<Labels<S>>(std::move(rev.result));
    std::vector<ArcId> inside;
    for (ArcId e = 0; e < sys.arc_count(); ++e) {
      const Arc<S>& a = sys.arc(e);
      if (y[a.tail].is_infinite() && z[a.tail].is_infinite() && y[a.head].is_infinite() && z[a.head].is_infinite())
        inside.push_back(e);
    }
    if (auto c = detect_negative_unit_gain_cycle(sys.subgraph(inside), cfg.tol)) {
      Walk cycle = detail::to_original(*c, inside);
      NodeId at = cycle.start;
      Certificate cert = NegativeUnitGainCycle{cycle};
      out.result = Infeasible<S>{at, InfeasibilityEvidence<S>{NegativeUnitGainCycle{std::move(cycle)}, false, cert}};
      return out;
    }
    out.reverse_labels = std::move(z);
  }
  out.result = MaxSolution<S>{std::move(y)};
  return out;
}

template <Scalar S>
M2vpiSystem<S> reverse_system(const M2vpiSystem<S>& sys) {
  M2vpiSystem<S> r(sys.node_count());
  for (const Arc<S>& a : sys.arcs()) r.add_arc(a.head, a.tail, S(1) / a.gamma, a.cost / a.gamma);
  return r;
}

template <Scalar S>
std::vector<S> Reduction<S>::back_map(const std::vector<S>& reduced) const {
  if (reduced.size() < 2 * original_n) throw PreconditionViolation("reduced vector too short");
  std::vector<S> y;
  for (std::size_t u = 0; u < original_n; ++u) y.push_back((reduced[u] - reduced[original_n + u]) / S(2));
  return y;
}

template <Scalar S>
Reduction<S> reduce_2vpi(const Tvpi2System<S>& sys) {
  const std::size_t n = sys.n;
  Reduction<S> red{M2vpiSystem<S>(2 * n), n};
  auto plus = [](NodeId u) { return u; };
  auto minus = [n](NodeId u) { return n + u; };
  // p*y_x + q*y_z <= c with p, q of opposite signs.
  auto emit = [&](const S& p, NodeId x, const S& q, NodeId z, const S& c) {
    if (S(0) < p) {
      red.system.add_arc(x, z, -q / p, c / p);
    } else {
      red.system.add_arc(z, x, -p / q, c / q);
    }
  };
  for (const TvpiRow<S>& row : sys.rows) {
    if (row.u >= n || row.v >= n) throw PreconditionViolation("2VPI row references an unknown variable");
    S a = row.a, b = row.b;
    NodeId u = row.u, v = row.v;
    if (u == v) {
      a += b;
      b = S(0);
    }
    if (a == S(0) && b != S(0)) {
      std::swap(a, b);
      std::swap(u, v);
    }
    if (a == S(0)) {
      if (row.c < S(0)) throw InfeasibleTrivialRow("row 0 <= " + format_scalar(row.c));
      continue;
    }
    if (b == S(0)) {
      S half = a / S(2);
      emit(half, plus(u), -half, minus(u), row.c);
    } else if ((S(0) < a) == (S(0) < b)) {
      emit(a, plus(u), -b, minus(v), row.c);
      emit(-a, minus(u), b, plus(v), row.c);
    } else {
      emit(a, plus(u), b, plus(v), row.c);
      emit(-a, minus(u), -b, minus(v), row.c);
    }
  }
  return red;
}

template <Scalar S>
RecoveryOutcome<S> recover_finite_solution(const M2vpiSystem<S>& sys, const NewtonConfig& cfg) {
  const std::size_t n = sys.node_count();
  RecoveryOutcome<S> out{FeasiblePoint<S>{}, 0};
  SolveOutcome<S> sol = solve_m2vpi(sys, cfg);
  if (!sol.feasible()) {
    out.result = sol.infeasible();
    return out;
  }
  M2vpiSystem<S> work = sys;
  NodeId anchor = n;
  bool has_anchor = false;
  while (true) {
    const Labels<S>& y = sol.labels();
    auto it = std::find_if(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n),
                           [](const ExtScalar<S>& v) { return v.is_infinite(); });
    if (it == y.begin() + static_cast<std::ptrdiff_t>(n)) break;
    NodeId u = static_cast<NodeId>(it - y.begin());
    S value(0);
    if (sol.reverse_labels && (*sol.reverse_labels)[u].is_finite()) value = -(*sol.reverse_labels)[u].value();
    if (!has_anchor) {
      anchor = work.add_node();
      work.add_arc(anchor, anchor, S(1) / S(2), S(0));
      work.add_arc(anchor, anchor, S(2), S(0));
      has_anchor = true;
    }
    work.add_arc(u, anchor, S(1), value);
    work.add_arc(anchor, u, S(1), -value);
    ++out.fixed_coordinates;
    sol = solve_m2vpi(work, cfg);
    if (!sol.feasible()) {
      out.result = sol.infeasible();
      return out;
    }
  }
  std::vector<S> point;
  for (NodeId v = 0; v < n; ++v) point.push_back(sol.labels()[v].value());
  out.result = FeasiblePoint<S>{std::move(point)};
  return out;
}

template <Scalar S>
bool satisfies(const M2vpiSystem<S>& sys, const Labels<S>& y, const Tolerance& tol) {
  if (y.size() != sys.node_count()) return false;
  return !find_violated_arc(sys, y, tol).has_value();
}

template <Scalar S>
bool satisfies(const Tvpi2System<S>& sys, const std::vector<S>& y, const Tolerance& tol) {
  if (y.size() != sys.n) return false;
  Compare<S> cmp{tol};
  for (const auto& r : sys.rows) {
    if (cmp.gt(r.a * y[r.u] + r.b * y[r.v], r.c)) return false;
  }
  return true;
}

namespace {

template <Scalar S>
std::string check_generating_pair(const GainGraph<S>& g, const Walk& cycle, const Walk& path, const S& end_label,
                                  const Tolerance& tol) {
  Compare<S> cmp{tol};
  if (cycle.empty() || walk_end(g, cycle) != cycle.start) return "cycle is not closed";
  if (path.start != cycle.start) return "path does not start on the cycle";
  WalkValue<S> c = walk_eval(g, cycle), p = walk_eval(g, path);
  S lhs = c.cost + (c.gamma - S(1)) * (p.cost + p.gamma * end_label);
  if (cmp.lt(c.gamma, S(1))) return "cycle is flow-absorbing";
  if (!cmp.lt(lhs, S(0))) return "cycle/path inequality does not hold";
  return {};
}

template <Scalar S>
std::string check_closed_path(const GainGraph<S>& g, NodeId node, const Walk& path, const S& delta,
                              const Tolerance& tol) {
  Compare<S> cmp{tol};
  if (path.empty() || path.start != node || walk_end(g, path) != node) return "path is not closed at the phase node";
  WalkValue<S> p = walk_eval(g, path);
  if (cmp.lt(p.gamma, S(1))) return "path gain below one";
  if (!cmp.lt(p.cost + p.gamma * delta - delta, S(0))) return "path does not make f negative";
  return {};
}

}  // namespace

template <Scalar S>
std::string check_certificate(const M2vpiSystem<S>& sys, const Certificate& cert, const Tolerance& tol) {
  Compare<S> cmp{tol};
  try {
    if (const auto* c = std::get_if<NegativeUnitGainCycle>(&cert)) {
      if (c->cycle.empty() || walk_end(sys, c->cycle) != c->cycle.start) return "cycle is not closed";
      WalkValue<S> v = walk_eval(sys, c->cycle);
      if (!cmp.eq(v.gamma, S(1))) return "cycle gain is not one";
      if (!cmp.lt(v.cost, S(0))) return "cycle cost is not negative";
      return {};
    }
    const auto& b = std::get<NegativeBicycle>(cert);
    if (b.generating.empty() || walk_end(sys, b.generating) != b.generating.start) return "generating walk is not closed";
    if (b.absorbing.empty() || walk_end(sys, b.absorbing) != b.absorbing.start) return "absorbing walk is not closed";
    if (b.connector.start != b.generating.start || walk_end(sys, b.connector) != b.absorbing.start) {
      return "connector does not join the two closed walks";
    }
    WalkValue<S> gen = walk_eval(sys, b.generating), con = walk_eval(sys, b.connector), abs = walk_eval(sys, b.absorbing);
    if (!cmp.gt(gen.gamma, S(1))) return "generating walk has gain <= 1";
    if (!cmp.lt(abs.gamma, S(1))) return "absorbing walk has gain >= 1";
    S lower = cycle_bound(gen);
    S upper = con.cost + con.gamma * cycle_bound(abs);
    if (!cmp.gt(lower, upper)) return "lower bound " + format_scalar(lower) + " does not exceed upper bound " + format_scalar(upper);
    return {};
  } catch (const Error& e) {
    return e.what();
  }
}

template <Scalar S>
Certificate unreverse(const M2vpiSystem<S>& reversed, const Certificate& cert) {
  if (const auto* c = std::get_if<NegativeUnitGainCycle>(&cert)) return NegativeUnitGainCycle{reverse_walk(reversed, c->cycle)};
  const auto& b = std::get<NegativeBicycle>(cert);
  return NegativeBicycle{reverse_walk(reversed, b.absorbing), reverse_walk(reversed, b.connector),
                         reverse_walk(reversed, b.generating)};
}

template <Scalar S>
std::string check_evidence(const M2vpiSystem<S>& sys, const InfeasibilityEvidence<S>& ev, const Tolerance& tol) {
  if (!ev.certificate) return "no certificate";
  if (std::string why = check_certificate(sys, *ev.certificate, tol); !why.empty()) return why;
  const M2vpiSystem<S> g = ev.in_reversed_system ? reverse_system(sys) : sys;
  try {
    if (auto* v = std::get_if<ViolatedAfterGrapevine<S>>(&ev.kind)) {
      if (!v->cycle || !v->path || !v->end_label) return "no cycle extracted";
      return check_generating_pair(g, *v->cycle, *v->path, *v->end_label, tol);
    }
    if (auto* p = std::get_if<NonContractingPath<S>>(&ev.kind)) return check_closed_path(g, p->node, p->path, p->delta, tol);
    if (auto* nr = std::get_if<NewtonNoRoot<S>>(&ev.kind)) {
      if (nr->cycle && nr->path && nr->end_label) return check_generating_pair(g, *nr->cycle, *nr->path, *nr->end_label, tol);
      if (nr->path && nr->witness.witness_value) {
        return check_closed_path(g, nr->path->start, *nr->path, nr->witness.witness_delta, tol);
      }
      return "no witness walk";
    }
    const auto& c = std::get<NegativeUnitGainCycle>(ev.kind);
    CycleInfo info = classify_cycle(g, c.cycle, tol);
    if (info.cls != CycleClass::UnitGain || !info.negative_unit_gain) return "cycle is not a negative unit-gain cycle";
    return {};
  } catch (const Error& e) {
    return e.what();
  }
}

#define FRACOPT_INSTANTIATE(S)                                                                               \
  template std::string evidence_kind(const InfeasibilityEvidence<S>&);                                       \
  template SolveOutcome<S> solve_m2vpi(const M2vpiSystem<S>&, const NewtonConfig&, const SolveOptions&);     \
  template M2vpiSystem<S> reverse_system(const M2vpiSystem<S>&);                                             \
  template struct Reduction<S>;                                                                              \
  template Reduction<S> reduce_2vpi(const Tvpi2System<S>&);                                                  \
  template RecoveryOutcome<S> recover_finite_solution(const M2vpiSystem<S>&, const NewtonConfig&);           \
  template bool satisfies(const M2vpiSystem<S>&, const Labels<S>&, const Tolerance&);                        \
  template bool satisfies(const Tvpi2System<S>&, const std::vector<S>&, const Tolerance&);                   \
  template std::string check_evidence(const M2vpiSystem<S>&, const InfeasibilityEvidence<S>&, const Tolerance&); \
  template std::string check_certificate(const M2vpiSystem<S>&, const Certificate&, const Tolerance&);          \
  template Certificate unreverse(const M2vpiSystem<S>&, const Certificate&);

FRACOPT_INSTANTIATE(Rational)
FRACOPT_INSTANTIATE(double)

}  // namespace fracopt
