#pragma once

// Phase loop shared by the M2VPI and DMDP solvers.

#include <algorithm>
#include <variant>
#include <vector>

#include "fracopt/errors.hpp"
#include "fracopt/m2vpi.hpp"

namespace fracopt::detail {

template <Scalar S>
struct GrapevineUpdate {
  DualUpdateResult<S> operator()(const SplitGraph<S>& split, const Labels<S>& y, const S& delta,
                                 const Tolerance& tol) const {
    return update_dual(split, y, delta, tol);
  }
};

inline Walk to_original(const Walk& w, const std::vector<ArcId>& origin) {
  Walk r{w.start, {}};
  r.arcs.reserve(w.arcs.size());
  for (ArcId e : w.arcs) r.arcs.push_back(origin[e]);
  return r;
}

template <Scalar S>
Labels<S> first_n(const Labels<S>& y, std::size_t n) {
  return Labels<S>(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
}

// Value/supergradient oracle of one phase. Every query restarts from the
// labels of the closest finite evaluation above it, so rejected look-ahead
// probes and -inf answers never leak into later queries.
template <Scalar S, class Update>
class PhaseOracle {
 public:
  PhaseOracle(const SplitGraph<S>& split, const S& delta1, Labels<S> labels1, const Walk& path1,
              const Tolerance& tol, bool audit, PhaseRecord<S>& rec, const Update& update)
      : split_(split), tol_(tol), audit_(audit), rec_(rec), update_(update) {
    Entry e{delta1, std::move(labels1), {}, path1, false};
    e.reply = reply_for(e);
    entries_.push_back(std::move(e));
    record(entries_.back());
  }

  OracleReply<S> operator()(const S& delta) {
    const Entry* anchor = nullptr;
    for (const Entry& e : entries_) {
      if (e.delta == delta) return e.reply;
    }
    for (const Entry& e : entries_) {
      if (delta < e.delta && (!anchor || e.delta < anchor->delta)) anchor = &e;
    }
    if (!anchor) throw ContractViolation("oracle queried above every evaluated point");
    DualUpdateResult<S> r = update_(split_, anchor->labels, delta, tol_);
    if (auto* bad = std::get_if<DualInfeasible<S>>(&r)) {
      last_infeasible_ = std::move(*bad);
      last_infeasible_delta_ = delta;
      if (audit_) rec_.evaluations.push_back({delta, false, std::nullopt, std::nullopt, std::nullopt, {}, false});
      return OracleReply<S>::neg_inf();
    }
    auto& up = std::get<DualUpdated<S>>(r);
    Entry e{delta, std::move(up.labels), {}, std::move(up.path), up.reaches_split};
    e.reply = reply_for(e);
    entries_.push_back(std::move(e));
    record(entries_.back());
    return entries_.back().reply;
  }

  const Labels<S>& labels_at(const S& delta) const { return find(delta).labels; }
  const Walk& path_at(const S& delta) const { return find(delta).path; }
  const std::optional<DualInfeasible<S>>& last_infeasible() const { return last_infeasible_; }
  const std::optional<S>& last_infeasible_delta() const { return last_infeasible_delta_; }

 private:
  struct Entry {
    S delta;
    Labels<S> labels;
    OracleReply<S> reply;
    Walk path;
    bool reaches_split;
  };

  OracleReply<S> reply_for(Entry& e) {
    OracleReply<S> r;
    r.value = e.labels[split_.u].value() - e.delta;
    r.supergradient = supergradient_of(split_, e.path, &e.reaches_split);
    if (audit_) r.right_derivative = tight_right_derivative(split_, e.labels, tol_);
    return r;
  }

  void record(const Entry& e) {
    if (!audit_) return;
    rec_.evaluations.push_back(
        {e.delta, true, e.reply.value, e.reply.supergradient, e.reply.right_derivative, e.path, e.reaches_split});
  }

  const Entry& find(const S& delta) const {
    for (const Entry& e : entries_) {
      if (e.delta == delta) return e;
    }
    throw ContractViolation("no evaluation recorded at delta=" + format_scalar(delta));
  }

  const SplitGraph<S>& split_;
  Tolerance tol_;
  bool audit_;
  PhaseRecord<S>& rec_;
  const Update& update_;
  std::vector<Entry> entries_;
  std::optional<DualInfeasible<S>> last_infeasible_;
  std::optional<S> last_infeasible_delta_;
};

template <Scalar S>
struct CoreResult {
  std::variant<Labels<S>, Infeasible<S>> result;
  std::vector<PhaseRecord<S>> phases;
};

template <Scalar S, class Update>
CoreResult<S> run_phases(const M2vpiSystem<S>& sys, const NewtonConfig& cfg, const SolveOptions& opts,
                         const Update& update) {
  const std::size_t n = sys.node_count();
  const Tolerance& tol = cfg.tol;
  Compare<S> cmp{tol};
  CoreResult<S> out{infinite_labels<S>(n), {}};
  Labels<S>& y = std::get<Labels<S>>(out.result);
  std::vector<ArcId> active;
  auto fail = [&](NodeId u, auto evidence, std::optional<Certificate> cert) {
    out.result = Infeasible<S>{u, InfeasibilityEvidence<S>{std::move(evidence), false, std::move(cert)}};
    return out;
  };
  auto witness_in = [&](const GainGraph<S>& h, const std::vector<ArcId>& origin, const Labels<S>& labels,
                        NodeId v) -> std::optional<AbsorbingWitness> {
    auto w = tight_absorbing_witness(h, labels, v, tol);
    if (!w) return std::nullopt;
    return AbsorbingWitness{to_original(w->path, origin), to_original(w->cycle, origin)};
  };
  // `lower` is a closed walk at a; `connector` runs from a to the start of `upper`.
  auto certify = [&](const Walk& lower, const Walk& connector,
                     const std::optional<AbsorbingWitness>& upper) -> std::optional<Certificate> {
    if (lower.empty()) return std::nullopt;
    if (cmp.eq(walk_eval(sys, lower).gamma, S(1))) return NegativeUnitGainCycle{lower};
    if (!upper) return std::nullopt;
    return NegativeBicycle{lower, concat(connector, upper->path), upper->cycle};
  };

  for (NodeId u = 0; u < n; ++u) {
    const std::vector<ArcId> prev_active = active;
    const Labels<S> y_prev = y;
    for (ArcId e : sys.out_arcs(u)) active.push_back(e);
    std::sort(active.begin(), active.end());
    const GainGraph<S> gk = sys.subgraph(active);
    out.phases.push_back({});
    PhaseRecord<S>& rec = out.phases.back();
    rec.node = u;
    rec.arc_count = active.size();

    ExtScalar<S> yu = ExtScalar<S>::infinity();
    std::optional<ArcId> argmin;
    for (ArcId e : sys.out_arcs(u)) {
      const Arc<S>& a = sys.arc(e);
      ExtScalar<S> via = ext_add_mul(a.cost, a.gamma, y[a.head]);
      if (via.is_finite() && (yu.is_infinite() || cmp.lt(via.value(), yu.value()))) argmin = e;
      yu = ext_min(yu, via, cmp);
    }
    // Closed walk at u bounding y_u from above by delta1.
    std::optional<AbsorbingWitness> top;
    if (yu.is_infinite()) {
      if (auto c = find_flow_absorbing_cycle(gk, u, tol)) {
        yu = cycle_bound(walk_eval(gk, *c));
        rec.seeded_by_cycle = true;
        top = AbsorbingWitness{Walk{u, {}}, to_original(*c, active)};
      }
    } else if (argmin) {
      const NodeId w = sys.arc(*argmin).head;
      if (auto wt = witness_in(sys.subgraph(prev_active), prev_active, y_prev, w)) {
        top = AbsorbingWitness{concat(Walk{u, {*argmin}}, wt->path), wt->cycle};
      }
    }
    y[u] = yu;
    if (yu.is_infinite()) continue;

    const SplitGraph<S> split = split_at(gk, u);
    Labels<S> ybar = y;
    ybar.push_back(yu);
    GrapevineOutput<S> gv = grapevine(split.graph, std::move(ybar), u, tol, n);
    if (auto e = find_violated_arc(split.graph, gv.labels, tol)) {
      ViolatedAfterGrapevine<S> ev{active[*e], first_n(gv.labels, n), std::nullopt, std::nullopt, std::nullopt};
      std::optional<Certificate> cert;
      if (auto parts = decompose_violation(split.graph, gv.pred, *e)) {
        ev.cycle = to_original(parts->first, active);
        NodeId end = walk_end(split.graph, parts->second);
        ev.path = to_original(parts->second, active);
        if (gv.labels[end].is_finite()) ev.end_label = gv.labels[end].value();
        std::optional<AbsorbingWitness> upper = top;
        if (end != split.u_prime) upper = witness_in(sys.subgraph(prev_active), prev_active, y_prev, end);
        cert = certify(*ev.cycle, *ev.path, upper);
      }
      return fail(u, std::move(ev), std::move(cert));
    }
    const Walk& p = gv.walk;
    if (!p.empty() && cmp.ge(walk_eval(split.graph, p).gamma, S(1))) {
      Walk closed = to_original(p, active);
      auto cert = certify(closed, Walk{u, {}}, top);
      return fail(u, NonContractingPath<S>{u, std::move(closed), yu.value()}, std::move(cert));
    }

    const S delta1 = yu.value();
    const S f1 = gv.labels[u].value() - delta1;
    const S g1 = supergradient_of(split, p);
    PhaseOracle<S, Update> oracle(split, delta1, gv.labels, p, tol, opts.audit, rec, update);
    std::optional<S> right1;
    if (opts.audit) right1 = tight_right_derivative(split, gv.labels, tol);
    ConcaveOracle<S> fn = [&oracle](const S& d) { return oracle(d); };
    NewtonResult<S> res = solve_root_from(fn, delta1, f1, g1, cfg, active.size() + n, right1);
    rec.ran_newton = true;
    rec.trace = std::move(res.trace);
    rec.oracle_calls = res.oracle_calls;
    if (!res.found_root()) {
      NewtonNoRoot<S> ev{res.no_root(), std::nullopt, std::nullopt, std::nullopt};
      // The tangent at the last iterate bounds y_u by the probed delta.
      const S last = rec.trace.back().delta;
      const Walk& last_path = oracle.path_at(last);
      std::optional<AbsorbingWitness> tangent;
      if (!last_path.empty() && walk_end(split.graph, last_path) == split.u_prime) {
        tangent = AbsorbingWitness{Walk{u, {}}, to_original(last_path, active)};
      } else {
        tangent = witness_in(split.graph, active, oracle.labels_at(last), u);
      }
      std::optional<Certificate> cert;
      if (!ev.witness.witness_value) {
        if (const auto& bad = oracle.last_infeasible()) {
          ev.cycle = to_original(bad->cycle, active);
          ev.path = to_original(bad->path, active);
          ev.end_label = bad->end_label;
          if (walk_end(split.graph, bad->path) == split.u_prime) cert = certify(*ev.cycle, *ev.path, tangent);
        }
      } else {
        ev.path = to_original(oracle.path_at(ev.witness.witness_delta), active);
        cert = certify(*ev.path, Walk{u, {}}, tangent);
      }
      return fail(u, std::move(ev), std::move(cert));
    }
    rec.root = res.root();
    if (opts.snapshots) {
      for (const auto& r : rec.trace) rec.snapshots.push_back(first_n(oracle.labels_at(r.delta), n));
    }
    y = first_n(oracle.labels_at(res.root()), n);
  }
  return out;
}

}  // namespace fracopt::detail
