#include "fracopt/dmdp.hpp"

#include <deque>
#include <queue>

#include "fracopt/errors.hpp"
#include "phase_loop.hpp"

namespace fracopt {

template <Scalar S>
DmdpInstance<S> DmdpInstance<S>::make(GainGraph<S> g) {
  for (const Arc<S>& a : g.arcs()) {
    if (!(S(0) < a.gamma) || S(1) < a.gamma) throw PreconditionViolation("discount factor outside (0, 1]");
  }
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.out_arcs(v).empty()) throw PreconditionViolation("node " + std::to_string(v) + " has no outgoing arc");
  }
  return DmdpInstance(std::move(g));
}

template <Scalar S>
RelabelResult<S> dijkstra_relabel(const GainGraph<S>& g, NodeId t, const Labels<S>& y, const S& alpha,
                                  const Tolerance& tol, bool check_heap_order) {
  const std::size_t n = g.node_count();
  Compare<S> cmp{tol};
  if (y.size() != n) throw PreconditionViolation("label vector size does not match the graph");
  if (!g.out_arcs(t).empty()) throw PreconditionViolation("target has outgoing arcs");
  if (y[t].is_infinite() || !cmp.lt(alpha, y[t].value())) throw PreconditionViolation("alpha must be below y_t");
  for (const Arc<S>& a : g.arcs()) {
    if (S(1) < a.gamma) throw PreconditionViolation("discount factor above one");
    if (y[a.tail].is_finite() && y[a.head].is_finite() &&
        cmp.lt(a.cost + a.gamma * y[a.head].value() - y[a.tail].value(), S(0))) {
      throw PreconditionViolation("negative reduced cost on an input arc");
    }
  }

  Labels<S> base = y;
  base[t] = alpha;
  std::vector<S> z(n, S(0));
  std::vector<bool> done(n, false);
  RelabelResult<S> out{{}, {t, std::vector<std::optional<ArcId>>(n), {}, {}}};
  using Entry = std::pair<S, NodeId>;
  auto later = [](const Entry& a, const Entry& b) { return b.first < a.first || (a.first == b.first && b.second < a.second); };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> heap(later);
  heap.push({S(0), t});
  while (!heap.empty()) {
    auto [key, w] = heap.top();
    heap.pop();
    if (done[w] || key != z[w]) continue;
    done[w] = true;
    if (check_heap_order && !out.tree.extraction_keys.empty()) {
      const S& prev = out.tree.extraction_keys.back();
      bool ok = out.tree.extraction_keys.size() == 1 ? cmp.lt(key, prev) : cmp.le(prev, key) && cmp.lt(key, S(0));
      if (!ok) throw ContractViolation("heap order violated during relabeling");
    }
    out.tree.extraction_order.push_back(w);
    out.tree.extraction_keys.push_back(key);
    for (ArcId e : g.in_arcs(w)) {
      const Arc<S>& a = g.arc(e);
      NodeId v = a.tail;
      if (done[v] || base[v].is_infinite() || base[w].is_infinite()) continue;
      S reduced = a.cost + a.gamma * base[w].value() - base[v].value();
      S cand = reduced + a.gamma * z[w];
      if (cmp.lt(cand, z[v])) {
        z[v] = cand;
        out.tree.pred[v] = e;
        heap.push({z[v], v});
      }
    }
  }
  out.labels = base;
  for (NodeId v = 0; v < n; ++v) {
    if (base[v].is_finite()) out.labels[v] = base[v].value() + z[v];
  }
  return out;
}

namespace {

template <Scalar S>
struct DijkstraUpdate {
  DualUpdateResult<S> operator()(const SplitGraph<S>& split, const Labels<S>& y, const S& delta,
                                 const Tolerance& tol) const {
    RelabelResult<S> r = dijkstra_relabel(split.graph, split.u_prime, y, delta, tol, true);
    DualUpdated<S> up{std::move(r.labels), Walk{split.u, {}}, false, S(-1)};
    if (r.tree.pred[split.u]) {
      NodeId at = split.u;
      while (at != split.u_prime) {
        ArcId e = *r.tree.pred[at];
        up.path.arcs.push_back(e);
        at = split.graph.arc(e).head;
      }
    }
    up.supergradient = supergradient_of(split, up.path, &up.reaches_split);
    return up;
  }
};

}  // namespace

template <Scalar S>
Policy extract_policy(const GainGraph<S>& g, const Labels<S>& y, const Tolerance& tol) {
  const std::size_t n = g.node_count();
  Compare<S> cmp{tol};
  std::vector<ArcId> tight_ids;
  for (ArcId e = 0; e < g.arc_count(); ++e) {
    if (is_tight(g.arc(e), y, cmp)) tight_ids.push_back(e);
  }
  GainGraph<S> t = g.subgraph(tight_ids);
  std::size_t ncomp = 0;
  auto comp = strong_components(t, &ncomp);
  constexpr ArcId kNone = static_cast<ArcId>(-1);
  std::vector<ArcId> choice(n, kNone);
  std::deque<NodeId> frontier;
  std::vector<bool> comp_done(ncomp, false);
  for (ArcId e = 0; e < t.arc_count(); ++e) {
    const Arc<S>& a = t.arc(e);
    if (comp[a.tail] != comp[a.head] || comp_done[comp[a.tail]] || !cmp.lt(a.gamma, S(1))) continue;
    comp_done[comp[a.tail]] = true;
    // Close the absorbing arc into a cycle inside its component.
    std::vector<ArcId> via(n, kNone);
    std::vector<bool> seen(n, false);
    std::deque<NodeId> q{a.head};
    seen[a.head] = true;
    while (!q.empty() && !seen[a.tail]) {
      NodeId v = q.front();
      q.pop_front();
      for (ArcId f : t.out_arcs(v)) {
        NodeId w = t.arc(f).head;
        if (seen[w] || comp[w] != comp[a.tail]) continue;
        seen[w] = true;
        via[w] = f;
        q.push_back(w);
      }
    }
    choice[a.tail] = tight_ids[e];
    frontier.push_back(a.tail);
    for (NodeId w = a.tail; w != a.head;) {
      ArcId f = via[w];
      NodeId v = t.arc(f).tail;
      if (choice[v] == kNone) {
        choice[v] = tight_ids[f];
        frontier.push_back(v);
      }
      w = v;
    }
  }
  while (!frontier.empty()) {
    NodeId w = frontier.front();
    frontier.pop_front();
    for (ArcId f : t.in_arcs(w)) {
      NodeId v = t.arc(f).tail;
      if (choice[v] != kNone) continue;
      choice[v] = tight_ids[f];
      frontier.push_back(v);
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (choice[v] != kNone) continue;
    if (y[v].is_finite()) throw ContractViolation("no tight policy arc at node " + std::to_string(v));
    if (g.out_arcs(v).empty()) throw PreconditionViolation("node without outgoing arc");
    choice[v] = g.out_arcs(v).front();
  }
  return Policy{std::move(choice)};
}

template <Scalar S>
std::optional<Labels<S>> evaluate_policy(const GainGraph<S>& g, const Policy& policy, const Tolerance& tol) {
  const std::size_t n = g.node_count();
  Compare<S> cmp{tol};
  Labels<S> out = infinite_labels<S>(n);
  for (NodeId v = 0; v < n; ++v) {
    std::vector<std::size_t> pos(n, n);
    std::vector<ArcId> arcs;
    NodeId at = v;
    while (pos[at] == n) {
      pos[at] = arcs.size();
      arcs.push_back(policy.choice.at(at));
      at = g.arc(arcs.back()).head;
    }
    Walk lead{v, std::vector<ArcId>(arcs.begin(), arcs.begin() + static_cast<std::ptrdiff_t>(pos[at]))};
    Walk cycle{at, std::vector<ArcId>(arcs.begin() + static_cast<std::ptrdiff_t>(pos[at]), arcs.end())};
    WalkValue<S> q = walk_eval(g, lead), c = walk_eval(g, cycle);
    if (cmp.lt(c.gamma, S(1))) {
      out[v] = q.cost + q.gamma * cycle_bound(c);
    } else if (cmp.lt(c.cost, S(0))) {
      return std::nullopt;
    }
  }
  return out;
}

template <Scalar S>
DmdpOutcome<S> solve_dmdp(const DmdpInstance<S>& inst, const NewtonConfig& cfg, const SolveOptions& opts) {
  const GainGraph<S>& g = inst.graph();
  Compare<S> cmp{cfg.tol};
  DmdpOutcome<S> out{NegativeUnitGainCycle{}, {}};
  std::vector<ArcId> unit;
  for (ArcId e = 0; e < g.arc_count(); ++e) {
    if (cmp.eq(g.arc(e).gamma, S(1))) unit.push_back(e);
  }
  if (auto c = detect_negative_unit_gain_cycle(g.subgraph(unit), cfg.tol)) {
    out.result = NegativeUnitGainCycle{detail::to_original(*c, unit)};
    return out;
  }
  detail::CoreResult<S> core = detail::run_phases(g, cfg, opts, DijkstraUpdate<S>{});
  out.phases = std::move(core.phases);
  if (std::holds_alternative<Infeasible<S>>(core.result)) {
    throw ContractViolation("phase loop reported infeasibility after the unit-gain precheck passed");
  }
  Labels<S> y = std::get<Labels<S>>(std::move(core.result));
  Policy p = extract_policy(g, y, cfg.tol);
  out.result = DmdpSolution<S>{std::move(y), std::move(p)};
  return out;
}

#define FRACOPT_INSTANTIATE(S)                                                                               \
  template class DmdpInstance<S>;                                                                            \
  template RelabelResult<S> dijkstra_relabel(const GainGraph<S>&, NodeId, const Labels<S>&, const S&,        \
                                             const Tolerance&, bool);                                        \
  template DmdpOutcome<S> solve_dmdp(const DmdpInstance<S>&, const NewtonConfig&, const SolveOptions&);      \
  template Policy extract_policy(const GainGraph<S>&, const Labels<S>&, const Tolerance&);                   \
  template std::optional<Labels<S>> evaluate_policy(const GainGraph<S>&, const Policy&, const Tolerance&);

FRACOPT_INSTANTIATE(Rational)
FRACOPT_INSTANTIATE(double)

}  // namespace fracopt
