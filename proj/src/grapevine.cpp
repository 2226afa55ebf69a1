#include "fracopt/grapevine.hpp"

#include <deque>
#include <unordered_map>

#include "fracopt/errors.hpp"

namespace fracopt {

template <Scalar S>
GrapevineOutput<S> grapevine(const GainGraph<S>& g, Labels<S> y0, NodeId u, const Tolerance& tol,
                             std::optional<std::size_t> rounds) {
  const std::size_t n = g.node_count();
  if (y0.size() != n) throw PreconditionViolation("label vector size does not match the graph");
  const std::size_t k = rounds.value_or(n);
  Compare<S> cmp{tol};
  GrapevineOutput<S> out{std::move(y0), Walk{u, {}}, PredTable(n, k), 0};
  Labels<S>& y = out.labels;
  for (std::size_t i = 1; i <= k; ++i) {
    Labels<S> next = y;
    for (NodeId v = 0; v < n; ++v) {
      std::optional<ArcId> arg;
      ExtScalar<S> best = ExtScalar<S>::infinity();
      for (ArcId e : g.out_arcs(v)) {
        const Arc<S>& a = g.arc(e);
        ExtScalar<S> cand = ext_add_mul(a.cost, a.gamma, y[a.head]);
        if (!arg || ext_less(cand, best, cmp)) {
          best = std::move(cand);
          arg = e;
        }
      }
      if (arg && ext_less(best, y[v], cmp)) {
        next[v] = std::move(best);
        out.pred.set(v, i, *arg);
      }
    }
    y = std::move(next);
    ++out.rounds_run;
  }
  if (k > 0) out.walk = trace_walk(g, out.pred, u, k);
  return out;
}

template <Scalar S>
Walk trace_walk(const GainGraph<S>& g, const PredTable& pred, NodeId from, std::size_t level) {
  Walk w{from, {}};
  NodeId x = from;
  while (level > 0) {
    std::optional<ArcId> e;
    while (level > 0 && !(e = pred.at(x, level))) --level;
    if (!e) break;
    w.arcs.push_back(*e);
    x = g.arc(*e).head;
    --level;
  }
  return w;
}

template <Scalar S>
std::optional<std::pair<Walk, Walk>> decompose_violation(const GainGraph<S>& g, const PredTable& pred,
                                                         ArcId violated) {
  const Arc<S>& first = g.arc(violated);
  Walk r = trace_walk(g, pred, first.head, pred.rounds());
  std::vector<ArcId> arcs{violated};
  arcs.insert(arcs.end(), r.arcs.begin(), r.arcs.end());
  std::vector<NodeId> nodes{first.tail};
  for (ArcId e : arcs) nodes.push_back(g.arc(e).head);
  // Scan from the end; the first node seen twice closes the cycle.
  std::unordered_map<NodeId, std::size_t> later;
  for (std::size_t i = nodes.size(); i-- > 0;) {
    auto it = later.find(nodes[i]);
    if (it == later.end()) {
      later.emplace(nodes[i], i);
      continue;
    }
    std::size_t j = it->second;
    Walk cycle{nodes[i], std::vector<ArcId>(arcs.begin() + static_cast<std::ptrdiff_t>(i),
                                            arcs.begin() + static_cast<std::ptrdiff_t>(j))};
    Walk path{nodes[j], std::vector<ArcId>(arcs.begin() + static_cast<std::ptrdiff_t>(j), arcs.end())};
    return std::make_pair(std::move(cycle), std::move(path));
  }
  return std::nullopt;
}

template <Scalar S>
S supergradient_of(const SplitGraph<S>& split, const Walk& p, bool* reaches_split) {
  bool reaches = !p.empty() && walk_end(split.graph, p) == split.u_prime;
  if (reaches_split) *reaches_split = reaches;
  if (!reaches) return S(-1);
  return walk_eval(split.graph, p).gamma - S(1);
}

template <Scalar S>
DualUpdateResult<S> update_dual(const SplitGraph<S>& split, Labels<S> y, const S& delta, const Tolerance& tol) {
  const GainGraph<S>& g = split.graph;
  const std::size_t n = g.node_count() - 1;
  if (y.size() == n) y.push_back(ExtScalar<S>(delta));
  if (y.size() != n + 1) throw PreconditionViolation("label vector size does not match the split graph");
  y[split.u_prime] = delta;
  GrapevineOutput<S> gv = grapevine(g, std::move(y), split.u, tol, n);
  if (auto e = find_violated_arc(g, gv.labels, tol)) {
    auto parts = decompose_violation(g, gv.pred, *e);
    if (!parts) throw ContractViolation("violated arc but the traced walk has no cycle");
    auto& [cycle, path] = *parts;
    Compare<S> cmp{tol};
    if (!cmp.gt(walk_eval(g, cycle).gamma, S(1))) {
      throw ContractViolation("decomposed cycle is not flow-generating; input labels were not dual optimal");
    }
    NodeId end = walk_end(g, path);
    S end_label = gv.labels[end].is_finite() ? gv.labels[end].value() : delta;
    return DualInfeasible<S>{*e, std::move(cycle), std::move(path), std::move(end_label), std::move(gv.labels)};
  }
  DualUpdated<S> up{std::move(gv.labels), std::move(gv.walk), false, S(0)};
  up.supergradient = supergradient_of(split, up.path, &up.reaches_split);
  return up;
}

template <Scalar S>
bool reaches_absorbing_cycle(const GainGraph<S>& g, NodeId from, const std::vector<bool>& allowed,
                             const Tolerance& tol) {
  const std::size_t n = g.node_count();
  std::vector<bool> seen(n, false);
  std::deque<NodeId> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    for (ArcId e : g.out_arcs(v)) {
      if (!allowed[e] || seen[g.arc(e).head]) continue;
      seen[g.arc(e).head] = true;
      queue.push_back(g.arc(e).head);
    }
  }
  // Multiplicative Bellman-Ford from all reachable nodes: products keep
  // shrinking past n rounds iff a cycle with gain below one exists.
  Compare<S> cmp{tol};
  std::vector<std::optional<S>> p(n);
  for (NodeId v = 0; v < n; ++v) {
    if (seen[v]) p[v] = S(1);
  }
  for (std::size_t round = 0; round <= n; ++round) {
    std::vector<std::optional<S>> next = p;
    bool changed = false;
    for (ArcId e = 0; e < g.arc_count(); ++e) {
      const Arc<S>& a = g.arc(e);
      if (!allowed[e] || !seen[a.tail]) continue;
      S cand = a.gamma * *p[a.head];
      if (cmp.lt(cand, *next[a.tail])) {
        next[a.tail] = std::move(cand);
        changed = true;
      }
    }
    if (!changed) return false;
    p = std::move(next);
  }
  return true;
}

template <Scalar S>
std::optional<S> tight_right_derivative(const SplitGraph<S>& split, const Labels<S>& z, const Tolerance& tol) {
  const GainGraph<S>& g = split.graph;
  const std::size_t n = g.node_count();
  Compare<S> cmp{tol};
  std::vector<bool> tight(g.arc_count());
  for (ArcId e = 0; e < g.arc_count(); ++e) tight[e] = is_tight(g.arc(e), z, cmp);
  if (reaches_absorbing_cycle(g, split.u, tight, tol)) return S(-1);
  std::vector<std::optional<S>> best(n), next;
  best[split.u] = S(1);
  std::optional<S> to_split;
  for (std::size_t k = 1; k < n; ++k) {
    next.assign(n, std::nullopt);
    for (ArcId e = 0; e < g.arc_count(); ++e) {
      const Arc<S>& a = g.arc(e);
      if (!tight[e] || !best[a.tail]) continue;
      S cand = *best[a.tail] * a.gamma;
      if (!next[a.head] || cmp.lt(cand, *next[a.head])) next[a.head] = std::move(cand);
    }
    best = std::move(next);
    if (best[split.u_prime] && (!to_split || cmp.lt(*best[split.u_prime], *to_split))) to_split = best[split.u_prime];
  }
  if (!to_split) return std::nullopt;
  return *to_split - S(1);
}

#define FRACOPT_INSTANTIATE(S)                                                                                 \
  template GrapevineOutput<S> grapevine(const GainGraph<S>&, Labels<S>, NodeId, const Tolerance&,              \
                                        std::optional<std::size_t>);                                           \
  template Walk trace_walk(const GainGraph<S>&, const PredTable&, NodeId, std::size_t);                        \
  template std::optional<std::pair<Walk, Walk>> decompose_violation(const GainGraph<S>&, const PredTable&,     \
                                                                    ArcId);                                    \
  template S supergradient_of(const SplitGraph<S>&, const Walk&, bool*);                                       \
  template DualUpdateResult<S> update_dual(const SplitGraph<S>&, Labels<S>, const S&, const Tolerance&);       \
  template bool reaches_absorbing_cycle(const GainGraph<S>&, NodeId, const std::vector<bool>&, const Tolerance&); \
  template std::optional<S> tight_right_derivative(const SplitGraph<S>&, const Labels<S>&, const Tolerance&);

FRACOPT_INSTANTIATE(Rational)
FRACOPT_INSTANTIATE(double)

}  // namespace fracopt
