#include "fracopt/gaingraph.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "fracopt/errors.hpp"

namespace fracopt {

template <Scalar S>
ArcId GainGraph<S>::add_arc(NodeId tail, NodeId head, S gamma, S cost) {
  if (tail >= node_count() || head >= node_count()) {
    throw PreconditionViolation("arc endpoint out of range: " + std::to_string(tail) + " -> " + std::to_string(head));
  }
  if (!(S(0) < gamma)) throw PreconditionViolation("gain factor must be positive");
  arcs_.push_back({tail, head, std::move(gamma), std::move(cost)});
  ArcId id = arcs_.size() - 1;
  out_[tail].push_back(id);
  in_[head].push_back(id);
  return id;
}

template <Scalar S>
GainGraph<S> GainGraph<S>::subgraph(std::span<const ArcId> ids) const {
  GainGraph<S> h(node_count());
  for (ArcId e : ids) {
    const Arc<S>& a = arc(e);
    h.add_arc(a.tail, a.head, a.gamma, a.cost);
  }
  return h;
}

template <Scalar S>
WalkValue<S> walk_eval(const GainGraph<S>& g, const Walk& p) {
  WalkValue<S> v{S(0), S(1)};
  NodeId at = p.start;
  if (at >= g.node_count()) throw MalformedWalk("walk starts outside the graph");
  for (ArcId e : p.arcs) {
    if (e >= g.arc_count()) throw MalformedWalk("unknown arc id " + std::to_string(e));
    const Arc<S>& a = g.arc(e);
    if (a.tail != at) throw MalformedWalk("arc " + std::to_string(e) + " does not leave node " + std::to_string(at));
    v.cost += v.gamma * a.cost;
    v.gamma *= a.gamma;
    at = a.head;
  }
  return v;
}

template <Scalar S>
NodeId walk_end(const GainGraph<S>& g, const Walk& p) {
  return p.arcs.empty() ? p.start : g.arc(p.arcs.back()).head;
}

template <Scalar S>
std::vector<NodeId> walk_nodes(const GainGraph<S>& g, const Walk& p) {
  std::vector<NodeId> nodes{p.start};
  for (ArcId e : p.arcs) nodes.push_back(g.arc(e).head);
  return nodes;
}

template <Scalar S>
CycleInfo classify_cycle(const GainGraph<S>& g, const Walk& c, const Tolerance& tol) {
  if (c.empty()) throw NotACycle("empty walk");
  WalkValue<S> v = walk_eval(g, c);
  std::vector<NodeId> nodes = walk_nodes(g, c);
  if (nodes.back() != c.start) throw NotACycle("walk is not closed");
  std::vector<NodeId> inner(nodes.begin(), nodes.end() - 1);
  std::sort(inner.begin(), inner.end());
  if (std::adjacent_find(inner.begin(), inner.end()) != inner.end()) throw NotACycle("walk repeats a node");
  switch (sign(S(v.gamma - S(1)), tol)) {
    case Sign::Pos:
      return {CycleClass::FlowGenerating, false};
    case Sign::Neg:
      return {CycleClass::FlowAbsorbing, false};
    default:
      return {CycleClass::UnitGain, sign(v.cost, tol) == Sign::Neg};
  }
}

template <Scalar S>
Walk rotate_cycle(const GainGraph<S>& g, const Walk& c, NodeId v) {
  for (std::size_t i = 0; i < c.arcs.size(); ++i) {
    if (g.arc(c.arcs[i]).tail == v) {
      Walk r{v, {}};
      r.arcs.insert(r.arcs.end(), c.arcs.begin() + static_cast<std::ptrdiff_t>(i), c.arcs.end());
      r.arcs.insert(r.arcs.end(), c.arcs.begin(), c.arcs.begin() + static_cast<std::ptrdiff_t>(i));
      return r;
    }
  }
  throw NotACycle("node " + std::to_string(v) + " is not on the cycle");
}

namespace {

// Loop-erases a closed walk at u that does not revisit u internally.
template <Scalar S>
Walk erase_loops(const GainGraph<S>& g, NodeId u, std::span<const ArcId> arcs) {
  std::vector<ArcId> kept;
  std::vector<NodeId> nodes{u};
  std::unordered_map<NodeId, std::size_t> pos{{u, 0}};
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    NodeId y = g.arc(arcs[i]).head;
    if (i + 1 == arcs.size()) {
      kept.push_back(arcs[i]);
      break;
    }
    if (auto it = pos.find(y); it != pos.end()) {
      std::size_t p = it->second;
      for (std::size_t k = p + 1; k < nodes.size(); ++k) pos.erase(nodes[k]);
      nodes.resize(p + 1);
      kept.resize(p);
    } else {
      kept.push_back(arcs[i]);
      pos[y] = nodes.size();
      nodes.push_back(y);
    }
  }
  return Walk{u, std::move(kept)};
}

}  // namespace

template <Scalar S>
std::optional<Walk> find_flow_absorbing_cycle(const GainGraph<S>& g, NodeId u, const Tolerance& tol) {
  const std::size_t n = g.node_count();
  Compare<S> cmp{tol};
  std::vector<std::vector<std::optional<S>>> best(n + 1, std::vector<std::optional<S>>(n));
  std::vector<std::vector<ArcId>> parent(n + 1, std::vector<ArcId>(n, 0));
  best[0][u] = S(1);
  for (std::size_t k = 1; k <= n; ++k) {
    for (ArcId e = 0; e < g.arc_count(); ++e) {
      const Arc<S>& a = g.arc(e);
      if (!best[k - 1][a.tail]) continue;
      S cand = *best[k - 1][a.tail] * a.gamma;
      if (!best[k][a.head] || cmp.lt(cand, *best[k][a.head])) {
        best[k][a.head] = std::move(cand);
        parent[k][a.head] = e;
      }
    }
    if (!best[k][u] || !cmp.lt(*best[k][u], S(1))) continue;
    std::vector<ArcId> closed(k);
    NodeId x = u;
    for (std::size_t level = k; level > 0; --level) {
      ArcId e = parent[level][x];
      closed[level - 1] = e;
      x = g.arc(e).tail;
    }
    std::size_t seg_begin = 0;
    for (std::size_t i = 0; i < closed.size(); ++i) {
      if (g.arc(closed[i]).head != u) continue;
      Walk c = erase_loops(g, u, std::span<const ArcId>(closed).subspan(seg_begin, i + 1 - seg_begin));
      seg_begin = i + 1;
      if (cmp.lt(walk_eval(g, c).gamma, S(1))) return c;
    }
  }
  return std::nullopt;
}

template <Scalar S>
std::vector<std::size_t> strong_components(const GainGraph<S>& g, std::size_t* count) {
  const std::size_t n = g.node_count();
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kNone), low(n, 0), comp(n, kNone);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeId> stack;
  std::size_t next_index = 0, next_comp = 0;
  struct Frame {
    NodeId v;
    std::size_t edge;
  };
  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != kNone) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      auto outs = g.out_arcs(f.v);
      if (f.edge < outs.size()) {
        NodeId w = g.arc(outs[f.edge++]).head;
        if (index[w] == kNone) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      NodeId v = f.v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      if (low[v] == index[v]) {
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = next_comp;
        } while (w != v);
        ++next_comp;
      }
    }
  }
  if (count) *count = next_comp;
  return comp;
}

template <Scalar S>
std::optional<Walk> detect_negative_unit_gain_cycle(const GainGraph<S>& g, const Tolerance& tol) {
  const std::size_t n = g.node_count();
  if (n == 0 || g.arc_count() == 0) return std::nullopt;
  Compare<S> cmp{tol};
  Labels<S> y = infinite_labels<S>(n);
  bool all_unit = std::all_of(g.arcs().begin(), g.arcs().end(), [&](const Arc<S>& a) { return cmp.eq(a.gamma, S(1)); });
  if (all_unit) {
    std::fill(y.begin(), y.end(), ExtScalar<S>(S(0)));
  } else {
    std::size_t ncomp = 0;
    auto comp = strong_components(g, &ncomp);
    std::vector<bool> sink(ncomp, true), seeded(ncomp, false);
    for (const auto& a : g.arcs()) {
      if (comp[a.tail] != comp[a.head]) sink[comp[a.tail]] = false;
    }
    for (NodeId v = 0; v < n; ++v) {
      if (sink[comp[v]] && !seeded[comp[v]]) {
        y[v] = S(0);
        seeded[comp[v]] = true;
      }
    }
  }

  constexpr ArcId kNone = static_cast<ArcId>(-1);
  std::vector<ArcId> parent(n, kNone);
  auto round = [&] {
    Labels<S> next = y;
    for (ArcId e = 0; e < g.arc_count(); ++e) {
      const Arc<S>& a = g.arc(e);
      ExtScalar<S> cand = ext_add_mul(a.cost, a.gamma, y[a.head]);
      if (ext_less(cand, next[a.tail], cmp)) {
        next[a.tail] = std::move(cand);
        parent[a.tail] = e;
      }
    }
    y = std::move(next);
  };
  auto extract = [&](ArcId violated) -> std::optional<Walk> {
    std::vector<ArcId> par = parent;
    par[g.arc(violated).tail] = violated;
    NodeId x = g.arc(violated).tail;
    for (std::size_t step = 0; step < n; ++step) {
      if (par[x] == kNone) return std::nullopt;
      x = g.arc(par[x]).head;
    }
    Walk c{x, {}};
    NodeId at = x;
    do {
      if (par[at] == kNone || c.arcs.size() > n) return std::nullopt;
      c.arcs.push_back(par[at]);
      at = g.arc(par[at]).head;
    } while (at != x);
    try {
      CycleInfo info = classify_cycle(g, c, tol);
      if (info.cls == CycleClass::UnitGain && info.negative_unit_gain) return c;
    } catch (const NotACycle&) {
    }
    return std::nullopt;
  };

  for (std::size_t i = 0; i < n; ++i) round();
  const std::size_t extra = n * (n + 2);
  for (std::size_t r = 0; r <= extra; ++r) {
    bool any = false;
    for (ArcId e = 0; e < g.arc_count(); ++e) {
      if (!is_violated(g.arc(e), y, cmp)) continue;
      any = true;
      if (auto c = extract(e)) return c;
    }
    if (!any) return std::nullopt;
    round();
  }
  throw ContractViolation("labels keep decreasing but no negative unit-gain cycle could be extracted");
}

template <Scalar S>
SplitGraph<S> split_at(const GainGraph<S>& g, NodeId u) {
  const std::size_t n = g.node_count();
  if (u >= n) throw PreconditionViolation("split node out of range");
  SplitGraph<S> s{GainGraph<S>(n + 1), u, n};
  for (const Arc<S>& a : g.arcs()) s.graph.add_arc(a.tail, a.head == u ? n : a.head, a.gamma, a.cost);
  return s;
}

template <Scalar S>
std::optional<ArcId> find_violated_arc(const GainGraph<S>& g, const Labels<S>& y, const Tolerance& tol) {
  Compare<S> cmp{tol};
  for (ArcId e = 0; e < g.arc_count(); ++e) {
    if (is_violated(g.arc(e), y, cmp)) return e;
  }
  return std::nullopt;
}

template <Scalar S>
std::optional<AbsorbingWitness> tight_absorbing_witness(const GainGraph<S>& g, const Labels<S>& y, NodeId v,
                                                        const Tolerance& tol) {
  Compare<S> cmp{tol};
  std::vector<ArcId> tight;
  for (ArcId e = 0; e < g.arc_count(); ++e) {
    if (is_tight(g.arc(e), y, cmp)) tight.push_back(e);
  }
  const GainGraph<S> t = g.subgraph(tight);
  std::vector<std::optional<ArcId>> via(g.node_count());
  std::vector<bool> seen(g.node_count(), false);
  std::vector<NodeId> queue{v};
  seen[v] = true;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    NodeId w = queue[qi];
    if (auto c = find_flow_absorbing_cycle(t, w, tol)) {
      AbsorbingWitness out;
      out.cycle.start = w;
      for (ArcId e : c->arcs) out.cycle.arcs.push_back(tight[e]);
      out.path.start = v;
      for (NodeId x = w; x != v;) {
        ArcId e = tight[*via[x]];
        out.path.arcs.push_back(e);
        x = g.arc(e).tail;
      }
      std::reverse(out.path.arcs.begin(), out.path.arcs.end());
      return out;
    }
    for (ArcId e : t.out_arcs(w)) {
      NodeId h = t.arc(e).head;
      if (seen[h]) continue;
      seen[h] = true;
      via[h] = e;
      queue.push_back(h);
    }
  }
  return std::nullopt;
}

template <Scalar S>
Walk reverse_walk(const GainGraph<S>& reversed, const Walk& w) {
  Walk r{walk_end(reversed, w), {}};
  r.arcs.assign(w.arcs.rbegin(), w.arcs.rend());
  return r;
}

Walk concat(const Walk& a, const Walk& b) {
  Walk r = a;
  r.arcs.insert(r.arcs.end(), b.arcs.begin(), b.arcs.end());
  return r;
}

#define FRACOPT_INSTANTIATE(S)                                                                      \
  template class GainGraph<S>;                                                                      \
  template WalkValue<S> walk_eval(const GainGraph<S>&, const Walk&);                                \
  template NodeId walk_end(const GainGraph<S>&, const Walk&);                                       \
  template std::vector<NodeId> walk_nodes(const GainGraph<S>&, const Walk&);                        \
  template CycleInfo classify_cycle(const GainGraph<S>&, const Walk&, const Tolerance&);            \
  template Walk rotate_cycle(const GainGraph<S>&, const Walk&, NodeId);                             \
  template std::optional<Walk> find_flow_absorbing_cycle(const GainGraph<S>&, NodeId, const Tolerance&); \
  template std::vector<std::size_t> strong_components(const GainGraph<S>&, std::size_t*);           \
  template std::optional<Walk> detect_negative_unit_gain_cycle(const GainGraph<S>&, const Tolerance&); \
  template SplitGraph<S> split_at(const GainGraph<S>&, NodeId);                                     \
  template std::optional<ArcId> find_violated_arc(const GainGraph<S>&, const Labels<S>&, const Tolerance&); \
  template std::optional<AbsorbingWitness> tight_absorbing_witness(const GainGraph<S>&, const Labels<S>&, NodeId, \
                                                                   const Tolerance&);                    \
  template Walk reverse_walk(const GainGraph<S>&, const Walk&);

FRACOPT_INSTANTIATE(Rational)
FRACOPT_INSTANTIATE(double)

}  // namespace fracopt
