#pragma once

// Exhaustive policy enumeration for small DMDPs. Each policy is evaluated by
// walking its functional graph: from v follow chosen arcs to the first
// repeated node, splitting the walk into a path Q and a cycle C.

#include <optional>
#include <vector>

#include "fracopt/gaingraph.hpp"

namespace oracle {

using Q = fracopt::Rational;

struct PolicyValue {
  enum class Kind { Finite, PlusInf, MinusInf } kind = Kind::Finite;
  Q value;
};

inline PolicyValue evaluate_from(const fracopt::GainGraph<Q>& g, const std::vector<fracopt::ArcId>& choice,
                                 fracopt::NodeId v) {
  std::vector<int> pos(g.node_count(), -1);
  std::vector<fracopt::ArcId> walk;
  fracopt::NodeId x = v;
  while (pos[x] < 0) {
    pos[x] = static_cast<int>(walk.size());
    walk.push_back(choice[x]);
    x = g.arc(choice[x]).head;
  }
  auto eval = [&](std::size_t from, std::size_t to) {
    Q cost(0), gain(1);
    for (std::size_t k = from; k < to; ++k) {
      const auto& a = g.arc(walk[k]);
      cost += gain * a.cost;
      gain *= a.gamma;
    }
    return std::make_pair(cost, gain);
  };
  auto [pc, pg] = eval(0, pos[x]);
  auto [cc, cg] = eval(pos[x], walk.size());
  if (cg == Q(1)) {
    if (cc < Q(0)) return {PolicyValue::Kind::MinusInf, Q(0)};
    return {PolicyValue::Kind::PlusInf, Q(0)};
  }
  return {PolicyValue::Kind::Finite, pc + pg * (cc / (Q(1) - cg))};
}

struct EnumResult {
  bool negative_unit_cycle = false;
  std::vector<std::optional<Q>> values;  // nullopt = +inf
  std::size_t policies = 0;
};

// Pointwise minimum over all policies of the policy values.
inline EnumResult enumerate_policies(const fracopt::GainGraph<Q>& g) {
  const std::size_t n = g.node_count();
  EnumResult out;
  out.values.assign(n, std::nullopt);
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    std::vector<fracopt::ArcId> choice(n);
    for (std::size_t v = 0; v < n; ++v) choice[v] = g.out_arcs(v)[idx[v]];
    ++out.policies;
    for (std::size_t v = 0; v < n; ++v) {
      PolicyValue pv = evaluate_from(g, choice, v);
      if (pv.kind == PolicyValue::Kind::MinusInf) out.negative_unit_cycle = true;
      if (pv.kind == PolicyValue::Kind::Finite && (!out.values[v] || pv.value < *out.values[v])) {
        out.values[v] = pv.value;
      }
    }
    std::size_t k = 0;
    while (k < n && ++idx[k] == g.out_arcs(k).size()) idx[k++] = 0;
    if (k == n) break;
  }
  return out;
}

}  // namespace oracle
