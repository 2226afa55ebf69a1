#pragma once

#include <initializer_list>
#include <tuple>

#include "fracopt/generators.hpp"
#include "fracopt/m2vpi.hpp"

namespace unit {

using Q = fracopt::Rational;
using fracopt::ArcId;
using fracopt::NodeId;

inline Q frac(long p, long q = 1) { return Q(p, q); }

// (tail, head, gamma, cost)
inline fracopt::GainGraph<Q> graph(std::size_t n, std::initializer_list<std::tuple<NodeId, NodeId, Q, Q>> arcs) {
  fracopt::GainGraph<Q> g(n);
  for (const auto& [t, h, gamma, c] : arcs) g.add_arc(t, h, gamma, c);
  return g;
}

inline fracopt::Walk walk(NodeId start, std::initializer_list<ArcId> arcs) { return fracopt::Walk{start, arcs}; }

inline fracopt::NewtonConfig config(fracopt::Method m = fracopt::Method::LookAhead) {
  fracopt::NewtonConfig cfg;
  cfg.method = m;
  return cfg;
}

}  // namespace unit
