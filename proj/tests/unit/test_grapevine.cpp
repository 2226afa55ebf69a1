#include <doctest.h>

#include "fracopt/grapevine.hpp"
#include "oracles/fm.hpp"
#include "support.hpp"

using namespace fracopt;
using unit::frac;
using unit::graph;
using unit::Q;
using unit::walk;

namespace {

using L = ExtScalar<Q>;
const L kInf = L::infinity();

bool le(const L& a, const L& b) { return b.is_infinite() || (a.is_finite() && a.value() <= b.value()); }

// max y_v over the split graph with y_u' = delta; nullopt when infeasible.
std::optional<Labels<Q>> fm_labels(const SplitGraph<Q>& s, const Q& delta) {
  const std::size_t n = s.graph.node_count();
  oracle::FourierMotzkin fm(n);
  for (const auto& a : s.graph.arcs()) fm.add_two(Q(1), a.tail, -a.gamma, a.head, a.cost);
  fm.add_two(Q(1), s.u_prime, Q(0), s.u_prime, delta);
  fm.add_two(Q(-1), s.u_prime, Q(0), s.u_prime, -delta);
  if (!fm.feasible()) return std::nullopt;
  Labels<Q> out;
  for (NodeId v = 0; v < n; ++v) {
    auto top = fm.max_of(v);
    out.push_back(top ? L(*top) : kInf);
  }
  return out;
}

}  // namespace

TEST_SUITE("grapevine") {
  TEST_CASE("unit gains give Bellman-Ford distances") {
    Rng rng(31);
    for (int k = 0; k < 200; ++k) {
      const std::size_t n = rng.range(2, 7);
      GainGraph<Q> g(n);
      const std::size_t m = rng.range(0, 14);
      for (std::size_t j = 0; j < m; ++j) g.add_arc(rng.below(n), rng.below(n), Q(1), Q(rng.range(0, 9)));
      const NodeId t = rng.below(n);
      Labels<Q> y0(n, kInf);
      y0[t] = L(Q(0));
      // reference distances to t by repeated relaxation until stable
      Labels<Q> d = y0;
      for (bool changed = true; changed;) {
        changed = false;
        for (const auto& a : g.arcs()) {
          L via = ext_add_mul(a.cost, a.gamma, d[a.head]);
          if (via.is_finite() && !le(d[a.tail], via)) {
            d[a.tail] = via;
            changed = true;
          }
        }
      }
      auto out = grapevine(g, y0, 0);
      CHECK(out.rounds_run == n);
      CHECK(out.labels == d);
    }
  }

  TEST_CASE("flow-absorbing pair halves labels alternately") {
    auto g = graph(3, {{1, 2, Q(1), Q(0)}, {2, 1, frac(1, 2), Q(0)}});
    Labels<Q> y{L(Q(1)), L(Q(1)), L(Q(1))};
    Labels<Q> prev = y;
    for (std::size_t r = 1; r <= 3; ++r) {
      auto out = grapevine(g, y, 1, {}, r);
      std::size_t halved = 0;
      for (NodeId v = 1; v <= 2; ++v) {
        if (out.labels[v] != prev[v]) {
          CHECK(out.labels[v].value() * Q(2) == prev[v].value());
          ++halved;
        }
      }
      CHECK(halved == 1);
      prev = out.labels;
    }
    auto out = grapevine(g, y, 1);
    CHECK(out.labels[1].value() > Q(0));
    CHECK(out.labels[2].value() > Q(0));
    CHECK_FALSE(out.walk.empty());
  }

  TEST_CASE("fixed point leaves labels and walk alone") {
    auto g = graph(2, {{0, 1, Q(1), Q(2)}});
    Labels<Q> y{L(Q(1)), L(Q(0))};
    auto out = grapevine(g, y, 0);
    CHECK(out.labels == y);
    CHECK(out.walk.empty());
    CHECK(out.rounds_run == 2);
  }

  TEST_CASE("update_dual on a split self-loop") {
    auto s = split_at(graph(1, {{0, 0, frac(1, 2), Q(0)}}), 0);
    Labels<Q> y{L(Q(0)), L(Q(0))};
    auto r = update_dual(s, y, Q(-4));
    auto* up = std::get_if<DualUpdated<Q>>(&r);
    REQUIRE(up);
    CHECK(up->labels[0] == L(Q(-2)));
    CHECK(up->path == walk(0, {0}));
    CHECK(up->reaches_split);
    CHECK(up->supergradient == frac(-1, 2));
  }

  TEST_CASE("update_dual when u' is unreachable") {
    auto s = split_at(graph(2, {{0, 1, Q(1), Q(0)}, {1, 1, frac(1, 2), Q(0)}}), 0);
    Labels<Q> y{L(Q(0)), L(Q(0)), L(Q(0))};
    auto r = update_dual(s, y, Q(-4));
    auto* up = std::get_if<DualUpdated<Q>>(&r);
    REQUIRE(up);
    CHECK(up->supergradient == Q(-1));
    CHECK(up->labels[0] == L(Q(0)));
  }

  TEST_CASE("update_dual reports a flow-generating cycle") {
    // y_1 <= y_0, y_1 <= y_2, y_2 <= -1 + 2 y_1 forces y_1 >= 1.
    auto s = split_at(graph(3, {{1, 0, Q(1), Q(0)}, {1, 2, Q(1), Q(0)}, {2, 1, Q(2), Q(-1)}}), 0);
    Labels<Q> y{L(Q(100)), L(Q(100)), L(Q(199)), L(Q(100))};
    auto r = update_dual(s, y, Q(-10));
    auto* bad = std::get_if<DualInfeasible<Q>>(&r);
    REQUIRE(bad);
    CHECK(walk_eval(s.graph, bad->cycle).gamma == Q(2));
    CHECK(walk_end(s.graph, bad->cycle) == bad->cycle.start);
    CHECK(bad->path.start == bad->cycle.start);
  }

  TEST_CASE("update_dual matches Fourier-Motzkin") {
    Rng rng(32);
    std::size_t compared = 0;
    for (int k = 0; k < 400; ++k) {
      M2vpiGenParams p;
      p.max_n = 5;
      p.max_m = 10;
      GainGraph<Q> g = random_m2vpi<Q>(rng, p);
      const NodeId u = g.node_count() - 1;
      SplitGraph<Q> s = split_at(g, u);
      const Q delta0(20);
      auto start = fm_labels(s, delta0);
      if (!start || start->at(u).is_infinite()) continue;
      const Q delta = delta0 - Q(rng.range(1, 40));
      auto want = fm_labels(s, delta);
      auto r = update_dual(s, *start, delta);
      REQUIRE(std::holds_alternative<DualUpdated<Q>>(r) == want.has_value());
      ++compared;
      if (!want) continue;
      const auto& up = std::get<DualUpdated<Q>>(r);
      CHECK(up.labels == *want);
      CHECK_FALSE(find_violated_arc(s.graph, up.labels));
      Compare<Q> cmp{};
      for (ArcId e : up.path.arcs) CHECK(is_tight(s.graph.arc(e), up.labels, cmp));
      for (NodeId v = 0; v < start->size(); ++v) CHECK(le(up.labels[v], (*start)[v]));
      // supergradient inequality at nearby points
      const Q f0 = up.labels[u].value() - delta;
      for (long step : {-3, -1, 1, 3}) {
        Q d = delta + Q(step);
        auto at = fm_labels(s, d);
        if (!at) continue;
        CHECK(at->at(u).value() - d <= f0 + up.supergradient * Q(step));
      }
    }
    CHECK(compared > 100);
  }

  TEST_CASE("labels never increase") {
    Rng rng(33);
    for (int k = 0; k < 200; ++k) {
      GainGraph<Q> g = random_m2vpi<Q>(rng);
      Labels<Q> y;
      for (NodeId v = 0; v < g.node_count(); ++v) y.push_back(rng.chance(1, 4) ? kInf : L(Q(rng.range(-5, 5))));
      auto out = grapevine(g, y, 0);
      CHECK(out.rounds_run == g.node_count());
      for (NodeId v = 0; v < g.node_count(); ++v) CHECK(le(out.labels[v], y[v]));
      if (!find_violated_arc(g, out.labels)) {
        Compare<Q> cmp{};
        for (ArcId e : out.walk.arcs) CHECK(is_tight(g.arc(e), out.labels, cmp));
      }
    }
  }
}
