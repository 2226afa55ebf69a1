#include <doctest.h>

#include <algorithm>

#include "fracopt/errors.hpp"
#include "fracopt/m2vpi.hpp"
#include "oracles/fm.hpp"
#include "support.hpp"

using namespace fracopt;
using unit::frac;
using unit::graph;
using unit::Q;

namespace {

using L = ExtScalar<Q>;

bool le(const L& a, const L& b) { return b.is_infinite() || (a.is_finite() && a.value() <= b.value()); }

bool has_arc(const M2vpiSystem<Q>& g, NodeId t, NodeId h, const Q& gamma, const Q& cost) {
  return std::any_of(g.arcs().begin(), g.arcs().end(), [&](const Arc<Q>& a) {
    return a.tail == t && a.head == h && a.gamma == gamma && a.cost == cost;
  });
}

std::string outcome_key(const SolveOutcome<Q>& r) {
  std::string s;
  if (r.feasible()) {
    for (const auto& y : r.labels()) s += y.str() + " ";
  } else {
    s = "infeasible@" + std::to_string(r.infeasible().phase) + ":" + evidence_kind(r.infeasible().evidence);
  }
  for (const auto& p : r.phases) {
    s += "|";
    for (const auto& t : p.trace) s += t.delta.str() + ";";
  }
  return s;
}

}  // namespace

TEST_SUITE("m2vpi") {
  TEST_CASE("two-variable example") {
    auto sys = graph(2, {{0, 1, Q(1), Q(0)}, {1, 0, frac(1, 2), Q(-1)}});
    for (Method m : {Method::Standard, Method::LookAhead}) {
      auto r = solve_m2vpi(sys, unit::config(m));
      REQUIRE(r.feasible());
      CHECK(r.labels() == Labels<Q>{L(Q(-2)), L(Q(-2))});
    }
  }

  TEST_CASE("negative unit-gain two-cycle") {
    auto sys = graph(2, {{0, 1, Q(1), Q(-1)}, {1, 0, Q(1), Q(-1)}});
    auto r = solve_m2vpi(sys, unit::config());
    REQUIRE_FALSE(r.feasible());
    const auto& ev = r.infeasible().evidence;
    REQUIRE(ev.certificate);
    CHECK(std::holds_alternative<NegativeUnitGainCycle>(*ev.certificate));
    CHECK(check_evidence(sys, ev).empty());
  }

  TEST_CASE("no constraints") {
    auto r = solve_m2vpi(M2vpiSystem<Q>(3), unit::config());
    REQUIRE(r.feasible());
    for (const auto& y : r.labels()) CHECK(y.is_infinite());
  }

  TEST_CASE("certificates are checked arithmetically") {
    auto sys = graph(2, {{0, 1, Q(1), Q(-1)}, {1, 0, Q(1), Q(-1)}, {0, 0, Q(2), Q(0)}, {1, 1, frac(1, 2), Q(0)}});
    CHECK(check_certificate<Q>(sys, NegativeUnitGainCycle{unit::walk(0, {0, 1})}).empty());
    CHECK_FALSE(check_certificate<Q>(sys, NegativeUnitGainCycle{unit::walk(0, {0})}).empty());
    // y_0 >= 0 from the generating loop, y_0 <= -1 + y_1 <= -1 from the path and absorbing loop.
    NegativeBicycle b{unit::walk(0, {2}), unit::walk(0, {0}), unit::walk(1, {3})};
    CHECK(check_certificate<Q>(sys, b).empty());
    NegativeBicycle weak{unit::walk(0, {2}), unit::walk(0, {}), unit::walk(0, {2})};
    CHECK_FALSE(check_certificate<Q>(sys, weak).empty());
  }

  TEST_CASE("reverse_system") {
    auto sys = graph(2, {{0, 1, Q(2), Q(3)}, {1, 0, Q(1), Q(4)}});
    auto r = reverse_system(sys);
    CHECK(r.arc(0).tail == 1);
    CHECK(r.arc(0).head == 0);
    CHECK(r.arc(0).gamma == frac(1, 2));
    CHECK(r.arc(0).cost == frac(3, 2));
    CHECK(r.arc(1).gamma == Q(1));
    CHECK(r.arc(1).cost == Q(4));
    auto back = reverse_system(r);
    for (ArcId e = 0; e < sys.arc_count(); ++e) {
      CHECK(back.arc(e).tail == sys.arc(e).tail);
      CHECK(back.arc(e).head == sys.arc(e).head);
      CHECK(back.arc(e).gamma == sys.arc(e).gamma);
      CHECK(back.arc(e).cost == sys.arc(e).cost);
    }
  }

  TEST_CASE("reversed system bounds the negated variables") {
    Rng rng(41);
    for (int k = 0; k < 150; ++k) {
      auto sys = random_m2vpi<Q>(rng);
      auto fm = oracle::from_m2vpi(sys);
      if (!fm.feasible()) continue;
      auto r = solve_m2vpi(reverse_system(sys), unit::config(), SolveOptions{false, false, false});
      REQUIRE(r.feasible());
      for (NodeId v = 0; v < sys.node_count(); ++v) {
        auto lo = fm.min_of(v);
        if (lo) {
          CHECK(r.labels()[v] == L(-*lo));
        } else {
          CHECK(r.labels()[v].is_infinite());
        }
      }
    }
  }

  TEST_CASE("2VPI reduction rows") {
    Tvpi2System<Q> same{2, {{Q(1), 0, Q(1), 1, Q(4)}}};
    auto a = reduce_2vpi(same).system;
    CHECK(a.arc_count() == 2);
    CHECK(has_arc(a, 0, 3, Q(1), Q(4)));
    CHECK(has_arc(a, 1, 2, Q(1), Q(4)));
    Tvpi2System<Q> mixed{2, {{Q(1), 0, Q(-2), 1, Q(3)}}};
    auto b = reduce_2vpi(mixed).system;
    CHECK(has_arc(b, 0, 1, Q(2), Q(3)));
    CHECK(has_arc(b, 3, 2, frac(1, 2), frac(3, 2)));
    Tvpi2System<Q> trivial_ok{1, {{Q(0), 0, Q(0), 0, Q(1)}}};
    CHECK(reduce_2vpi(trivial_ok).system.arc_count() == 0);
    Tvpi2System<Q> trivial_bad{1, {{Q(0), 0, Q(0), 0, Q(-1)}}};
    CHECK_THROWS_AS(reduce_2vpi(trivial_bad), InfeasibleTrivialRow);
  }

  TEST_CASE("2VPI reduction is equivalent on random points") {
    Rng rng(42);
    for (int k = 0; k < 200; ++k) {
      auto sys = random_2vpi<Q>(rng);
      Reduction<Q> red;
      try {
        red = reduce_2vpi(sys);
      } catch (const InfeasibleTrivialRow&) {
        continue;
      }
      for (int t = 0; t < 10; ++t) {
        std::vector<Q> y, yy;
        for (std::size_t i = 0; i < sys.n; ++i) y.push_back(frac(rng.range(-6, 6), rng.range(1, 3)));
        yy = y;
        for (const Q& v : y) yy.push_back(-v);
        Labels<Q> lifted;
        for (const Q& v : yy) lifted.push_back(L(v));
        CHECK(satisfies(sys, y) == satisfies(red.system, lifted));
        CHECK(red.back_map(yy) == y);
        std::vector<Q> pq;
        Labels<Q> pq_labels;
        for (std::size_t i = 0; i < 2 * sys.n; ++i) {
          pq.push_back(frac(rng.range(-6, 6), rng.range(1, 3)));
          pq_labels.push_back(L(pq.back()));
        }
        if (satisfies(red.system, pq_labels)) CHECK(satisfies(sys, red.back_map(pq)));
      }
    }
  }

  TEST_CASE("finite recovery") {
    auto two_var = graph(2, {{0, 1, Q(1), Q(0)}, {1, 0, frac(1, 2), Q(-1)}});
    auto r = recover_finite_solution(two_var, unit::config());
    REQUIRE(r.feasible());
    CHECK(r.point() == std::vector<Q>{Q(-2), Q(-2)});
    auto free = recover_finite_solution(M2vpiSystem<Q>(1), unit::config());
    REQUIRE(free.feasible());
    CHECK(free.point() == std::vector<Q>{Q(0)});
    // negative unit-gain cycle on {2,3}, unrelated to the absorbing pair {0,1}
    auto hidden = graph(4, {{0, 1, Q(1), Q(0)}, {1, 0, frac(1, 2), Q(0)}, {2, 3, Q(1), Q(-1)}, {3, 2, Q(1), Q(-1)}});
    CHECK_FALSE(recover_finite_solution(hidden, unit::config()).feasible());
  }

  TEST_CASE("random instances: invariants") {
    Rng rng(43);
    SolveOptions opts;
    opts.audit = true;
    opts.snapshots = true;
    for (int k = 0; k < 250; ++k) {
      auto sys = random_m2vpi<Q>(rng);
      const std::size_t n = sys.node_count();
      auto want = oracle::max_point(oracle::from_m2vpi(sys), n);
      auto la = solve_m2vpi(sys, unit::config(Method::LookAhead), opts);
      auto st = solve_m2vpi(sys, unit::config(Method::Standard), opts);
      REQUIRE(la.feasible() == want.feasible);
      REQUIRE(st.feasible() == want.feasible);
      CHECK(outcome_key(la) == outcome_key(solve_m2vpi(sys, unit::config(Method::LookAhead), opts)));

      std::size_t it_la = 0, it_st = 0;
      for (const auto& p : la.phases) it_la += p.trace.size();
      for (const auto& p : st.phases) it_st += p.trace.size();
      CHECK(it_la <= it_st);

      if (!want.feasible) {
        CHECK(check_evidence(sys, la.infeasible().evidence).empty());
        CHECK(check_evidence(sys, st.infeasible().evidence).empty());
        CHECK_FALSE(recover_finite_solution(sys, unit::config()).feasible());
        continue;
      }
      CHECK(la.labels() == st.labels());
      Labels<Q> ymax;
      for (const auto& v : want.y) ymax.push_back(v ? L(*v) : L::infinity());
      CHECK(la.labels() == ymax);
      CHECK(satisfies(sys, la.labels()));

      // monotone labels that stay above y^max
      Labels<Q> prev(n, L::infinity());
      for (const auto& p : la.phases) {
        for (const auto& snap : p.snapshots) {
          for (NodeId v = 0; v < n; ++v) {
            CHECK(le(snap[v], prev[v]));
            CHECK(le(ymax[v], snap[v]));
          }
          prev = snap;
        }
      }

      // subpath monotonicity along accepted iterates
      for (const auto& p : la.phases) {
        std::vector<const PhaseEvaluation<Q>*> paths;
        for (const auto& t : p.trace) {
          for (const auto& e : p.evaluations) {
            if (e.finite && e.delta == t.delta && e.path_reaches_split) {
              paths.push_back(&e);
              break;
            }
          }
        }
        auto prefix_gain = [&](const Walk& w, NodeId v) -> std::optional<Q> {
          Q gain(1);
          for (ArcId e : w.arcs) {
            gain *= sys.arc(e).gamma;
            if (sys.arc(e).head == v) return gain;
          }
          return std::nullopt;
        };
        for (std::size_t i = 0; i + 1 < paths.size(); ++i) {
          for (NodeId v = 0; v < n; ++v) {
            if (v == p.node) continue;
            auto a = prefix_gain(paths[i]->path, v), b = prefix_gain(paths[i + 1]->path, v);
            if (a && b) CHECK(*a <= *b);
          }
        }
      }

      // valid inequalities along random walks
      for (int t = 0; t < 5 && sys.arc_count(); ++t) {
        Walk w{rng.below(n), {}};
        NodeId at = w.start;
        for (int s = 0; s < 6 && !sys.out_arcs(at).empty(); ++s) {
          ArcId e = sys.out_arcs(at)[rng.below(sys.out_arcs(at).size())];
          w.arcs.push_back(e);
          at = sys.arc(e).head;
        }
        if (ymax[w.start].is_infinite() || ymax[at].is_infinite()) continue;
        auto v = walk_eval(sys, w);
        CHECK(ymax[w.start].value() <= v.cost + v.gamma * ymax[at].value());
      }

      auto rec = recover_finite_solution(sys, unit::config());
      REQUIRE(rec.feasible());
      Labels<Q> point;
      for (const Q& v : rec.point()) point.push_back(L(v));
      CHECK(satisfies(sys, point));
    }
  }

  TEST_CASE("float mode agrees with rational mode") {
    Rng rng(44);
    for (int k = 0; k < 150; ++k) {
      Rng copy = rng;
      auto q = random_m2vpi<Q>(rng);
      auto d = random_m2vpi<double>(copy);
      NewtonConfig cfg;
      auto rq = solve_m2vpi(q, cfg);
      auto rd = solve_m2vpi(d, cfg);
      REQUIRE(rq.feasible() == rd.feasible());
      if (!rq.feasible()) {
        CHECK(check_evidence(d, rd.infeasible().evidence, cfg.tol).empty());
        continue;
      }
      for (NodeId v = 0; v < q.node_count(); ++v) {
        REQUIRE(rq.labels()[v].is_finite() == rd.labels()[v].is_finite());
        if (rq.labels()[v].is_finite()) {
          CHECK(rd.labels()[v].value() == doctest::Approx(rq.labels()[v].value().to_double()));
        }
      }
    }
  }
}
