#include "fracopt/newton.hpp"

#include <sstream>

#include "fracopt/errors.hpp"

namespace fracopt {

std::string method_name(Method m) { return m == Method::LookAhead ? "lookahead" : "standard"; }

namespace {

template <Scalar S>
struct Evaluation {
  S delta, value, g;
};

template <Scalar S>
class ContractChecker {
 public:
  explicit ContractChecker(const NewtonConfig& cfg) : enabled_(cfg.check_contract), cmp_{cfg.tol} {}

  void record(const S& delta, const OracleReply<S>& r) {
    if (!enabled_ || !r.value) return;
    Evaluation<S> e{delta, *r.value, *r.supergradient};
    for (const auto& o : seen_) {
      // Each point's supergradient line must dominate the other value.
      if (cmp_.gt(e.value, o.value + o.g * (e.delta - o.delta)) ||
          cmp_.gt(o.value, e.value + e.g * (o.delta - e.delta))) {
        throw OracleContractViolation("concavity witness fails between delta=" + format_scalar(o.delta) +
                                      " and delta=" + format_scalar(e.delta));
      }
    }
    seen_.push_back(std::move(e));
  }

 private:
  bool enabled_;
  Compare<S> cmp_;
  std::vector<Evaluation<S>> seen_;
};

}  // namespace

template <Scalar S>
NewtonResult<S> solve_root(const ConcaveOracle<S>& oracle, const S& delta1, const S& g1, const NewtonConfig& cfg,
                           std::size_t instance_size) {
  OracleReply<S> r = oracle(delta1);
  if (!r.value) throw PreconditionViolation("f(delta1) is -inf");
  auto res = solve_root_from(oracle, delta1, *r.value, g1, cfg, instance_size, r.right_derivative);
  ++res.oracle_calls;
  return res;
}

template <Scalar S>
NewtonResult<S> solve_root_from(const ConcaveOracle<S>& oracle, const S& delta1, const S& f1, const S& g1,
                                const NewtonConfig& cfg, std::size_t instance_size, std::optional<S> right1) {
  const Tolerance& tol = cfg.tol;
  const std::size_t limit = cfg.iteration_limit(instance_size);
  if (limit == 0) throw PreconditionViolation("max_iters must be at least 1");
  if (sign(f1, tol) == Sign::Pos) throw PreconditionViolation("f(delta1) > 0");

  NewtonResult<S> res{Root<S>{delta1}, {}, 0};
  res.trace.push_back({delta1, f1, g1, false, false, std::move(right1)});
  if (sign(f1, tol) == Sign::Zero) return res;
  if (sign(g1, tol) != Sign::Neg) throw PreconditionViolation("initial supergradient must be negative");

  ContractChecker<S> checker(cfg);
  checker.record(delta1, OracleReply<S>::finite(f1, g1));
  auto query = [&](const S& d) {
    OracleReply<S> r = oracle(d);
    ++res.oracle_calls;
    if (r.value && !r.supergradient) throw OracleContractViolation("finite value without supergradient");
    checker.record(d, r);
    return r;
  };

  while (true) {
    const IterateRecord<S>& cur = res.trace.back();
    if (sign(cur.value, tol) == Sign::Zero) {
      res.outcome = Root<S>{cur.delta};
      return res;
    }
    if (res.trace.size() >= limit) {
      throw IterationLimitExceeded("Newton iteration limit " + std::to_string(limit) + " reached");
    }
    S delta = cur.delta - cur.value / cur.supergradient;
    OracleReply<S> r = query(delta);
    if (!r.value || (sign(*r.value, tol) == Sign::Neg && sign(*r.supergradient, tol) != Sign::Neg)) {
      res.outcome = NoRoot<S>{delta, r.value, r.supergradient};
      return res;
    }
    if (sign(*r.value, tol) == Sign::Pos) {
      throw OracleContractViolation("f(delta) > 0 after a Newton step at delta=" + format_scalar(delta));
    }
    IterateRecord<S> next{delta, *r.value, *r.supergradient, false, false, r.right_derivative};
    if (cfg.method == Method::LookAhead) {
      S ahead = delta + delta - cur.delta;
      OracleReply<S> ra = query(ahead);
      next.lookahead_attempted = true;
      if (ra.value && sign(*ra.value, tol) == Sign::Neg && sign(*ra.supergradient, tol) == Sign::Neg) {
        next = {ahead, *ra.value, *ra.supergradient, true, true, ra.right_derivative};
      }
    }
    res.trace.push_back(std::move(next));
  }
}

template <Scalar S>
S bregman_divergence(const S& f_at, const S& f_at_star, const S& slope, const S& delta, const S& delta_star) {
  if (delta == delta_star) return S(0);
  return f_at + slope * (delta_star - delta) - f_at_star;
}

template <Scalar S>
BregmanReference<S> bregman_reference_from(const NewtonTrace<S>& trace) {
  BregmanReference<S> ref{trace.back().delta, trace.back().value, {}};
  for (const auto& rec : trace) ref.slopes.push_back(rec.right_derivative);
  return ref;
}

template <Scalar S>
std::vector<std::string> verify_trace(const NewtonTrace<S>& trace, const NewtonConfig& cfg,
                                      const std::optional<BregmanReference<S>>& bregman) {
  std::vector<std::string> out;
  Compare<S> cmp{cfg.tol};
  auto fail = [&](const std::string& what, std::size_t k) { out.push_back(what + " at i=" + std::to_string(k + 1)); };
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& cur = trace[k];
    if (k + 1 < trace.size() && sign(cur.supergradient, cfg.tol) != Sign::Neg) fail("supergradient not negative", k);
    if (k == 0) continue;
    const auto& prev = trace[k - 1];
    if (!cmp.lt(cur.delta, prev.delta)) fail("delta not decreasing", k);
    if (!cmp.gt(cur.value, prev.value)) fail("f not increasing", k);
    if (cmp.lt(cur.supergradient, prev.supergradient)) fail("supergradient decreasing", k);
    if (sign(cur.value, cfg.tol) == Sign::Neg && sign(prev.value, cfg.tol) == Sign::Neg &&
        sign(prev.supergradient, cfg.tol) != Sign::Zero) {
      S ratio = cur.value / prev.value + cur.supergradient / prev.supergradient;
      if (cmp.gt(ratio, S(1))) fail("ratio inequality violated", k);
    }
  }
  if (bregman && cfg.method == Method::LookAhead) {
    const auto& ref = *bregman;
    auto divergence = [&](std::size_t k) -> std::optional<S> {
      if (k >= ref.slopes.size() || !ref.slopes[k]) return std::nullopt;
      return bregman_divergence(trace[k].value, ref.value_at_star, *ref.slopes[k], trace[k].delta, ref.delta_star);
    };
    for (std::size_t k = 2; k < trace.size(); ++k) {
      auto d_now = divergence(k), d_old = divergence(k - 2);
      if (!d_now || !d_old) continue;
      if (!cmp.lt(*d_now + *d_now, *d_old)) fail("Bregman divergence not halved", k);
    }
  }
  return out;
}

template <Scalar S>
void write_trace_csv(std::ostream& os, const NewtonTrace<S>& trace, bool header) {
  if (header) os << "i,delta,f,g,lookahead_attempted,lookahead_success\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& r = trace[k];
    os << k + 1 << ',' << format_scalar(r.delta) << ',' << format_scalar(r.value) << ','
       << format_scalar(r.supergradient) << ',' << (r.lookahead_attempted ? 1 : 0) << ','
       << (r.lookahead_successful ? 1 : 0) << '\n';
  }
}

#define FRACOPT_INSTANTIATE(S)                                                                               \
  template NewtonResult<S> solve_root(const ConcaveOracle<S>&, const S&, const S&, const NewtonConfig&,      \
                                      std::size_t);                                                          \
  template NewtonResult<S> solve_root_from(const ConcaveOracle<S>&, const S&, const S&, const S&,            \
                                           const NewtonConfig&, std::size_t, std::optional<S>);              \
  template S bregman_divergence(const S&, const S&, const S&, const S&, const S&);                          \
  template BregmanReference<S> bregman_reference_from(const NewtonTrace<S>&);                               \
  template std::vector<std::string> verify_trace(const NewtonTrace<S>&, const NewtonConfig&,                 \
                                                 const std::optional<BregmanReference<S>>&);                 \
  template void write_trace_csv(std::ostream&, const NewtonTrace<S>&, bool);

FRACOPT_INSTANTIATE(Rational)
FRACOPT_INSTANTIATE(double)

}  // namespace fracopt
