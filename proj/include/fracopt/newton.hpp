#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "fracopt/numerics.hpp"

namespace fracopt {

template <Scalar S>
struct OracleReply {
  std::optional<S> value;  // nullopt encodes f(delta) = -inf
  std::optional<S> supergradient;
  // inf of the superdifferential, when the oracle can certify it (audit only).
  std::optional<S> right_derivative;

  static OracleReply neg_inf() { return {}; }
  static OracleReply finite(S v, S g) { return {std::move(v), std::move(g), std::nullopt}; }
  bool is_finite() const { return value.has_value(); }
};

template <Scalar S>
using ConcaveOracle = std::function<OracleReply<S>(const S&)>;

enum class Method { Standard, LookAhead };

std::string method_name(Method m);

struct NewtonConfig {
  Method method = Method::LookAhead;
  std::optional<std::size_t> max_iters;
  Tolerance tol;
  bool check_contract = false;

  static constexpr std::size_t kHardLimit = 1'000'000;

  std::size_t iteration_limit(std::size_t instance_size) const {
    if (max_iters) return *max_iters;
    return instance_size == 0 ? kHardLimit : 10 * instance_size;
  }
};

template <Scalar S>
struct IterateRecord {
  S delta;
  S value;
  S supergradient;
  bool lookahead_attempted = false;
  bool lookahead_successful = false;
  std::optional<S> right_derivative;
};

template <Scalar S>
using NewtonTrace = std::vector<IterateRecord<S>>;

template <Scalar S>
struct Root {
  S delta;
};

template <Scalar S>
struct NoRoot {
  S witness_delta;
  std::optional<S> witness_value;  // nullopt = -inf
  std::optional<S> witness_supergradient;
};

template <Scalar S>
struct NewtonResult {
  std::variant<Root<S>, NoRoot<S>> outcome;
  NewtonTrace<S> trace;
  std::size_t oracle_calls = 0;

  bool found_root() const { return std::holds_alternative<Root<S>>(outcome); }
  const S& root() const { return std::get<Root<S>>(outcome).delta; }
  const NoRoot<S>& no_root() const { return std::get<NoRoot<S>>(outcome); }
  std::size_t iterations() const { return trace.size(); }
};

template <Scalar S>
NewtonResult<S> solve_root(const ConcaveOracle<S>& oracle, const S& delta1, const S& g1,
                           const NewtonConfig& cfg, std::size_t instance_size = 0);

// Same as solve_root when f(delta1) is already known to the caller.
template <Scalar S>
NewtonResult<S> solve_root_from(const ConcaveOracle<S>& oracle, const S& delta1, const S& f1, const S& g1,
                                const NewtonConfig& cfg, std::size_t instance_size = 0,
                                std::optional<S> right1 = std::nullopt);

template <Scalar S>
S bregman_divergence(const S& f_at, const S& f_at_star, const S& slope, const S& delta, const S& delta_star);

template <Scalar S>
struct BregmanReference {
  S delta_star;
  S value_at_star;
  std::vector<std::optional<S>> slopes;  // one per trace record
};

template <Scalar S>
BregmanReference<S> bregman_reference_from(const NewtonTrace<S>& trace);

template <Scalar S>
std::vector<std::string> verify_trace(const NewtonTrace<S>& trace, const NewtonConfig& cfg,
                                      const std::optional<BregmanReference<S>>& bregman = std::nullopt);

template <Scalar S>
void write_trace_csv(std::ostream& os, const NewtonTrace<S>& trace, bool header = true);

}  // namespace fracopt
