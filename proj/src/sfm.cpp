#include "fracopt/sfm.hpp"

#include <map>

#include "fracopt/errors.hpp"

namespace fracopt {

namespace {

void check_size(std::size_t n) {
  if (n > kMaxGroundSet) {
    throw GroundSetTooLarge("ground set of size " + std::to_string(n) + " exceeds " + std::to_string(kMaxGroundSet));
  }
}

}  // namespace

template <Scalar S>
TableFunction<S>::TableFunction(std::size_t n, std::vector<S> values) : n_(n), values_(std::move(values)) {
  check_size(n);
  if (values_.size() != (std::size_t{1} << n)) throw PreconditionViolation("table needs 2^n values");
}

template <Scalar S>
CutFunction<S>::CutFunction(std::size_t n, std::vector<WeightedEdge<S>> edges) : n_(n), edges_(std::move(edges)) {
  check_size(n);
  for (const auto& e : edges_) {
    if (e.i >= n || e.j >= n) throw PreconditionViolation("cut edge endpoint out of range");
    if (e.weight < S(0)) throw PreconditionViolation("cut edge weight must be nonnegative");
  }
}

template <Scalar S>
S CutFunction<S>::eval(SetMask set) const {
  S total(0);
  for (const auto& e : edges_) {
    if (((set >> e.i) & 1u) != ((set >> e.j) & 1u)) total += e.weight;
  }
  return total;
}

template <Scalar S>
PartitionMatroidRank<S>::PartitionMatroidRank(std::size_t n, std::vector<std::size_t> block_of,
                                              std::vector<std::size_t> capacity)
    : block_of_(std::move(block_of)), capacity_(std::move(capacity)) {
  check_size(n);
  if (block_of_.size() != n) throw PreconditionViolation("every element needs a block");
  for (std::size_t b : block_of_) {
    if (b >= capacity_.size()) throw PreconditionViolation("unknown block");
  }
}

template <Scalar S>
S PartitionMatroidRank<S>::eval(SetMask set) const {
  std::vector<std::size_t> count(capacity_.size(), 0);
  for (std::size_t i = 0; i < block_of_.size(); ++i) {
    if ((set >> i) & 1u) ++count[block_of_[i]];
  }
  long r = 0;
  for (std::size_t b = 0; b < capacity_.size(); ++b) r += static_cast<long>(std::min(count[b], capacity_[b]));
  return S(r);
}

template <Scalar S>
CoverageFunction<S>::CoverageFunction(std::vector<S> item_weights, std::vector<std::vector<std::size_t>> covers)
    : item_weights_(std::move(item_weights)), covers_(std::move(covers)) {
  check_size(covers_.size());
  for (const auto& w : item_weights_) {
    if (w < S(0)) throw PreconditionViolation("coverage weights must be nonnegative");
  }
  for (const auto& c : covers_) {
    for (std::size_t item : c) {
      if (item >= item_weights_.size()) throw PreconditionViolation("unknown coverage item");
    }
  }
}

template <Scalar S>
S CoverageFunction<S>::eval(SetMask set) const {
  std::vector<bool> covered(item_weights_.size(), false);
  for (std::size_t i = 0; i < covers_.size(); ++i) {
    if (!((set >> i) & 1u)) continue;
    for (std::size_t item : covers_[i]) covered[item] = true;
  }
  S total(0);
  for (std::size_t k = 0; k < covered.size(); ++k) {
    if (covered[k]) total += item_weights_[k];
  }
  return total;
}

template <Scalar S>
std::string check_submodular(const SubmodularFn<S>& h, const Tolerance& tol) {
  const std::size_t n = h.ground_size();
  check_size(n);
  Compare<S> cmp{tol};
  std::vector<S> v;
  v.reserve(std::size_t{1} << n);
  for (SetMask s = 0; s < (SetMask{1} << n); ++s) v.push_back(h.eval(s));
  if (sign(v[0], tol) != Sign::Zero) return "h(empty) is not zero";
  for (SetMask s = 0; s < (SetMask{1} << n); ++s) {
    if (cmp.lt(v[s], S(0))) return "negative value at set mask " + std::to_string(s);
    for (std::size_t i = 0; i < n; ++i) {
      if ((s >> i) & 1u) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if ((s >> j) & 1u) continue;
        SetMask si = s | (SetMask{1} << i), sj = s | (SetMask{1} << j), sij = si | sj;
        if (cmp.lt(v[si] + v[sj], v[s] + v[sij])) {
          return "diminishing returns fails at set mask " + std::to_string(s) + " with elements " + std::to_string(i) +
                 ", " + std::to_string(j);
        }
      }
    }
  }
  return {};
}

template <Scalar S>
S set_weight(const std::vector<S>& a, SetMask set) {
  S total(0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((set >> i) & 1u) total += a[i];
  }
  return total;
}

bool lex_less(SetMask x, SetMask y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    unsigned bx = (x >> i) & 1u, by = (y >> i) & 1u;
    if (bx != by) return bx < by;
  }
  return false;
}

template <Scalar S>
SfmMinimum<S> sfm_minimize(const SubmodularFn<S>& h, const std::vector<S>& a, const S& delta, const Tolerance& tol) {
  const std::size_t n = h.ground_size();
  check_size(n);
  if (a.size() != n) throw PreconditionViolation("weight vector size does not match the ground set");
  Compare<S> cmp{tol};
  SfmMinimum<S> best{h.eval(0), 0};
  S best_a(0);
  for (SetMask s = 1; s < (SetMask{1} << n); ++s) {
    S as = set_weight(a, s);
    S val = h.eval(s) - delta * as;
    bool better = cmp.lt(val, best.value) ||
                  (cmp.eq(val, best.value) && (cmp.lt(best_a, as) || (cmp.eq(as, best_a) && lex_less(s, best.set, n))));
    if (better) {
      best = {std::move(val), s};
      best_a = std::move(as);
    }
  }
  return best;
}

template <Scalar S>
ParamSfmResult<S> parametric_sfm(const SubmodularFn<S>& h, const std::vector<S>& a, const NewtonConfig& cfg) {
  const std::size_t n = h.ground_size();
  check_size(n);
  if (a.size() != n) throw PreconditionViolation("weight vector size does not match the ground set");
  if (cfg.check_contract && n <= 12) {
    if (std::string why = check_submodular(h, cfg.tol); !why.empty()) throw PreconditionViolation(why);
  }
  std::optional<S> delta1;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(S(0) < a[i])) continue;
    S r = h.eval(SetMask{1} << i) / a[i];
    if (!delta1 || r < *delta1) delta1 = r;
  }
  if (!delta1) throw PreconditionViolation("no positive weight");

  std::map<S, SetMask> minimizers;
  std::size_t calls = 0;
  auto reply_at = [&](const S& delta) {
    SfmMinimum<S> m = sfm_minimize(h, a, delta, cfg.tol);
    ++calls;
    S as = set_weight(a, m.set);
    OracleReply<S> r = OracleReply<S>::finite(m.value, -as);
    r.right_derivative = -as;
    minimizers.insert_or_assign(delta, m.set);
    return r;
  };
  OracleReply<S> r1 = reply_at(*delta1);
  ConcaveOracle<S> fn = [&](const S& delta) { return reply_at(delta); };
  NewtonResult<S> res = solve_root_from(fn, *delta1, *r1.value, *r1.supergradient, cfg, 2 * n * n + 2 * n + 4,
                                        r1.right_derivative);
  if (!res.found_root()) throw NoRootUnexpected("parametric SFM function has no root");
  ParamSfmResult<S> out{res.root(), minimizers.at(res.root()), res.iterations(), calls, std::move(res.trace), {}};
  for (const auto& rec : out.trace) out.iterate_sets.push_back(minimizers.at(rec.delta));
  return out;
}

template <Scalar S>
S bruteforce_delta_star(const SubmodularFn<S>& h, const std::vector<S>& a) {
  const std::size_t n = h.ground_size();
  check_size(n);
  std::optional<S> best;
  for (SetMask s = 1; s < (SetMask{1} << n); ++s) {
    S as = set_weight(a, s);
    if (!(S(0) < as)) continue;
    S r = h.eval(s) / as;
    if (!best || r < *best) best = r;
  }
  if (!best) throw PreconditionViolation("no set with positive weight");
  return *best;
}

#define FRACOPT_INSTANTIATE(S)                                                                        \
  template class TableFunction<S>;                                                                    \
  template class CutFunction<S>;                                                                      \
  template class PartitionMatroidRank<S>;                                                             \
  template class CoverageFunction<S>;                                                                 \
  template std::string check_submodular(const SubmodularFn<S>&, const Tolerance&);                    \
  template S set_weight(const std::vector<S>&, SetMask);                                              \
  template SfmMinimum<S> sfm_minimize(const SubmodularFn<S>&, const std::vector<S>&, const S&,        \
                                      const Tolerance&);                                              \
  template ParamSfmResult<S> parametric_sfm(const SubmodularFn<S>&, const std::vector<S>&, const NewtonConfig&); \
  template S bruteforce_delta_star(const SubmodularFn<S>&, const std::vector<S>&);

FRACOPT_INSTANTIATE(Rational)
FRACOPT_INSTANTIATE(double)

}  // namespace fracopt
