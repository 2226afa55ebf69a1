#include "fracopt/fraccomb.hpp"

#include <algorithm>
#include <map>

#include "fracopt/errors.hpp"

namespace fracopt {

template <Scalar S>
S dot(std::span<const S> w, const Point& x) {
  S s(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) s += w[i];
  }
  return s;
}

template <Scalar S>
ExplicitDomainOracle<S>::ExplicitDomainOracle(std::size_t m, std::vector<Point> points)
    : m_(m), points_(std::move(points)) {
  if (points_.empty()) throw EmptyDomain("domain has no points");
  for (const Point& p : points_) {
    if (p.size() != m_) throw PreconditionViolation("domain point has the wrong dimension");
  }
}

template <Scalar S>
Point ExplicitDomainOracle<S>::argmin(std::span<const S> w, std::span<const S> d) const {
  const Point* best = nullptr;
  S best_w(0), best_d(0);
  for (const Point& p : points_) {
    S pw = dot(w, p), pd = dot(d, p);
    bool better = !best || pw < best_w || (pw == best_w && (best_d < pd || (pd == best_d && p < *best)));
    if (better) {
      best = &p;
      best_w = std::move(pw);
      best_d = std::move(pd);
    }
  }
  return *best;
}

template <Scalar S>
ExplicitDomainOracle<S> make_subset_oracle(std::size_t m, const std::function<bool(const Point&)>& member) {
  if (m > 20) throw PreconditionViolation("enumeration oracle limited to m <= 20");
  std::vector<Point> pts;
  Point x(m, 0);
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    for (std::size_t i = 0; i < m; ++i) x[i] = (mask >> i) & 1u;
    if (member(x)) pts.push_back(x);
  }
  if (pts.empty()) throw EmptyDomain("membership predicate accepts no vector");
  return ExplicitDomainOracle<S>(m, std::move(pts));
}

template <Scalar S>
MinRatioResult<S> min_ratio(const std::vector<S>& c, const std::vector<S>& d, const DiscreteDomainOracle<S>& oracle,
                            const NewtonConfig& cfg) {
  const std::size_t m = oracle.dimension();
  if (c.size() != m || d.size() != m) throw PreconditionViolation("cost vectors do not match the domain dimension");
  std::map<S, Point> minimizers;
  std::size_t calls = 0;
  auto query = [&](const S& delta) {
    std::vector<S> w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = c[i] - delta * d[i];
    Point x = oracle.argmin(std::span<const S>(w), std::span<const S>(d));
    ++calls;
    S dx = dot(std::span<const S>(d), x);
    if (sign(dx, cfg.tol) != Sign::Pos) throw DomainViolation("oracle returned x with d^T x <= 0");
    return std::make_pair(std::move(x), std::move(w));
  };
  auto reply_at = [&](const S& delta) {
    auto [x, w] = query(delta);
    S dx = dot(std::span<const S>(d), x);
    OracleReply<S> r = OracleReply<S>::finite(dot(std::span<const S>(w), x), -dx);
    r.right_derivative = -dx;
    minimizers.insert_or_assign(delta, std::move(x));
    return r;
  };

  S max_c(0), min_d(0);
  bool have_d = false;
  for (std::size_t i = 0; i < m; ++i) {
    S ac = ScalarTraits<S>::abs(c[i]);
    if (max_c < ac) max_c = ac;
    if (S(0) < d[i] && (!have_d || d[i] < min_d)) {
      min_d = d[i];
      have_d = true;
    }
  }
  if (!have_d) throw DomainViolation("d has no positive entry");
  S probe = max_c * S(static_cast<long>(m)) / min_d + S(1);
  auto [x0, w0] = query(probe);
  S delta1 = dot(std::span<const S>(c), x0) / dot(std::span<const S>(d), x0);
  OracleReply<S> r1 = reply_at(delta1);

  ConcaveOracle<S> fn = [&](const S& delta) { return reply_at(delta); };
  NewtonResult<S> res = solve_root_from(fn, delta1, *r1.value, *r1.supergradient, cfg, m + 1, r1.right_derivative);
  if (!res.found_root()) throw NoRootUnexpected("fractional objective has no root; the oracle is inconsistent");
  MinRatioResult<S> out{res.root(), minimizers.at(res.root()), res.iterations(), calls, std::move(res.trace), {}};
  for (const auto& rec : out.trace) out.iterate_points.push_back(minimizers.at(rec.delta));
  return out;
}

#define FRACOPT_INSTANTIATE(S)                                                                            \
  template S dot(std::span<const S>, const Point&);                                                       \
  template class ExplicitDomainOracle<S>;                                                                 \
  template ExplicitDomainOracle<S> make_subset_oracle(std::size_t, const std::function<bool(const Point&)>&); \
  template MinRatioResult<S> min_ratio(const std::vector<S>&, const std::vector<S>&,                      \
                                       const DiscreteDomainOracle<S>&, const NewtonConfig&);

FRACOPT_INSTANTIATE(Rational)
FRACOPT_INSTANTIATE(double)

}  // namespace fracopt
