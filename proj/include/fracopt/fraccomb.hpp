#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fracopt/newton.hpp"

namespace fracopt {

using Point = std::vector<std::uint8_t>;

template <Scalar S>
class DiscreteDomainOracle {
 public:
  virtual ~DiscreteDomainOracle() = default;
  virtual std::size_t dimension() const = 0;
  // Minimizer of w^T x over the domain; ties go to the largest d^T x, then
  // the lexicographically smallest x.
  virtual Point argmin(std::span<const S> w, std::span<const S> d) const = 0;
};

template <Scalar S>
class ExplicitDomainOracle : public DiscreteDomainOracle<S> {
 public:
  ExplicitDomainOracle(std::size_t m, std::vector<Point> points);

  std::size_t dimension() const override { return m_; }
  Point argmin(std::span<const S> w, std::span<const S> d) const override;
  const std::vector<Point>& points() const { return points_; }

 private:
  std::size_t m_;
  std::vector<Point> points_;
};

template <Scalar S>
ExplicitDomainOracle<S> make_subset_oracle(std::size_t m, const std::function<bool(const Point&)>& member);

template <Scalar S>
S dot(std::span<const S> w, const Point& x);

template <Scalar S>
struct MinRatioResult {
  S delta_star;
  Point witness;
  std::size_t iterations = 0;
  std::size_t oracle_calls = 0;
  NewtonTrace<S> trace;
  std::vector<Point> iterate_points;  // minimizer at each trace record
};

template <Scalar S>
MinRatioResult<S> min_ratio(const std::vector<S>& c, const std::vector<S>& d, const DiscreteDomainOracle<S>& oracle,
                            const NewtonConfig& cfg);

}  // namespace fracopt
