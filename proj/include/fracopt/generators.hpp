#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fracopt/io.hpp"

namespace fracopt {

// mt19937_64 is fully specified by the standard; the draws below avoid the
// library-specific distributions so streams match across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t below(std::uint64_t bound);
  long range(long lo, long hi);  // inclusive
  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }
  template <typename T>
  const T& pick(std::span<const T> items) {
    return items[below(items.size())];
  }

 private:
  std::mt19937_64 eng_;
};

// Derived stream for the k-th instance of a suite.
std::uint64_t instance_seed(std::uint64_t base, std::uint64_t k);

struct M2vpiGenParams {
  std::size_t max_n = 6;
  std::size_t max_m = 12;
  long cost_lo = -5;
  long cost_hi = 5;
};

struct TvpiGenParams {
  std::size_t max_n = 5;
  std::size_t max_m = 8;
  long coef_abs = 3;
  long rhs_abs = 5;
};

struct DmdpGenParams {
  std::size_t max_n = 6;
  std::size_t max_out = 3;
  long cost_lo = -5;
  long cost_hi = 5;
  std::uint64_t plant_num = 1;  // chance of a planted negative unit-gain cycle
  std::uint64_t plant_den = 5;
};

struct SfmGenParams {
  std::size_t max_n = 10;
};

struct MinRatioGenParams {
  std::size_t max_m = 12;
  std::size_t max_domain = 200;
};

template <Scalar S>
M2vpiSystem<S> random_m2vpi(Rng& rng, const M2vpiGenParams& p = {});
template <Scalar S>
Tvpi2System<S> random_2vpi(Rng& rng, const TvpiGenParams& p = {});
template <Scalar S>
GainGraph<S> random_dmdp(Rng& rng, const DmdpGenParams& p = {});
template <Scalar S>
SfmInstance<S> random_sfm(Rng& rng, const SfmGenParams& p = {});
template <Scalar S>
MinRatioInstance<S> random_min_ratio(Rng& rng, const MinRatioGenParams& p = {});

}  // namespace fracopt
