#include "fracopt/generators.hpp"

#include <algorithm>
#include <set>

namespace fracopt {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = eng_();
  } while (x >= limit);
  return x % bound;
}

long Rng::range(long lo, long hi) {
  return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

std::uint64_t instance_seed(std::uint64_t base, std::uint64_t k) {
  // splitmix64 step
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

template <Scalar S>
S frac(long num, long den) {
  return S(num) / S(den);
}

struct Ratio {
  long num;
  long den;
};

constexpr Ratio kGains[] = {{1, 3}, {1, 2}, {1, 1}, {2, 1}, {3, 1}};
constexpr Ratio kDiscounts[] = {{1, 4}, {1, 3}, {1, 2}, {2, 3}, {3, 4}, {1, 1}};

}  // namespace

template <Scalar S>
M2vpiSystem<S> random_m2vpi(Rng& rng, const M2vpiGenParams& p) {
  const std::size_t n = rng.range(1, static_cast<long>(p.max_n));
  const std::size_t m = rng.range(0, static_cast<long>(p.max_m));
  M2vpiSystem<S> sys(n);
  for (std::size_t k = 0; k < m; ++k) {
    NodeId u = rng.below(n), v = rng.below(n);
    const Ratio& g = rng.pick(std::span<const Ratio>(kGains));
    sys.add_arc(u, v, frac<S>(g.num, g.den), S(rng.range(p.cost_lo, p.cost_hi)));
  }
  return sys;
}

template <Scalar S>
Tvpi2System<S> random_2vpi(Rng& rng, const TvpiGenParams& p) {
  Tvpi2System<S> sys;
  sys.n = rng.range(1, static_cast<long>(p.max_n));
  const std::size_t m = rng.range(0, static_cast<long>(p.max_m));
  for (std::size_t k = 0; k < m; ++k) {
    TvpiRow<S> r{S(rng.range(-p.coef_abs, p.coef_abs)), rng.below(sys.n), S(rng.range(-p.coef_abs, p.coef_abs)),
                 rng.below(sys.n), S(rng.range(-p.rhs_abs, p.rhs_abs))};
    if (r.a == S(0) && r.b == S(0)) r.a = S(1);
    sys.rows.push_back(std::move(r));
  }
  return sys;
}

template <Scalar S>
GainGraph<S> random_dmdp(Rng& rng, const DmdpGenParams& p) {
  const std::size_t n = rng.range(1, static_cast<long>(p.max_n));
  GainGraph<S> g(n);
  std::vector<std::size_t> degree(n);
  for (auto& d : degree) d = rng.range(1, static_cast<long>(p.max_out));
  std::vector<std::size_t> used(n, 0);
  if (rng.chance(p.plant_num, p.plant_den)) {
    std::vector<NodeId> order(n);
    for (NodeId v = 0; v < n; ++v) order[v] = v;
    for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
    const std::size_t len = rng.range(1, static_cast<long>(std::min<std::size_t>(n, 3)));
    long total = 0;
    for (std::size_t k = 0; k < len; ++k) {
      long c = rng.range(p.cost_lo, p.cost_hi);
      if (k + 1 == len && total + c >= 0) c = -total - rng.range(1, 3);
      total += c;
      g.add_arc(order[k], order[(k + 1) % len], S(1), S(c));
      ++used[order[k]];
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    for (; used[v] < degree[v]; ++used[v]) {
      const Ratio& r = rng.pick(std::span<const Ratio>(kDiscounts));
      g.add_arc(v, rng.below(n), frac<S>(r.num, r.den), S(rng.range(p.cost_lo, p.cost_hi)));
    }
  }
  return g;
}

template <Scalar S>
SfmInstance<S> random_sfm(Rng& rng, const SfmGenParams& p) {
  const std::size_t n = rng.range(1, static_cast<long>(p.max_n));
  SfmInstance<S> inst;
  switch (rng.below(4)) {
    case 0: {
      std::vector<WeightedEdge<S>> edges;
      const std::size_t m = rng.range(0, static_cast<long>(2 * n));
      for (std::size_t k = 0; k < m; ++k) {
        edges.push_back({rng.below(n), rng.below(n), S(rng.range(0, 5))});
      }
      inst.h = std::make_shared<CutFunction<S>>(n, std::move(edges));
      break;
    }
    case 1: {
      std::vector<std::size_t> cap{static_cast<std::size_t>(rng.range(0, static_cast<long>(n)))};
      inst.h = std::make_shared<PartitionMatroidRank<S>>(n, std::vector<std::size_t>(n, 0), std::move(cap));
      break;
    }
    case 2: {
      const std::size_t blocks = rng.range(1, static_cast<long>(n));
      std::vector<std::size_t> block_of(n), cap(blocks);
      for (auto& b : block_of) b = rng.below(blocks);
      for (auto& c : cap) c = rng.range(0, 3);
      inst.h = std::make_shared<PartitionMatroidRank<S>>(n, std::move(block_of), std::move(cap));
      break;
    }
    default: {
      const std::size_t items = rng.range(1, 8);
      std::vector<S> weights;
      for (std::size_t k = 0; k < items; ++k) weights.push_back(S(rng.range(0, 5)));
      std::vector<std::vector<std::size_t>> covers(n);
      for (auto& c : covers) {
        for (std::size_t k = 0; k < items; ++k) {
          if (rng.chance(1, 3)) c.push_back(k);
        }
      }
      inst.h = std::make_shared<CoverageFunction<S>>(std::move(weights), std::move(covers));
      break;
    }
  }
  inst.a.resize(n);
  for (auto& a : inst.a) a = S(rng.range(-2, 5));
  if (std::none_of(inst.a.begin(), inst.a.end(), [](const S& x) { return S(0) < x; })) {
    inst.a[rng.below(n)] = S(rng.range(1, 5));
  }
  return inst;
}

template <Scalar S>
MinRatioInstance<S> random_min_ratio(Rng& rng, const MinRatioGenParams& p) {
  MinRatioInstance<S> inst;
  inst.m = rng.range(1, static_cast<long>(p.max_m));
  for (std::size_t i = 0; i < inst.m; ++i) inst.c.push_back(S(rng.range(-10, 10)));
  for (std::size_t i = 0; i < inst.m; ++i) inst.d.push_back(S(rng.range(1, 10)));
  const std::uint64_t nonzero = (std::uint64_t{1} << inst.m) - 1;
  const std::size_t size = rng.range(1, static_cast<long>(std::min<std::uint64_t>(nonzero, p.max_domain)));
  std::set<std::uint64_t> masks;
  while (masks.size() < size) masks.insert(1 + rng.below(nonzero));
  for (std::uint64_t mask : masks) {
    Point x(inst.m);
    for (std::size_t i = 0; i < inst.m; ++i) x[i] = (mask >> i) & 1u;
    inst.domain.push_back(std::move(x));
  }
  return inst;
}

#define FRACOPT_INSTANTIATE(S)                                                        \
  template M2vpiSystem<S> random_m2vpi<S>(Rng&, const M2vpiGenParams&);               \
  template Tvpi2System<S> random_2vpi<S>(Rng&, const TvpiGenParams&);                 \
  template GainGraph<S> random_dmdp<S>(Rng&, const DmdpGenParams&);                   \
  template SfmInstance<S> random_sfm<S>(Rng&, const SfmGenParams&);                   \
  template MinRatioInstance<S> random_min_ratio<S>(Rng&, const MinRatioGenParams&);

FRACOPT_INSTANTIATE(Rational)
FRACOPT_INSTANTIATE(double)

}  // namespace fracopt
