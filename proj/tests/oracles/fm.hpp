#pragma once

// Fourier-Motzkin elimination over exact rationals. Slow and independent of
// the solvers; only meant for n <= 6.

#include <map>
#include <optional>
#include <vector>

#include "fracopt/m2vpi.hpp"

namespace oracle {

using Q = fracopt::Rational;

struct Row {
  std::vector<Q> a;  // a . y <= c
  Q c;
};

class FourierMotzkin {
 public:
  explicit FourierMotzkin(std::size_t n) : n_(n) {}

  void add(Row r) { rows_.push_back(std::move(r)); }

  void add_two(const Q& a, std::size_t u, const Q& b, std::size_t v, const Q& c) {
    Row r{std::vector<Q>(n_, Q(0)), c};
    r.a[u] += a;
    r.a[v] += b;
    rows_.push_back(std::move(r));
  }

  bool feasible() const { return eliminate_all_but(std::nullopt).has_value(); }

  // Largest value of y_u over the system; nullopt means unbounded. Only
  // meaningful when feasible.
  std::optional<Q> max_of(std::size_t u) const {
    auto rows = eliminate_all_but(u);
    std::optional<Q> best;
    for (const auto& r : *rows) {
      if (r.a[u] > Q(0)) {
        Q b = r.c / r.a[u];
        if (!best || b < *best) best = b;
      }
    }
    return best;
  }

  std::optional<Q> min_of(std::size_t u) const {
    auto rows = eliminate_all_but(u);
    std::optional<Q> best;
    for (const auto& r : *rows) {
      if (r.a[u] < Q(0)) {
        Q b = r.c / r.a[u];
        if (!best || *best < b) best = b;
      }
    }
    return best;
  }

 private:
  // Drops rows whose coefficients are a positive multiple of another row's
  // with a weaker right-hand side. nullopt when a row reads 0 <= negative.
  static std::optional<std::vector<Row>> prune(const std::vector<Row>& rows) {
    std::map<std::vector<Q>, Q> best;
    for (const auto& r : rows) {
      std::size_t k = 0;
      while (k < r.a.size() && r.a[k] == Q(0)) ++k;
      if (k == r.a.size()) {
        if (r.c < Q(0)) return std::nullopt;
        continue;
      }
      Q scale = r.a[k].abs();
      std::vector<Q> key;
      for (const auto& x : r.a) key.push_back(x / scale);
      Q c = r.c / scale;
      auto it = best.find(key);
      if (it == best.end()) {
        best.emplace(std::move(key), std::move(c));
      } else if (c < it->second) {
        it->second = std::move(c);
      }
    }
    std::vector<Row> out;
    for (auto& [a, c] : best) out.push_back({a, c});
    return out;
  }

  std::optional<std::vector<Row>> eliminate_all_but(std::optional<std::size_t> keep) const {
    auto rows = prune(rows_);
    for (std::size_t k = 0; k < n_ && rows; ++k) {
      if (keep && *keep == k) continue;
      std::vector<Row> pos, neg, next;
      for (auto& r : *rows) {
        if (r.a[k] > Q(0)) {
          pos.push_back(std::move(r));
        } else if (r.a[k] < Q(0)) {
          neg.push_back(std::move(r));
        } else {
          next.push_back(std::move(r));
        }
      }
      for (const auto& p : pos) {
        for (const auto& q : neg) {
          Q sp = Q(1) / p.a[k], sq = Q(-1) / q.a[k];
          Row r{std::vector<Q>(n_, Q(0)), p.c * sp + q.c * sq};
          for (std::size_t j = 0; j < n_; ++j) r.a[j] = p.a[j] * sp + q.a[j] * sq;
          r.a[k] = Q(0);
          next.push_back(std::move(r));
        }
      }
      rows = prune(next);
    }
    return rows;
  }

  std::size_t n_;
  std::vector<Row> rows_;
};

inline FourierMotzkin from_m2vpi(const fracopt::M2vpiSystem<Q>& sys) {
  FourierMotzkin fm(sys.node_count());
  for (const auto& arc : sys.arcs()) fm.add_two(Q(1), arc.tail, -arc.gamma, arc.head, arc.cost);
  return fm;
}

inline FourierMotzkin from_2vpi(const fracopt::Tvpi2System<Q>& sys) {
  FourierMotzkin fm(sys.n);
  for (const auto& r : sys.rows) fm.add_two(r.a, r.u, r.b, r.v, r.c);
  return fm;
}

struct MaxPoint {
  bool feasible = false;
  std::vector<std::optional<Q>> y;  // nullopt = +inf
};

inline MaxPoint max_point(const FourierMotzkin& fm, std::size_t n) {
  MaxPoint out;
  out.feasible = fm.feasible();
  if (!out.feasible) return out;
  for (std::size_t u = 0; u < n; ++u) out.y.push_back(fm.max_of(u));
  return out;
}

}  // namespace oracle
