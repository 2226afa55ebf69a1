#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fracopt/newton.hpp"

namespace fracopt {

using SetMask = std::uint32_t;  // bit i set iff element i is in the set

inline constexpr std::size_t kMaxGroundSet = 20;

template <Scalar S>
class SubmodularFn {
 public:
  virtual ~SubmodularFn() = default;
  virtual std::size_t ground_size() const = 0;
  virtual S eval(SetMask set) const = 0;
};

// Values listed in binary-counter order of the set mask.
template <Scalar S>
class TableFunction : public SubmodularFn<S> {
 public:
  TableFunction(std::size_t n, std::vector<S> values);
  std::size_t ground_size() const override { return n_; }
  S eval(SetMask set) const override { return values_.at(set); }

 private:
  std::size_t n_;
  std::vector<S> values_;
};

template <Scalar S>
struct WeightedEdge {
  std::size_t i;
  std::size_t j;
  S weight;
};

// Undirected cut: total weight of edges with exactly one endpoint in the set.
template <Scalar S>
class CutFunction : public SubmodularFn<S> {
 public:
  CutFunction(std::size_t n, std::vector<WeightedEdge<S>> edges);
  std::size_t ground_size() const override { return n_; }
  S eval(SetMask set) const override;
  const std::vector<WeightedEdge<S>>& edges() const { return edges_; }

 private:
  std::size_t n_;
  std::vector<WeightedEdge<S>> edges_;
};

// Partition matroid rank: sum over blocks of min(|S cap block|, capacity).
// A single block gives the uniform matroid.
template <Scalar S>
class PartitionMatroidRank : public SubmodularFn<S> {
 public:
  PartitionMatroidRank(std::size_t n, std::vector<std::size_t> block_of, std::vector<std::size_t> capacity);
  std::size_t ground_size() const override { return block_of_.size(); }
  S eval(SetMask set) const override;

 private:
  std::vector<std::size_t> block_of_;
  std::vector<std::size_t> capacity_;
};

// Weighted coverage: element i covers items covers[i]; value is the total
// weight of covered items.
template <Scalar S>
class CoverageFunction : public SubmodularFn<S> {
 public:
  CoverageFunction(std::vector<S> item_weights, std::vector<std::vector<std::size_t>> covers);
  std::size_t ground_size() const override { return covers_.size(); }
  S eval(SetMask set) const override;

 private:
  std::vector<S> item_weights_;
  std::vector<std::vector<std::size_t>> covers_;
};

// Exhaustive diminishing-returns check plus nonnegativity; empty on success.
template <Scalar S>
std::string check_submodular(const SubmodularFn<S>& h, const Tolerance& tol = {});

template <Scalar S>
S set_weight(const std::vector<S>& a, SetMask set);

// Lexicographic order on indicator vectors (element 0 most significant).
bool lex_less(SetMask x, SetMask y, std::size_t n);

template <Scalar S>
struct SfmMinimum {
  S value;
  SetMask set;
};

template <Scalar S>
SfmMinimum<S> sfm_minimize(const SubmodularFn<S>& h, const std::vector<S>& a, const S& delta,
                           const Tolerance& tol = {});

template <Scalar S>
struct ParamSfmResult {
  S delta_star;
  SetMask witness = 0;
  std::size_t iterations = 0;
  std::size_t sfm_calls = 0;
  NewtonTrace<S> trace;
  std::vector<SetMask> iterate_sets;
};

template <Scalar S>
ParamSfmResult<S> parametric_sfm(const SubmodularFn<S>& h, const std::vector<S>& a, const NewtonConfig& cfg);

template <Scalar S>
S bruteforce_delta_star(const SubmodularFn<S>& h, const std::vector<S>& a);

}  // namespace fracopt
