#pragma once

#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "fracopt/dmdp.hpp"
#include "fracopt/fraccomb.hpp"
#include "fracopt/m2vpi.hpp"
#include "fracopt/sfm.hpp"

namespace fracopt {

template <Scalar S>
struct SfmInstance {
  std::shared_ptr<const SubmodularFn<S>> h;
  std::vector<S> a;
};

template <Scalar S>
struct MinRatioInstance {
  std::size_t m = 0;
  std::vector<S> c;
  std::vector<S> d;
  std::vector<Point> domain;
};

// Readers accept blank lines and '#' comments; errors carry line and column.
template <Scalar S>
M2vpiSystem<S> read_m2vpi(std::istream& in);
template <Scalar S>
Tvpi2System<S> read_2vpi(std::istream& in);
template <Scalar S>
GainGraph<S> read_dmdp(std::istream& in);
template <Scalar S>
SfmInstance<S> read_sfm(std::istream& in);
template <Scalar S>
MinRatioInstance<S> read_min_ratio(std::istream& in);

template <Scalar S>
void write_m2vpi(std::ostream& os, const M2vpiSystem<S>& sys);
template <Scalar S>
void write_2vpi(std::ostream& os, const Tvpi2System<S>& sys);
template <Scalar S>
void write_dmdp(std::ostream& os, const GainGraph<S>& g);
// Cut functions keep the edge format; everything else is tabulated.
template <Scalar S>
void write_sfm(std::ostream& os, const SfmInstance<S>& inst);
template <Scalar S>
void write_min_ratio(std::ostream& os, const MinRatioInstance<S>& inst);

std::string point_string(const Point& x);
std::string set_string(SetMask set, std::size_t n);
std::string walk_string(const Walk& w);

template <Scalar S>
std::string labels_string(const Labels<S>& y);

}  // namespace fracopt
