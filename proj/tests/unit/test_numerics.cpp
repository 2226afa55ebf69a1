#include <doctest.h>

#include "fracopt/numerics.hpp"
#include "support.hpp"

using namespace fracopt;
using unit::frac;
using unit::Q;

TEST_SUITE("numerics") {
  TEST_CASE("ext_add_mul") {
    CHECK(ext_add_mul(Q(3), Q(2), ExtScalar<Q>(Q(1))) == ExtScalar<Q>(Q(5)));
    CHECK(ext_add_mul(Q(-1), frac(1, 2), ExtScalar<Q>::infinity()).is_infinite());
    CHECK(ext_add_mul(Q(0), Q(1), ExtScalar<Q>(Q(-2))) == ExtScalar<Q>(Q(-2)));
  }

  TEST_CASE("sign") {
    CHECK(sign(Q(0)) == Sign::Zero);
    CHECK(sign(frac(-3, 7)) == Sign::Neg);
    CHECK(sign(frac(1, 1000000000) * frac(1, 1000000000)) == Sign::Pos);
    Tolerance tol;
    tol.eps_zero = 1e-9;
    CHECK(sign(1e-15, tol) == Sign::Zero);
    CHECK(sign(-1e-3, tol) == Sign::Neg);
    CHECK(sign(2.0, tol) == Sign::Pos);
  }

  TEST_CASE("rational parsing and formatting") {
    CHECK(Q::parse("3") == Q(3));
    CHECK(Q::parse("-6/4") == frac(-3, 2));
    CHECK(Q::parse("-1.25") == frac(-5, 4));
    CHECK(Q::parse("3e-2") == frac(3, 100));
    CHECK(Q::parse("+.5") == frac(1, 2));
    CHECK(Q::parse("2E3") == Q(2000));
    CHECK(frac(4, -6).str() == "-2/3");
    CHECK(Q(7).str() == "7");
    CHECK_THROWS(Q::parse(""));
    CHECK_THROWS(Q::parse("1/0"));
    CHECK_THROWS(Q::parse("abc"));
    CHECK_THROWS(Q::parse("1/-2"));
    CHECK(parse_scalar<double>("1/4") == 0.25);
    CHECK_THROWS(parse_scalar<double>("x"));
  }

  TEST_CASE("compare with tolerance") {
    Compare<double> c{Tolerance{1e-9, 1e-9}};
    CHECK(c.eq(1.0, 1.0 + 1e-12));
    CHECK(c.lt(1.0, 1.0 + 1e-6));
    Compare<Q> e{};
    CHECK(e.lt(Q(1), Q(1) + frac(1, 1000000000) * frac(1, 1000000000)));
  }

  TEST_CASE("extended values") {
    Compare<Q> cmp{};
    auto inf = ExtScalar<Q>::infinity();
    CHECK(ext_less(ExtScalar<Q>(Q(5)), inf, cmp));
    CHECK_FALSE(ext_less(inf, inf, cmp));
    CHECK(ext_equal(inf, inf, cmp));
    CHECK(ext_min(inf, ExtScalar<Q>(Q(2)), cmp) == ExtScalar<Q>(Q(2)));
    CHECK(inf.str() == "inf");
    CHECK_THROWS(inf.value());
    CHECK_THROWS(ext_difference(inf, ExtScalar<Q>(Q(1))));
  }

  TEST_CASE("rational arithmetic identities on random values") {
    Rng rng(11);
    auto pick = [&] { return frac(rng.range(-50, 50), rng.range(1, 30)); };
    for (int k = 0; k < 500; ++k) {
      Q a = pick(), b = pick(), c = pick();
      CHECK((a + b) + c == a + (b + c));
      CHECK(a * b == b * a);
      CHECK((a * b) * c == a * (b * c));
      CHECK(a * (b + c) == a * b + a * c);
      CHECK(a - a == Q(0));
      if (b != Q(0)) CHECK((a / b) * b == a);
    }
  }
}
