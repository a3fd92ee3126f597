#include <doctest.h>

#include <random>

#include "rtistab/errors.hpp"
#include "rtistab/rational.hpp"

using namespace rtistab;

TEST_CASE("common-denominator arithmetic") {
  // 1 - (s-1)/(s+1) = 2/(s+1)
  const RationalTF d = rf_sub(RationalTF::one(), RationalTF({1, -1}, {1, 1}));
  CHECK(d.num().coeffs() == std::vector<double>{2});
  CHECK(d.den().coeffs() == std::vector<double>{1, 1});

  const RationalTF x({1, 5}, {1, 11});
  const RationalTF xid = rf_mul(x, RationalTF::one());
  CHECK(xid.num().coeffs() == x.num().coeffs());
  CHECK(xid.den().coeffs() == x.den().coeffs());

  const RationalTF z = rf_sub(x, x);
  CHECK(z.num().is_zero());
  CHECK(z.den().degree() == 2);  // (s+11)^2, no cancellation performed
}

TEST_CASE("cancellation of matching roots") {
  const RationalTF a(Polynomial({1, -1}) * Polynomial({1, 2}),
                     Polynomial({1, -1}) * Polynomial({1, 3}));
  const RationalTF a_min = rf_cancel(a, 1e-6);
  REQUIRE(a_min.num().degree() == 1);
  CHECK(a_min.num().coeffs()[0] == doctest::Approx(1.0));
  CHECK(a_min.num().coeffs()[1] == doctest::Approx(2.0));
  CHECK(a_min.den().coeffs()[1] == doctest::Approx(3.0));

  const RationalTF b(Polynomial({1, -1.0000001}) * Polynomial({1, 2}),
                     Polynomial({1, -1}) * Polynomial({1, 3}));
  const RationalTF b_min = rf_cancel(b, 1e-4);
  CHECK(b_min.num().degree() == 1);
  CHECK(b_min.num().coeffs()[1] == doctest::Approx(2.0));
  CHECK(b_min.den().coeffs()[1] == doctest::Approx(3.0));

  const RationalTF c({1, 2}, {1, 3});
  const RationalTF c_min = rf_cancel(c, 1e-6);
  CHECK(c_min.num().coeffs() == c.num().coeffs());
  CHECK(c_min.den().coeffs() == c.den().coeffs());
}

TEST_CASE("cancellation preserves the function value") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> root(-5.0, 5.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double shared = root(rng);
    const RationalTF x(Polynomial({1, -shared}) * Polynomial({1, root(rng), 7}),
                       Polynomial({1, -shared - 1e-9}) * Polynomial({1, 9, root(rng) * root(rng) + 21}));
    const RationalTF y = rf_cancel(x, 1e-4);
    std::uniform_real_distribution<double> probe(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
      const Complex s(probe(rng) * 10.0, probe(rng) * 10.0 + 0.05);
      const Complex before = x.eval(s);
      const Complex after = y.eval(s);
      if (!std::isfinite(before.real()) || std::abs(before) > 1e6) {
        continue;  // probe too close to a pole
      }
      CHECK(std::abs(before - after) < 1e-6 * (1.0 + std::abs(before)));
    }
  }
}

TEST_CASE("s^-1 coefficient of biproper functions") {
  CHECK(rf_inv_s_coefficient(RationalTF({1, -7, 12}, {1, 7, 12})) ==
        doctest::Approx(-14.0));
  CHECK(rf_inv_s_coefficient(RationalTF::one()) == 0.0);
  CHECK(rf_inv_s_coefficient(RationalTF({1, -1, 4}, {1, 1, 7})) ==
        doctest::Approx(-2.0));
  CHECK_THROWS_AS((void)rf_inv_s_coefficient(RationalTF({1, 1}, {1, 2, 3})),
                  InvalidInput);
}

TEST_CASE("s^-1 coefficient matches the numeric large-s limit") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> c(-9.0, 9.0);
  for (int trial = 0; trial < 25; ++trial) {
    const RationalTF x({1, c(rng), c(rng)}, {1, c(rng), c(rng)});
    const double exact = rf_inv_s_coefficient(x);
    const Complex s(1e6, 0.0);
    const double probed = (static_cast<Complex>(s * (x.eval(s) - 1.0))).real();
    CHECK(std::abs(exact - probed) < 1e-4 * (1.0 + std::abs(exact)));
  }
}
