#include <doctest.h>

#include <random>

#include "rtistab/reference_designs.hpp"
#include "rtistab/simplex.hpp"
#include "rtistab/tune.hpp"

using namespace rtistab;

TEST_CASE("simplex minimization on standard test functions") {
  const auto quad1 = [](const std::vector<double>& x) {
    return (x[0] - 3.0) * (x[0] - 3.0);
  };
  const std::vector<double> r1 = nelder_mead(quad1, {0.0});
  CHECK(std::abs(r1[0] - 3.0) < 1e-6);

  const auto bowl = [](const std::vector<double>& x) {
    return x[0] * x[0] + x[1] * x[1];
  };
  const std::vector<double> r2 = nelder_mead(bowl, {1.0, 1.0});
  CHECK(std::abs(r2[0]) < 1e-6);
  CHECK(std::abs(r2[1]) < 1e-6);

  const auto rosenbrock = [](const std::vector<double>& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  SimplexOptions opts;
  opts.max_iters = 5000;
  const std::vector<double> r3 = nelder_mead(rosenbrock, {-1.2, 1.0}, opts);
  CHECK(std::abs(r3[0] - 1.0) < 1e-3);
  CHECK(std::abs(r3[1] - 1.0) < 1e-3);

  const auto notfinite = [](const std::vector<double>&) {
    return std::numeric_limits<double>::infinity();
  };
  CHECK_THROWS_AS((void)nelder_mead(notfinite, {0.0}), InvalidInput);
}

TEST_CASE("objective formulas") {
  TuneConfig cfg;
  CHECK(f1_value({2, -3}, {1, 1, 1, 1}, cfg) == doctest::Approx(5.04));
  CHECK(f1_value({0.5}, {1, 2}, cfg) == doctest::Approx(5.55));
  // vanishing exponents attract the full large penalty
  CHECK(f1_value({0.0, 0.0}, {1, 1, 1, 1}, cfg) ==
        doctest::Approx(0.0 + 10.0 + 0.04));

  CHECK(f2_value({-7, 4}) == doctest::Approx(0.0));
  CHECK(f2_value({0.5}) == doctest::Approx(1.0));
  // sin(1.68261 pi) = -sin(0.31739 pi) = -0.8399..., squared 0.70544
  CHECK(f2_value({1.68261}) == doctest::Approx(0.70544).epsilon(1e-4));
}

TEST_CASE("minimal-norm solve") {
  {
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd c(3);
    c << 1, -2, 5;
    CHECK((min_norm_solve(b, c) - c).norm() < 1e-12);
  }
  {
    Eigen::MatrixXd b(1, 2);
    b << 1, 1;
    Eigen::VectorXd c(1);
    c << 2;
    const Eigen::VectorXd y = min_norm_solve(b, c);
    CHECK(y(0) == doctest::Approx(1.0));
    CHECK(y(1) == doctest::Approx(1.0));
  }
  {
    // zero column with full row rank
    Eigen::MatrixXd b(1, 2);
    b << 1, 0;
    Eigen::VectorXd c(1);
    c << 3;
    const Eigen::VectorXd y = min_norm_solve(b, c);
    CHECK(y(0) == doctest::Approx(3.0));
    CHECK(y(1) == doctest::Approx(0.0));
  }
  {
    Eigen::MatrixXd b(2, 3);
    b << 1, 2, 3, 2, 4, 6;  // rank deficient
    Eigen::VectorXd c(2);
    c << 1, 2;
    CHECK_THROWS_AS((void)min_norm_solve(b, c), NumericsError);
  }
}

TEST_CASE("minimal-norm property on random systems") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 4);
    const int cols = rows + 1 + static_cast<int>(rng() % 4);
    Eigen::MatrixXd b(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        b(i, j) = g(rng);
      }
    }
    Eigen::VectorXd c(rows);
    for (int i = 0; i < rows; ++i) {
      c(i) = g(rng);
    }
    const Eigen::VectorXd y = min_norm_solve(b, c);

    // constraint satisfied
    CHECK((b * y - c).lpNorm<Eigen::Infinity>() < 1e-10 * (1.0 + c.norm()));

    // null-space perturbations only grow the norm: ||y+n||^2 = ||y||^2+||n||^2
    Eigen::VectorXd v(cols);
    for (int j = 0; j < cols; ++j) {
      v(j) = g(rng);
    }
    const Eigen::VectorXd n =
        v - b.transpose() * (b * b.transpose()).ldlt().solve(b * v);
    CHECK(std::abs(y.dot(n)) < 1e-8 * (1.0 + y.norm() * n.norm()));
    CHECK((y + n).squaredNorm() >= y.squaredNorm() - 1e-10);
  }
}

TEST_CASE("newton refinement lands on integers") {
  const ReferenceExample& ex = reference_example("ex5");
  const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
  const SystemBuilder builder(cf, {});
  TuneConfig cfg;

  TuneState start;
  start.a = {1.0002, 57.01};  // near the known solution manifold
  const TuneState refined = newton_refine(builder, start, cfg);
  CHECK(refined.integerized);
  REQUIRE(refined.m.size() == 1);
  CHECK(refined.m[0] == 1.0);
  // the solution manifold is a2 = 42 + 15 a1
  CHECK(refined.a[1] == doctest::Approx(42.0 + 15.0 * refined.a[0]).epsilon(1e-8));

  // already-integer entry converges in zero iterations
  TuneState exact;
  exact.a = {1.0, 57.0};
  const TuneState unchanged = newton_refine(builder, exact, cfg);
  CHECK(unchanged.m[0] == 1.0);
  CHECK(unchanged.a[0] == doctest::Approx(1.0));
  CHECK(unchanged.a[1] == doctest::Approx(57.0));
  CHECK(unchanged.trace.empty());

  // far-from-integer start is rejected
  TuneState bad;
  bad.a = {1.0, 17.0};  // m = 1.68261, F2 = 0.72
  CHECK_THROWS_AS((void)newton_refine(builder, bad, cfg), TuneFailure);
}

TEST_CASE("full tuning pipeline") {
  {
    // Integer designs for this plant are non-unique (m = 1 at a2 = 42+15a1,
    // m = 2, m = 3, ... all solve it); require integrality and the
    // interpolation identity, not a specific solution.
    const ReferenceExample& ex = reference_example("ex5");
    const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
    TuneConfig cfg;
    const TuneState state = tune_pipeline(cf, {1, 17}, cfg);
    CHECK(state.integerized);
    REQUIRE(state.m.size() == 1);
    CHECK(state.m[0] == std::round(state.m[0]));
    CHECK(state.m[0] != 0.0);
    const UProduct u = make_uproduct(state.a, state.m, {}, true);
    const Complex uz = u_eval(u, Complex(3, 0));
    const Complex dz = cf.D.eval(Complex(3, 0));
    CHECK(std::abs(uz - dz) < 1e-8 * (1.0 + std::abs(dz)));
    for (double v : state.a) {
      CHECK(v >= 1.0);
    }
  }
  {
    const ReferenceExample& ex = reference_example("ex7");
    const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
    TuneConfig cfg;
    cfg.rng_seed = 3;
    const TuneState state = tune_pipeline(cf, ex.initial_a, cfg);
    CHECK(state.integerized);
    for (double m : state.m) {
      CHECK(m == std::round(m));
    }

    // determinism: a second run with the same seed gives the same answer
    const TuneState again = tune_pipeline(cf, ex.initial_a, cfg);
    CHECK(again.m == state.m);
    CHECK(again.a == state.a);

    // the trace is non-increasing within each contiguous stage run
    for (std::size_t i = 1; i < state.trace.size(); ++i) {
      const TraceEntry& prev = state.trace[i - 1];
      const TraceEntry& cur = state.trace[i];
      if (cur.stage == prev.stage && cur.stage != 3 && cur.iteration > prev.iteration) {
        CHECK(cur.value <= prev.value + 1e-12);
      }
    }
  }
}

TEST_CASE("factor order does not change U") {
  UProduct u1, u2;
  u1.factors = {{1.5, 9.0, 2.0}, {3.0, 40.0, -3.0}};
  u2.factors = {{3.0, 40.0, -3.0}, {1.5, 9.0, 2.0}};
  u1.integerized = u2.integerized = true;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(0.0, 5.0);
  for (int k = 0; k < 20; ++k) {
    const Complex s(d(rng), d(rng));
    CHECK(std::abs(u_eval(u1, s) - u_eval(u2, s)) < 1e-12 * (1.0 + std::abs(u_eval(u1, s))));
  }
}
