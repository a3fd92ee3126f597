// Acceptance suite: deterministic end-to-end checks of the toolkit against
// the published reference values, printed one verdict per criterion.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "rtistab/report_io.hpp"
#include "rtistab/reference_designs.hpp"
#include "rtistab/simulate.hpp"
#include "test_support.hpp"

using namespace rtistab;

namespace {

int g_failures = 0;

void verdict(int criterion, const std::string& title, bool ok,
             const std::string& detail = "") {
  std::printf("%s  criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion,
              title.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) {
    ++g_failures;
  }
}

bool close_abs(double a, double b, double tol) { return std::abs(a - b) < tol; }

// ---- criterion 1 & 2: interpolation solves against tables 1-7 ----------

void criteria_tables() {
  bool integers_ok = true, initials_ok = true;
  std::string detail1, detail2;
  for (const ReferenceExample& ex : reference_examples()) {
    if (ex.adjusted_a.empty() || ex.initial_a.empty()) {
      continue;
    }
    const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
    const SystemBuilder builder(cf, ex.M);

    const std::vector<double> m_adj = builder.solve(ex.adjusted_a);
    for (std::size_t i = 0; i < ex.integer_m.size(); ++i) {
      if (!close_abs(m_adj[i], ex.integer_m[i], 1e-6)) {
        integers_ok = false;
        detail1 += ex.id + " ";
      }
    }
    const std::vector<double> m0 = builder.solve(ex.initial_a);
    for (std::size_t i = 0; i < ex.initial_m.size(); ++i) {
      if (!close_abs(m0[i], ex.initial_m[i], 1e-4)) {
        initials_ok = false;
        detail2 += ex.id + " ";
      }
    }
  }
  verdict(1, "adjusted parameters reproduce the published integers (1e-6)",
          integers_ok, detail1);
  verdict(2, "initial parameters reproduce the published real exponents (4 dp)",
          initials_ok, detail2);
}

// ---- criterion 3: closed-form controllers ------------------------------

bool controller_matches(const RationalTF& got, const RationalTF& want,
                        double tol, bool relative) {
  const double scale = 1.0 / got.den().leading();
  if (got.num().degree() != want.num().degree() ||
      got.den().degree() != want.den().degree()) {
    return false;
  }
  for (int i = 0; i <= want.num().degree(); ++i) {
    const double g = got.num().coeffs()[static_cast<std::size_t>(i)] * scale;
    const double w = want.num().coeffs()[static_cast<std::size_t>(i)];
    const double bound = relative ? tol * std::max(1.0, std::abs(w)) : tol;
    if (std::abs(g - w) > bound) {
      return false;
    }
  }
  for (int i = 0; i <= want.den().degree(); ++i) {
    const double g = got.den().coeffs()[static_cast<std::size_t>(i)] * scale;
    const double w = want.den().coeffs()[static_cast<std::size_t>(i)];
    const double bound = relative ? tol * std::max(1.0, std::abs(w)) : tol;
    if (std::abs(g - w) > bound) {
      return false;
    }
  }
  return true;
}

void criterion_controllers() {
  bool ok = true;
  std::string detail;
  {
    const ReferenceExample& ex = reference_example("ex6");
    const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
    const DesignResult r = synthesize_controller(cf, trivial_u(cf), 1e-4);
    if (!controller_matches(r.controller, *ex.controller, 1e-12, false)) {
      ok = false;
      detail += "ex6 ";
    }
  }
  {
    const ReferenceExample& ex = reference_example("ex10");
    const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
    const DesignResult r = synthesize_controller(cf, trivial_u(cf, ex.M), 1e-4);
    if (!controller_matches(r.controller, *ex.controller, 1e-9, false)) {
      ok = false;
      detail += "ex10 ";
    }
  }
  {
    const ReferenceExample& ex = reference_example("motivating");
    const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
    UProduct u = make_uproduct(ex.adjusted_a, ex.integer_m, {}, true);
    const DesignResult r = synthesize_controller(cf, u, ex.fixed_cancel_tol);
    if (!controller_matches(r.controller, *ex.controller, 1e-4, true)) {
      ok = false;
      detail += "motivating ";
    }
  }
  verdict(3, "closed-form controllers match (ex6 exact, ex10, third-order)", ok,
          detail);
}

// ---- criterion 4: asymptotic reproduction ------------------------------

void criterion_asymptotic() {
  const AsymptoticReference& ref = asymptotic_reference();
  bool ok = true;
  std::string detail;
  try {
    const CoprimeFactorization cf = coprime_from_parts(ref.N, ref.D);
    const AsymptoticResult res =
        asymptotic_epsilons(cf, AsymptoticRequest{ref.centers, ref.targets});
    for (std::size_t i = 0; i < ref.centers.size(); ++i) {
      if (std::abs(res.x[i] - ref.published_x[i]) > 1e-9 * std::abs(ref.published_x[i])) {
        ok = false;
        detail += "x ";
      }
      if (!close_abs(res.eps[i], ref.published_eps[i], 1e-12)) {
        ok = false;
        detail += "eps ";
      }
      if (!close_abs(res.refined_m[i], static_cast<double>(ref.targets[i]), 5e-8)) {
        ok = false;
        detail += "m ";
      }
      if (!close_abs(res.refined_eps[i], ref.published_refined_eps[i], 1e-9)) {
        ok = false;
        detail += "refined-eps ";
      }
    }
  } catch (const Error& e) {
    ok = false;
    detail = e.what();
  }
  verdict(4, "asymptotic run: x to 9 digits, eps to 1e-12, targets to 7 dp", ok,
          detail);
}

// ---- criterion 5: strong stabilization of all ten examples -------------

void criterion_stabilization() {
  bool ok = true;
  std::string detail;
  for (const ReferenceExample& ex : reference_examples()) {
    try {
      const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
      UProduct u;
      if (!ex.adjusted_a.empty()) {
        const SystemBuilder builder(cf, ex.M);
        u = make_uproduct(ex.adjusted_a, ex.integer_m, builder.premultiplier(), true);
      } else {
        u = trivial_u(cf, ex.M);
      }
      DesignResult r = synthesize_controller(cf, u, ex.fixed_cancel_tol);
      r.verification = verify(cf, r);

      bool entry_ok = r.verification.sigma < 0.0;
      for (const Complex& p : r.verification.closed_loop_poles) {
        entry_ok = entry_ok && p.real() < -1e-6;
      }
      const StepSeries s = simulate_closed_loop(cf, u, false, ex.sim_t_final, 0.0);
      entry_ok = entry_ok && s.settled &&
                 std::abs(s.y.back() - s.final_value) <=
                     0.02 * std::max(1.0, std::abs(s.final_value));
      if (!entry_ok) {
        ok = false;
        detail += ex.id + " ";
      }
    } catch (const Error& e) {
      ok = false;
      detail += ex.id + "(" + e.what() + ") ";
    }
  }
  verdict(5, "all ten examples: sigma < 0, poles < -1e-6, settled + FVT 2%", ok,
          detail);
}

// ---- criterion 6: search-mode viability --------------------------------

void criterion_search() {
  bool ok = true;
  std::string detail;
  for (const ReferenceExample& ex : reference_examples()) {
    if (ex.initial_a.empty()) {
      continue;
    }
    DesignConfig cfg;
    cfg.tune.rng_seed = 20240801;
    cfg.tune.restarts = 8;
    cfg.initial_a = ex.initial_a;
    try {
      const DesignResult r = design_pipeline(ex.plant, cfg);
      if (!r.verification.passed || !r.u_product.integerized) {
        ok = false;
        detail += ex.id + " ";
      }
    } catch (const Error& e) {
      ok = false;
      detail += ex.id + "(" + e.what() + ") ";
    }
  }
  // seed determinism on one representative search
  {
    const ReferenceExample& ex = reference_example("ex7");
    DesignConfig cfg;
    cfg.tune.rng_seed = 99;
    cfg.initial_a = ex.initial_a;
    const DesignResult a = design_pipeline(ex.plant, cfg);
    const DesignResult b = design_pipeline(ex.plant, cfg);
    if (a.u_product.exponents() != b.u_product.exponents() ||
        a.u_product.parameter_vector() != b.u_product.parameter_vector()) {
      ok = false;
      detail += "determinism ";
    }
  }
  verdict(6, "search mode finds a verified integer design from each table", ok,
          detail);
}

// ---- criterion 7: property suites --------------------------------------

void criterion_properties() {
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(424242);

  // (a) randomized plants: completed designs verify, violations are rejected
  int completed = 0, attempted = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const testing::RandomPlant rp = testing::random_pip_plant(rng);
    ++attempted;
    DesignConfig cfg;
    cfg.tune.rng_seed = 7000 + static_cast<std::uint64_t>(trial);
    cfg.tune.max_iters_simplex = 1200;
    DesignResult r;
    try {
      r = design_pipeline(rp.tf, cfg);
    } catch (const PipViolation&) {
      ok = false;
      detail += "false-pip-reject ";
      continue;
    } catch (const Error&) {
      continue;  // tuning/realization failure: not a completed design
    }
    ++completed;
    if (!r.verification.passed) {
      ok = false;
      detail += "unverified-design ";
    }
  }
  if (completed < attempted / 2) {
    ok = false;
    detail += "low-completion(" + std::to_string(completed) + "/100) ";
  }
  for (int trial = 0; trial < 50; ++trial) {
    const RationalTF bad = testing::random_pip_violating_plant(rng);
    try {
      (void)design_pipeline(bad, DesignConfig{});
      ok = false;
      detail += "missed-violation ";
    } catch (const PipViolation& e) {
      if (!e.report.witness) {
        ok = false;
        detail += "missing-witness ";
      }
    } catch (const Error&) {
      ok = false;
      detail += "wrong-error-type ";
    }
  }

  // (b) minimal-norm properties on 100 random systems
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 4);
    const int cols = rows + 1 + static_cast<int>(rng() % 5);
    Eigen::MatrixXd b(rows, cols);
    Eigen::VectorXd c(rows), v(cols);
    for (int i = 0; i < rows; ++i) {
      c(i) = g(rng);
      for (int j = 0; j < cols; ++j) {
        b(i, j) = g(rng);
      }
    }
    for (int j = 0; j < cols; ++j) {
      v(j) = g(rng);
    }
    try {
      const Eigen::VectorXd y = min_norm_solve(b, c);
      if ((b * y - c).lpNorm<Eigen::Infinity>() > 1e-9 * (1.0 + c.norm())) {
        ok = false;
        detail += "kkt-residual ";
      }
      const Eigen::VectorXd n =
          v - b.transpose() * (b * b.transpose()).ldlt().solve(b * v);
      if ((y + n).squaredNorm() < y.squaredNorm() - 1e-10) {
        ok = false;
        detail += "not-minimal ";
      }
    } catch (const Error&) {
      // random Gaussian matrices are full rank almost surely; a throw here
      // counts as a failure
      ok = false;
      detail += "kkt-throw ";
    }
  }

  // (c) interpolation residuals below 1e-8, including derivative rows of
  // the multiplicity-2 entries
  for (const char* id : {"ex8", "ex9", "ex13"}) {
    const ReferenceExample& ex = reference_example(id);
    const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
    const SystemBuilder builder(cf, ex.M);
    const std::vector<double> m = builder.solve(ex.adjusted_a);
    const std::vector<double> res = builder.interpolation_residuals(ex.adjusted_a, m);
    for (double r : res) {
      if (r >= 1e-8) {
        ok = false;
        detail += std::string(id) + "-residual ";
      }
    }
  }

  // (d) degree-2 reference designs: s^-1 coefficient vanishes
  for (const char* id : {"ex11", "ex13"}) {
    const ReferenceExample& ex = reference_example(id);
    const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
    const SystemBuilder builder(cf, ex.M);
    const UProduct u =
        make_uproduct(ex.adjusted_a, ex.integer_m, builder.premultiplier(), true);
    if (std::abs(testing::probed_inv_s_coefficient(u, cf)) > 1e-3) {
      ok = false;
      detail += std::string(id) + "-s-1-probe ";
    }
  }
  {
    // random solved systems, value rows checked through u_eval as well
    int solved = 0;
    for (int trial = 0; trial < 200 && solved < 40; ++trial) {
      const testing::RandomPlant rp = testing::random_pip_plant(rng);
      CoprimeFactorization cf;
      try {
        cf = coprime_factorize(rp.tf);
      } catch (const Error&) {
        continue;
      }
      if (cf.q == 0) {
        continue;
      }
      std::optional<double> m_opt;
      if (cf.relative_degree == 2) {
        m_opt = choose_M(cf);
      }
      const SystemBuilder builder(cf, m_opt);
      std::vector<double> a(static_cast<std::size_t>(builder.num_parameters()));
      std::uniform_real_distribution<double> ua(1.0, 50.0);
      for (double& x : a) {
        x = ua(rng);
      }
      std::vector<double> m;
      try {
        m = builder.solve(a);
      } catch (const Error&) {
        continue;
      }
      ++solved;
      for (double r : builder.interpolation_residuals(a, m)) {
        if (r >= 1e-8) {
          ok = false;
          detail += "random-residual ";
        }
      }

      // (d) degree-2 designs: the s^-1 constraint row and large-s probe
      if (cf.relative_degree == 2) {
        const UProduct u = make_uproduct(a, m, builder.premultiplier(), false);
        double row = 0.0, norm = 0.0;
        for (std::size_t k = 0; k < m.size(); ++k) {
          row += m[k] * (a[2 * k] - a[2 * k + 1]);
          norm += std::abs(m[k] * (a[2 * k] - a[2 * k + 1]));
        }
        if (std::abs(row) > 1e-9 * (1.0 + norm)) {
          ok = false;
          detail += "inf-row ";
        }
        if (std::abs(testing::probed_inv_s_coefficient(u, cf)) > 1e-3) {
          ok = false;
          detail += "s-1-probe ";
        }
      }
    }
    if (solved < 40) {
      ok = false;
      detail += "too-few-solves ";
    }
  }

  verdict(7, "property suites: random plants, minimal norm, residuals, degree-2",
          ok, detail);
}

}  // namespace

int main() {
  std::printf("acceptance suite, tool version %s\n", tool_version().c_str());
  criteria_tables();
  criterion_controllers();
  criterion_asymptotic();
  criterion_stabilization();
  criterion_search();
  criterion_properties();
  std::printf(
      "NOTE  criterion 8: figure-only controller orders and the non-unique "
      "adjusted parameter vectors are excluded by construction; covered by "
      "criteria 5-6 instead\n");
  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
