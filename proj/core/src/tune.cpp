#include "rtistab/tune.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rtistab/simplex.hpp"

namespace rtistab {

namespace {

constexpr double kObjectiveFailure = 1e12;

std::vector<double> unmap_parameters(const std::vector<double>& a) {
  std::vector<double> at(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    at[i] = std::sqrt(std::max(a[i] - 1.0, 0.0));
  }
  return at;
}

std::vector<double> sin_residual(const std::vector<double>& m) {
  std::vector<double> g(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    g[i] = std::sin(m[i] * std::numbers::pi);
  }
  return g;
}

double inf_norm(const std::vector<double>& v) {
  double n = 0.0;
  for (double x : v) {
    n = std::max(n, std::abs(x));
  }
  return n;
}

}  // namespace

std::vector<double> map_parameters(const std::vector<double>& a_tilde) {
  std::vector<double> a(a_tilde.size());
  for (std::size_t i = 0; i < a_tilde.size(); ++i) {
    a[i] = map_parameter(a_tilde[i]);
  }
  return a;
}

double f1_value(const std::vector<double>& m, const std::vector<double>& a,
                const TuneConfig& cfg) {
  double sum_abs = 0.0;
  double min_abs = std::numeric_limits<double>::infinity();
  for (double v : m) {
    sum_abs += std::abs(v);
    min_abs = std::min(min_abs, std::abs(v));
  }
  double q = 0.0;
  if (!m.empty() && 1.0 - min_abs > 0.0) {
    q += cfg.penalty_large * (1.0 - min_abs);
  }
  for (double v : a) {
    q += cfg.penalty_small_coeff * v * v;
  }
  return sum_abs + q;
}

double f2_value(const std::vector<double>& m) {
  double sum = 0.0;
  for (double v : m) {
    const double s = std::sin(v * std::numbers::pi);
    sum += s * s;
  }
  return sum;
}

double objective_F1(const SystemBuilder& builder, const std::vector<double>& a_tilde,
                    const TuneConfig& cfg) {
  const std::vector<double> a = map_parameters(a_tilde);
  try {
    return f1_value(builder.solve(a), a, cfg);
  } catch (const Error&) {
    return kObjectiveFailure;
  }
}

double objective_F2(const SystemBuilder& builder, const std::vector<double>& a_tilde) {
  const std::vector<double> a = map_parameters(a_tilde);
  try {
    return f2_value(builder.solve(a));
  } catch (const Error&) {
    return kObjectiveFailure;
  }
}

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& B, const Eigen::VectorXd& c) {
  const Eigen::Index rows = B.rows();
  const Eigen::Index cols = B.cols();
  if (rows > cols) {
    throw InvalidInput("min_norm_solve expects no more rows than columns");
  }
  if (c.size() != rows) {
    throw InvalidInput("right-hand side length must match the row count");
  }

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(cols + rows, cols + rows);
  kkt.topLeftCorner(cols, cols) = Eigen::MatrixXd::Identity(cols, cols);
  kkt.topRightCorner(cols, rows) = B.transpose();
  kkt.bottomLeftCorner(rows, cols) = B;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(cols + rows);
  rhs.tail(rows) = c;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw NumericsError("rank-deficient constraint matrix in min_norm_solve");
  }
  const Eigen::VectorXd sol = lu.solve(rhs);
  const Eigen::VectorXd y = sol.head(cols);
  const double residual = (B * y - c).lpNorm<Eigen::Infinity>();
  if (residual > 1e-10 * (1.0 + c.lpNorm<Eigen::Infinity>())) {
    throw NumericsError("KKT solve failed the constraint residual check");
  }
  return y;
}

TuneState newton_refine(const SystemBuilder& builder, const TuneState& state,
                        const TuneConfig& cfg) {
  TuneState cur = state;
  if (cur.a_tilde.empty()) {
    cur.a_tilde = unmap_parameters(cur.a);
  }
  cur.a = map_parameters(cur.a_tilde);
  cur.m = builder.solve(cur.a);
  if (f2_value(cur.m) >= 0.25) {
    throw TuneFailure("Newton refinement needs a near-integer start (F2 < 0.25)", cur);
  }

  const int nm = builder.num_exponents();
  const int np = builder.num_parameters();
  std::vector<double> g = sin_residual(cur.m);

  int iter = 0;
  for (; iter < cfg.newton_max_iters && inf_norm(g) >= cfg.newton_tol; ++iter) {
    Eigen::MatrixXd jac(nm, np);
    try {
      for (int j = 0; j < np; ++j) {
        std::vector<double> tp = cur.a_tilde, tm = cur.a_tilde;
        tp[static_cast<std::size_t>(j)] += cfg.fd_step;
        tm[static_cast<std::size_t>(j)] -= cfg.fd_step;
        const std::vector<double> gp = sin_residual(builder.solve(map_parameters(tp)));
        const std::vector<double> gm = sin_residual(builder.solve(map_parameters(tm)));
        for (int i = 0; i < nm; ++i) {
          jac(i, j) = (gp[static_cast<std::size_t>(i)] - gm[static_cast<std::size_t>(i)]) /
                      (2.0 * cfg.fd_step);
        }
      }
      Eigen::Map<Eigen::VectorXd> gv(g.data(), nm);
      const Eigen::VectorXd delta = min_norm_solve(jac, -gv);
      for (int j = 0; j < np; ++j) {
        cur.a_tilde[static_cast<std::size_t>(j)] += delta(j);
      }
      cur.a = map_parameters(cur.a_tilde);
      cur.m = builder.solve(cur.a);
    } catch (const Error& e) {
      throw TuneFailure(std::string("Newton refinement failed: ") + e.what(), cur);
    }
    g = sin_residual(cur.m);
    cur.trace.push_back({3, iter, inf_norm(g)});
  }
  if (inf_norm(g) >= cfg.newton_tol) {
    throw TuneFailure("Newton refinement did not converge", cur);
  }

  // Snap to integers and re-verify the interpolation conditions with the
  // snapped exponents and final parameters.
  std::vector<double> m_int(cur.m.size());
  for (std::size_t i = 0; i < cur.m.size(); ++i) {
    const double r = std::round(cur.m[i]);
    if (std::abs(cur.m[i] - r) >= cfg.snap_tol) {
      throw TuneFailure("integerization failed: exponent too far from an integer", cur);
    }
    m_int[i] = r;
  }
  const std::vector<double> residuals = builder.interpolation_residuals(cur.a, m_int);
  for (double r : residuals) {
    if (r >= 1e-8) {
      throw TuneFailure("integerization failed verification", cur);
    }
  }
  cur.m = m_int;
  cur.integerized = true;
  return cur;
}

TuneState tune_pipeline(const SystemBuilder& builder, const std::vector<double>& a0,
                        const TuneConfig& cfg) {
  if (builder.num_exponents() == 0) {
    throw InvalidInput("tuning requires at least one RHP zero (q >= 1)");
  }
  if (static_cast<int>(a0.size()) != builder.num_parameters()) {
    throw InvalidInput("initial parameter vector has wrong length");
  }
  if (cfg.restarts < 1) {
    throw InvalidInput("restarts must be >= 1");
  }

  std::vector<double> at0 = unmap_parameters(a0);

  // The starting point must solve cleanly; re-randomize a few times if the
  // initial system is too ill-conditioned.
  {
    std::mt19937_64 rng(cfg.rng_seed ^ 0x5bf03635ULL);
    std::normal_distribution<double> noise(0.0, 0.3);
    int tries = 0;
    for (;;) {
      try {
        (void)builder.solve(map_parameters(at0));
        break;
      } catch (const Error& e) {
        if (++tries > 5) {
          throw TuneFailure(std::string("no usable starting parameters: ") + e.what(),
                            TuneState{at0, map_parameters(at0), {}, {}, false});
        }
        for (double& t : at0) {
          t = std::max(std::abs(t), 0.05) * std::exp(noise(rng));
        }
      }
    }
  }

  TuneState best;
  double best_f2 = std::numeric_limits<double>::infinity();
  std::string last_failure = "tuning failed";

  for (int attempt = 0; attempt < cfg.restarts; ++attempt) {
    std::vector<double> at_start = attempt == 0 ? at0 : best.a_tilde;
    if (at_start.empty()) {
      at_start = at0;
    }
    if (attempt > 0) {
      std::mt19937_64 rng(cfg.rng_seed + 0x9e3779b97f4a7c15ULL *
                                             static_cast<std::uint64_t>(attempt));
      std::normal_distribution<double> noise(0.0, 0.3);
      for (double& t : at_start) {
        t = std::max(std::abs(t), 0.05) * std::exp(noise(rng));
      }
    }

    TuneState state;
    state.a_tilde = at_start;

    SimplexOptions opts;
    opts.max_iters = cfg.max_iters_simplex;

    // Stage 1: shrink the exponents.
    state.a_tilde = nelder_mead(
        [&](const std::vector<double>& at) { return objective_F1(builder, at, cfg); },
        state.a_tilde, opts, [&state](int it, double v) {
          state.trace.push_back({1, it, v});
        });

    // Stage 2: drive them toward integers.
    state.a_tilde = nelder_mead(
        [&](const std::vector<double>& at) { return objective_F2(builder, at); },
        state.a_tilde, opts, [&state](int it, double v) {
          state.trace.push_back({2, it, v});
        });

    state.a = map_parameters(state.a_tilde);
    double f2 = kObjectiveFailure;
    try {
      state.m = builder.solve(state.a);
      f2 = f2_value(state.m);
    } catch (const Error& e) {
      last_failure = e.what();
    }
    if (f2 < best_f2) {
      best_f2 = f2;
      best = state;
    }
    if (f2 > 1e-4) {
      last_failure = "trig objective stagnated above 1e-4";
      continue;
    }

    try {
      return newton_refine(builder, state, cfg);
    } catch (const TuneFailure& e) {
      last_failure = e.what();
      if (f2 < best_f2) {
        best_f2 = f2;
        best = e.best_state;
      }
    }
  }

  throw TuneFailure("tuning failed after " + std::to_string(cfg.restarts) +
                        " restart(s): " + last_failure,
                    best);
}

TuneState tune_pipeline(const CoprimeFactorization& cf, const std::vector<double>& a0,
                        const TuneConfig& cfg) {
  return tune_pipeline(SystemBuilder(cf, {}), a0, cfg);
}

}  // namespace rtistab
