#include "rtistab/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtistab/errors.hpp"

namespace rtistab {

namespace {

constexpr double kConditionGuard = 1e12;

// (-1)^(j-1) (j-1)!  -- the j-th derivative of ln(s - r) is this over (s-r)^j.
double log_derivative_coeff(int j) {
  double f = 1.0;
  for (int i = 2; i < j; ++i) {
    f *= i;
  }
  return (j % 2 == 1) ? f : -f;
}

Complex ipow(Complex z, int j) {
  Complex r(1.0, 0.0);
  for (int i = 0; i < j; ++i) {
    r *= z;
  }
  return r;
}

double factor_entry_real(double z, double a_num, double a_den, int j) {
  if (j == 0) {
    return std::log((z + a_num) / (z + a_den));
  }
  const double c = log_derivative_coeff(j);
  return c * (std::pow(z + a_num, -j) - std::pow(z + a_den, -j));
}

Complex factor_entry_complex(Complex z, double a_num, double a_den, int j) {
  if (j == 0) {
    return std::log((z + a_num) / (z + a_den));
  }
  const double c = log_derivative_coeff(j);
  return c * (1.0 / ipow(z + a_num, j) - 1.0 / ipow(z + a_den, j));
}

}  // namespace

std::vector<double> UProduct::parameter_vector() const {
  std::vector<double> a;
  a.reserve(2 * factors.size());
  for (const FactorPair& f : factors) {
    a.push_back(f.a_num);
    a.push_back(f.a_den);
  }
  return a;
}

std::vector<double> UProduct::exponents() const {
  std::vector<double> m;
  m.reserve(factors.size());
  for (const FactorPair& f : factors) {
    m.push_back(f.m);
  }
  return m;
}

UProduct make_uproduct(std::span<const double> a, std::span<const double> m,
                       std::optional<Premultiplier> premultiplier, bool integerized) {
  if (a.size() != 2 * m.size()) {
    throw InvalidInput("parameter vector must hold one (a_num, a_den) pair per exponent");
  }
  UProduct u;
  u.premultiplier = premultiplier;
  u.integerized = integerized;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (a[2 * k] <= 0.0 || a[2 * k + 1] <= 0.0) {
      throw InvalidInput("factor parameters must be strictly positive");
    }
    if (integerized && (m[k] != std::round(m[k]) || std::abs(m[k]) > 1e6)) {
      throw InvalidInput("integerized U needs integer exponents with |m| <= 1e6");
    }
    u.factors.push_back({a[2 * k], a[2 * k + 1], m[k]});
  }
  return u;
}

Complex u_eval(const UProduct& u, Complex s) {
  Complex value(1.0, 0.0);
  if (u.premultiplier) {
    if (s == Complex(-u.premultiplier->M, 0.0)) {
      throw InvalidInput("evaluation at the premultiplier pole");
    }
    value = (s + u.premultiplier->shift) / (s + u.premultiplier->M);
  }
  // Accumulate the exponent sum before exponentiating: individual factors
  // can overflow even when the product is moderate.
  Complex log_sum(0.0, 0.0);
  for (const FactorPair& f : u.factors) {
    if (s == Complex(-f.a_den, 0.0)) {
      throw InvalidInput("evaluation at a factor pole");
    }
    log_sum += f.m * std::log((s + f.a_num) / (s + f.a_den));
  }
  value *= std::exp(log_sum);
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw NumericsError("u_eval produced a non-finite value");
  }
  return value;
}

SystemBuilder::SystemBuilder(const CoprimeFactorization& cf, std::optional<double> M) {
  if (cf.relative_degree > 2) {
    throw UnsupportedRelativeDegree(cf.relative_degree);
  }
  const bool degree2 = cf.relative_degree == 2;
  if (degree2) {
    const double m_val = M ? *M : choose_M(cf);
    const double b1c1 = rf_inv_s_coefficient(cf.D);
    if (b1c1 + m_val <= 0.0) {
      throw InvalidInput("premultiplier shift b1-c1+M must be positive");
    }
    premultiplier_ = Premultiplier{b1c1 + m_val, m_val};
  }

  std::vector<Complex> d_zeros, d_poles;
  bool need_derivatives = false;
  for (const RootGroup& g : cf.zero_groups) {
    need_derivatives = need_derivatives || g.multiplicity > 1;
  }
  if (need_derivatives) {
    if (cf.D.num().degree() >= 1) d_zeros = poly_roots(cf.D.num());
    if (cf.D.den().degree() >= 1) d_poles = poly_roots(cf.D.den());
  }

  for (const RootGroup& g : cf.zero_groups) {
    const Complex z = g.value;
    const bool complex_zero = z.imag() != 0.0;
    for (int j = 0; j < g.multiplicity; ++j) {
      Complex rhs;
      if (j == 0) {
        const Complex dz = cf.D.eval(z);
        if (!complex_zero) {
          if (dz.real() <= 0.0) {
            throw NumericsError("log of non-positive value: PIP/sign-rule violated");
          }
          rhs = Complex(std::log(dz.real()), 0.0);
        } else {
          rhs = std::log(dz);
        }
        if (premultiplier_) {
          rhs -= std::log((z + premultiplier_->shift) / (z + premultiplier_->M));
        }
      } else {
        const double c = log_derivative_coeff(j);
        Complex acc(0.0, 0.0);
        for (const Complex& r : d_zeros) acc += c / ipow(z - r, j);
        for (const Complex& r : d_poles) acc -= c / ipow(z - r, j);
        if (premultiplier_) {
          acc -= c * (1.0 / ipow(z + premultiplier_->shift, j) -
                      1.0 / ipow(z + premultiplier_->M, j));
        }
        rhs = acc;
      }

      RowTag tag;
      tag.kind = j == 0 ? RowTag::Kind::Value : RowTag::Kind::Derivative;
      tag.z = z;
      tag.derivative_order = j;
      if (complex_zero) {
        tag.part = RowTag::Part::Real;
        rows_.push_back({tag, rhs.real()});
        tag.part = RowTag::Part::Imag;
        rows_.push_back({tag, rhs.imag()});
      } else {
        tag.part = RowTag::Part::Whole;
        rows_.push_back({tag, rhs.real()});
      }
    }
  }

  if (degree2) {
    RowTag tag;
    tag.kind = RowTag::Kind::InfinityConstraint;
    rows_.push_back({tag, 0.0});
  }
  num_exponents_ = static_cast<int>(rows_.size());
}

InterpolationSystem SystemBuilder::build(std::span<const double> a) const {
  if (static_cast<int>(a.size()) != num_parameters()) {
    throw InvalidInput("parameter vector has wrong length");
  }
  for (double v : a) {
    if (!(v > 0.0)) {
      throw InvalidInput("all parameters must be strictly positive");
    }
  }

  const int n = num_exponents_;
  InterpolationSystem sys;
  sys.matrix.resize(n, n);
  sys.rhs.resize(n);
  sys.row_tags.reserve(rows_.size());

  for (int i = 0; i < n; ++i) {
    const Row& row = rows_[static_cast<std::size_t>(i)];
    sys.rhs(i) = row.rhs;
    sys.row_tags.push_back(row.tag);
    for (int k = 0; k < n; ++k) {
      const double an = a[2 * static_cast<std::size_t>(k)];
      const double ad = a[2 * static_cast<std::size_t>(k) + 1];
      double entry = 0.0;
      switch (row.tag.kind) {
        case RowTag::Kind::InfinityConstraint:
          entry = an - ad;
          break;
        case RowTag::Kind::Value:
        case RowTag::Kind::Derivative: {
          const int j = row.tag.derivative_order;
          if (row.tag.part == RowTag::Part::Whole) {
            entry = factor_entry_real(row.tag.z.real(), an, ad, j);
          } else {
            const Complex e = factor_entry_complex(row.tag.z, an, ad, j);
            entry = row.tag.part == RowTag::Part::Real ? e.real() : e.imag();
          }
          break;
        }
      }
      sys.matrix(i, k) = entry;
    }
  }

  if (n > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.matrix);
    const double smin = svd.singularValues()(n - 1);
    const double smax = svd.singularValues()(0);
    if (smin <= 0.0 || smax / smin > kConditionGuard) {
      throw NumericsError(
          "ill-conditioned interpolation system; choose different parameters");
    }
  }
  return sys;
}

std::vector<double> SystemBuilder::solve(std::span<const double> a) const {
  return solve_exponents(build(a));
}

std::vector<double> SystemBuilder::interpolation_residuals(
    std::span<const double> a, std::span<const double> m) const {
  const InterpolationSystem sys = build(a);
  Eigen::Map<const Eigen::VectorXd> mv(m.data(), static_cast<Eigen::Index>(m.size()));
  std::vector<double> out;
  for (Eigen::Index i = 0; i < sys.rhs.size(); ++i) {
    if (sys.row_tags[static_cast<std::size_t>(i)].kind == RowTag::Kind::InfinityConstraint) {
      continue;
    }
    const double r = std::abs(sys.matrix.row(i).dot(mv) - sys.rhs(i));
    out.push_back(r / (1.0 + std::abs(sys.rhs(i))));
  }
  return out;
}

InterpolationSystem build_system(const CoprimeFactorization& cf,
                                 std::span<const double> a, std::optional<double> M) {
  return SystemBuilder(cf, M).build(a);
}

std::vector<double> solve_exponents(const InterpolationSystem& sys) {
  const Eigen::Index n = sys.matrix.rows();
  if (n == 0) {
    return {};
  }
  if (n != sys.matrix.cols() || n != sys.rhs.size()) {
    throw InvalidInput("interpolation system must be square");
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.matrix);
  Eigen::VectorXd m = lu.solve(sys.rhs);
  const double residual = (sys.matrix * m - sys.rhs).lpNorm<Eigen::Infinity>();
  if (!m.allFinite() ||
      residual >= 1e-10 * (1.0 + sys.rhs.lpNorm<Eigen::Infinity>())) {
    throw NumericsError("singular interpolation system");
  }
  return {m.data(), m.data() + n};
}

UProduct trivial_u(const CoprimeFactorization& cf, std::optional<double> M) {
  if (cf.q != 0) {
    throw InvalidInput("trivial U requires q = 0");
  }
  UProduct u;
  u.integerized = true;
  if (cf.relative_degree == 2) {
    const double m_val = M ? *M : choose_M(cf);
    u.premultiplier = Premultiplier{rf_inv_s_coefficient(cf.D) + m_val, m_val};
  }
  return u;
}

double choose_M(const CoprimeFactorization& cf) {
  if (cf.relative_degree != 2) {
    throw InvalidInput("premultiplier applies to relative degree 2 only");
  }
  const double b1c1 = rf_inv_s_coefficient(cf.D);
  return std::max(1.0, std::ceil(std::abs(b1c1)) + 1.0);
}

AsymptoticResult asymptotic_epsilons(const CoprimeFactorization& cf,
                                     const AsymptoticRequest& req) {
  if (cf.relative_degree > 1) {
    throw InvalidInput("asymptotic predictor supports relative degree <= 1");
  }
  const std::size_t n = req.centers.size();
  if (n == 0 || n != req.targets.size()) {
    throw InvalidInput("need one target per center");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(req.centers[i] > 0.0)) {
      throw InvalidInput("centers must be positive");
    }
    if (req.targets[i] == 0) {
      throw InvalidInput("targets must be nonzero integers");
    }
  }

  const SystemBuilder builder(cf, {});
  if (builder.num_exponents() != static_cast<int>(n)) {
    throw InvalidInput("number of centers must match the interpolation row count");
  }

  // The eps-free system: row entries -1/(z+b_k) and their derivatives, the
  // right-hand side identical to the exact system's.
  Eigen::MatrixXd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const RowTag& tag = builder.rows()[i].tag;
    b(static_cast<Eigen::Index>(i)) = builder.rows()[i].rhs;
    for (std::size_t k = 0; k < n; ++k) {
      const Complex zb = tag.z + req.centers[k];
      const int j = tag.derivative_order;
      // j-th derivative of -1/(s+b): -(-1)^j j! / (s+b)^(j+1)
      double jf = 1.0;
      for (int t = 2; t <= j; ++t) jf *= t;
      const Complex e = -((j % 2 == 0) ? jf : -jf) / ipow(zb, j + 1);
      double entry = 0.0;
      if (tag.part == RowTag::Part::Whole) {
        entry = e.real();
      } else {
        entry = tag.part == RowTag::Part::Real ? e.real() : e.imag();
      }
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = entry;
    }
  }

  AsymptoticResult result;
  Eigen::VectorXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(b);
  if (!x.allFinite()) {
    throw NumericsError("singular asymptotic system");
  }
  result.x.assign(x.data(), x.data() + x.size());

  result.eps.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    result.eps[k] = result.x[k] / (2.0 * static_cast<double>(req.targets[k]));
    if (std::abs(req.centers[k]) <= std::abs(result.eps[k])) {
      throw NumericsError("predicted epsilon exceeds its center; pick larger targets");
    }
  }

  auto params_for = [&req, n](const std::vector<double>& eps) {
    std::vector<double> a(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
      a[2 * k] = req.centers[k] - eps[k];
      a[2 * k + 1] = req.centers[k] + eps[k];
    }
    return a;
  };
  result.achieved_m = builder.solve(params_for(result.eps));

  // Square Newton iteration on eps so the exact solve hits the targets.
  std::vector<double> eps = result.eps;
  const double fd = 1e-7;
  for (int iter = 0; iter < 60; ++iter) {
    const std::vector<double> m = builder.solve(params_for(eps));
    Eigen::VectorXd h(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      h(static_cast<Eigen::Index>(k)) = m[k] - static_cast<double>(req.targets[k]);
    }
    if (h.lpNorm<Eigen::Infinity>() < 1e-8) {
      break;
    }
    Eigen::MatrixXd J(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) {
      std::vector<double> ep = eps, em = eps;
      ep[c] += fd;
      em[c] -= fd;
      const std::vector<double> mp = builder.solve(params_for(ep));
      const std::vector<double> mm = builder.solve(params_for(em));
      for (std::size_t r = 0; r < n; ++r) {
        J(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            (mp[r] - mm[r]) / (2.0 * fd);
      }
    }
    Eigen::VectorXd delta = Eigen::PartialPivLU<Eigen::MatrixXd>(J).solve(-h);
    if (!delta.allFinite()) {
      throw NumericsError("asymptotic refinement diverged");
    }
    for (std::size_t k = 0; k < n; ++k) {
      eps[k] += delta(static_cast<Eigen::Index>(k));
    }
  }
  result.refined_eps = eps;
  result.refined_m = builder.solve(params_for(eps));
  return result;
}

}  // namespace rtistab
