#include "rtistab/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstddef>

#include "rtistab/errors.hpp"

namespace rtistab {

namespace {

std::vector<double> trim_leading_zeros(std::vector<double> c) {
  std::size_t i = 0;
  while (i + 1 < c.size() && c[i] == 0.0) {
    ++i;
  }
  c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(i));
  if (c.empty()) {
    c.push_back(0.0);
  }
  return c;
}

// Parlett-Reinsch style diagonal balancing by powers of two. Improves the
// eigensolve on companion matrices whose coefficients span many orders of
// magnitude.
void balance_in_place(Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  const double gamma = 0.9;
  bool changed = true;
  int sweeps = 0;
  while (changed && sweeps++ < 100) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      const double row_norm = m.row(i).lpNorm<1>();
      const double col_norm = m.col(i).lpNorm<1>();
      if (row_norm == 0.0 || col_norm == 0.0) {
        continue;
      }
      int exponent = 0;
      std::frexp(row_norm / col_norm, &exponent);
      exponent /= 2;
      if (exponent != 0) {
        const double scaled_col = std::ldexp(col_norm, exponent);
        const double scaled_row = std::ldexp(row_norm, -exponent);
        if (scaled_col + scaled_row < gamma * (col_norm + row_norm)) {
          changed = true;
          m.row(i) *= std::ldexp(1.0, -exponent);
          m.col(i) *= std::ldexp(1.0, exponent);
        }
      }
    }
  }
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) {
    coeffs_ = {0.0};
    return;
  }
  for (double c : coeffs) {
    if (!std::isfinite(c)) {
      throw InvalidInput("polynomial coefficient is not finite");
    }
  }
  coeffs_ = trim_leading_zeros(std::move(coeffs));
}

bool Polynomial::is_zero() const {
  return coeffs_.size() == 1 && coeffs_[0] == 0.0;
}

double Polynomial::monic_subleading() const {
  if (degree() < 1) {
    return 0.0;
  }
  return coeffs_[1] / coeffs_[0];
}

Polynomial Polynomial::monic() const {
  if (is_zero()) {
    throw InvalidInput("cannot normalize the zero polynomial");
  }
  return scaled(1.0 / leading());
}

Polynomial Polynomial::scaled(double k) const {
  std::vector<double> c = coeffs_;
  for (double& x : c) {
    x *= k;
  }
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) {
    return Polynomial();
  }
  std::vector<double> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
      out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
  }
  return Polynomial(std::move(out));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  const std::size_t n = std::max(a.coeffs_.size(), b.coeffs_.size());
  std::vector<double> out(n, 0.0);
  const std::size_t oa = n - a.coeffs_.size();
  const std::size_t ob = n - b.coeffs_.size();
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    out[oa + i] += a.coeffs_[i];
  }
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) {
    out[ob + i] += b.coeffs_[i];
  }
  return Polynomial(std::move(out));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  return a + b.scaled(-1.0);
}

Polynomial Polynomial::pow(int n) const {
  if (n < 0) {
    throw InvalidInput("negative polynomial power");
  }
  Polynomial result({1.0});
  for (int i = 0; i < n; ++i) {
    result = result * *this;
  }
  return result;
}

Complex poly_eval(const Polynomial& p, Complex s) {
  Complex acc(0.0, 0.0);
  for (double c : p.coeffs()) {
    acc = acc * s + c;
  }
  return acc;
}

std::vector<Complex> poly_roots(const Polynomial& p, const RootTolerances& tol) {
  const int n = p.degree();
  if (n < 1) {
    throw InvalidInput("poly_roots requires degree >= 1");
  }
  const std::vector<double>& c = p.coeffs();
  if (n == 1) {
    return {Complex(-c[1] / c[0], 0.0)};
  }

  // Companion matrix of the monic polynomial, subdiagonal of ones.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    companion(i, i - 1) = 1.0;
  }
  for (int i = 0; i < n; ++i) {
    companion(i, n - 1) = -c[static_cast<std::size_t>(n - i)] / c[0];
  }
  balance_in_place(companion);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericsError("companion-matrix eigensolve did not converge");
  }

  std::vector<Complex> roots(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Complex r = solver.eigenvalues()(i);
    if (std::abs(r.imag()) < tol.real_snap * (1.0 + std::abs(r.real()))) {
      r = Complex(r.real(), 0.0);
    }
    roots[static_cast<std::size_t>(i)] = r;
  }
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

namespace detail {

GroupedRoots group_conjugate_roots(const std::vector<Complex>& roots,
                                   const RootTolerances& tol) {
  GroupedRoots out;
  std::vector<Complex> pending;  // complex roots awaiting a mate
  for (const Complex& r : roots) {
    if (r.imag() == 0.0 ||
        std::abs(r.imag()) < tol.real_snap * (1.0 + std::abs(r.real()))) {
      out.real_roots.push_back(r.real());
      continue;
    }
    const Complex mate = std::conj(r);
    auto best = pending.end();
    double best_dist = std::numeric_limits<double>::infinity();
    for (auto it = pending.begin(); it != pending.end(); ++it) {
      const double d = std::abs(*it - mate);
      if (d < best_dist) {
        best_dist = d;
        best = it;
      }
    }
    if (best != pending.end() &&
        best_dist <= tol.conjugate_pair * (1.0 + std::abs(mate))) {
      out.pair_reps.push_back(r.imag() > 0.0 ? r : *best);
      pending.erase(best);
    } else {
      pending.push_back(r);
    }
  }
  if (!pending.empty()) {
    throw InvalidInput("complex root without a conjugate mate");
  }
  return out;
}

}  // namespace detail

Polynomial poly_from_roots(const std::vector<Complex>& roots, double leading,
                           const RootTolerances& tol) {
  detail::GroupedRoots grouped = detail::group_conjugate_roots(roots, tol);
  Polynomial p({leading});
  for (double r : grouped.real_roots) {
    p = p * Polynomial({1.0, -r});
  }
  for (const Complex& z : grouped.pair_reps) {
    // (s - z)(s - conj z) = s^2 - 2 Re(z) s + |z|^2
    p = p * Polynomial({1.0, -2.0 * z.real(), std::norm(z)});
  }
  return p;
}

}  // namespace rtistab
