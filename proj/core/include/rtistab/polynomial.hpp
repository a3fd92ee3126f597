#pragma once

#include <complex>
#include <vector>

namespace rtistab {

using Complex = std::complex<double>;

// Tolerances shared by root classification and pairing. Exposed so stress
// tests can tighten or relax them; the defaults suit double precision.
struct RootTolerances {
  double real_snap = 1e-9;       // |im| < real_snap*(1+|re|) snaps to the axis
  double conjugate_pair = 1e-9;  // relative pairing tolerance
};

// Real-coefficient polynomial, coefficients stored highest degree first.
// The zero polynomial is canonically {0}; otherwise the leading
// coefficient is nonzero.
class Polynomial {
public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> coeffs);
  Polynomial(std::initializer_list<double> coeffs)
      : Polynomial(std::vector<double>(coeffs)) {}

  static Polynomial constant(double c) { return Polynomial({c}); }

  [[nodiscard]] const std::vector<double>& coeffs() const { return coeffs_; }
  [[nodiscard]] int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  [[nodiscard]] double leading() const { return coeffs_.front(); }
  [[nodiscard]] bool is_zero() const;

  // Second-highest coefficient of the monic-normalized polynomial
  // (0 for constants).
  [[nodiscard]] double monic_subleading() const;

  [[nodiscard]] Polynomial monic() const;
  [[nodiscard]] Polynomial scaled(double k) const;

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);

  [[nodiscard]] Polynomial pow(int n) const;

private:
  std::vector<double> coeffs_;
};

// Horner evaluation at a complex point.
[[nodiscard]] Complex poly_eval(const Polynomial& p, Complex s);

// All roots via a balanced companion-matrix eigensolve. Imaginary parts of
// near-real roots are snapped to zero. Throws NumericsError if the
// eigensolver fails to converge.
[[nodiscard]] std::vector<Complex> poly_roots(const Polynomial& p,
                                              const RootTolerances& tol = {});

// Real-coefficient polynomial with the given roots and leading coefficient.
// Non-real roots must appear in conjugate pairs (within pairing tolerance);
// an unpaired complex root throws InvalidInput. Conjugate pairs are
// multiplied out as real quadratics so no imaginary residue survives.
[[nodiscard]] Polynomial poly_from_roots(const std::vector<Complex>& roots,
                                         double leading,
                                         const RootTolerances& tol = {});

namespace detail {
// Splits a conjugate-symmetric root set into real roots and one
// representative (im > 0) per conjugate pair. Throws on an unpaired
// complex root.
struct GroupedRoots {
  std::vector<double> real_roots;
  std::vector<Complex> pair_reps;
};
[[nodiscard]] GroupedRoots group_conjugate_roots(const std::vector<Complex>& roots,
                                                 const RootTolerances& tol);
}  // namespace detail

}  // namespace rtistab
