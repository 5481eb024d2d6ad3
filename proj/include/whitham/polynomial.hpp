#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace whitham {

using cplx = std::complex<double>;

// Trailing coefficients below this fraction of the largest one are dropped.
inline constexpr double kTrimRelative = 1e-13;

// Dense complex polynomial in zeta, coefficient i multiplies zeta^i.
// bound() is the nominal degree the polynomial is regarded as having; it may
// exceed the numerical degree (roots at infinity of a section).
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<cplx> coeffs);
  Polynomial(std::vector<cplx> coeffs, int bound);
  Polynomial(std::initializer_list<cplx> coeffs);

  static Polynomial constant(cplx c);
  static Polynomial monomial(int k, cplx c = 1.0);
  static Polynomial from_roots(std::span<const cplx> roots, cplx leading = 1.0);

  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  int bound() const { return bound_; }
  Polynomial with_bound(int k) const;
  bool is_zero() const { return c_.empty(); }

  cplx operator[](int i) const {
    return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : cplx(0.0);
  }
  cplx leading() const { return c_.empty() ? cplx(0.0) : c_.back(); }
  const std::vector<cplx>& coeffs() const { return c_; }
  std::vector<cplx> padded(int k) const;

  cplx operator()(cplx z) const;
  Polynomial derivative() const;
  double norm() const;
  double max_abs() const;
  Polynomial monic() const;
  Polynomial shifted(int k) const;
  Polynomial conj_coeffs() const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(cplx s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, cplx s) { return a *= s; }
  friend Polynomial operator*(cplx s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= cplx(s); }
  friend Polynomial operator*(double s, Polynomial a) { return a *= cplx(s); }

 private:
  void trim();
  std::vector<cplx> c_;
  int bound_ = 0;
};

// Euclidean division; den must be nonzero.
std::pair<Polynomial, Polynomial> divmod(const Polynomial& num, const Polynomial& den);

// Least-squares quotient num/den; robust when den has roots of either size.
// residual receives ||num - den*q|| / ||num|| when non-null.
Polynomial exact_quotient(const Polynomial& num, const Polynomial& den,
                          double* residual = nullptr);

// ||a - b|| / max(||a||, ||b||, tiny).
double relative_distance(const Polynomial& a, const Polynomial& b);

}  // namespace whitham
