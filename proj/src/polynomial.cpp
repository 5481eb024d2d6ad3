#include "whitham/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "whitham/error.hpp"

namespace whitham {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegreeBound: return "degree-bound";
    case ErrorKind::UndefinedRoots: return "undefined-roots";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::NoSolution: return "no-solution";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::RealityViolation: return "reality-violation";
    case ErrorKind::CurveViolation: return "curve-violation";
    case ErrorKind::NotDeformable: return "not-deformable";
    case ErrorKind::Inconsistent: return "inconsistent";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::StepSize: return "step-size";
    case ErrorKind::ProjectionFailure: return "projection-failure";
    case ErrorKind::UndefinedConformalType: return "undefined-conformal-type";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

Polynomial::Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
  trim();
  bound_ = std::max(degree(), 0);
}

Polynomial::Polynomial(std::vector<cplx> coeffs, int bound) : c_(std::move(coeffs)) {
  trim();
  if (degree() > bound) {
    fail(ErrorKind::DegreeBound, "degree " + std::to_string(degree()) +
                                     " exceeds nominal bound " + std::to_string(bound));
  }
  bound_ = std::max(bound, 0);
}

Polynomial::Polynomial(std::initializer_list<cplx> coeffs)
    : Polynomial(std::vector<cplx>(coeffs)) {}

Polynomial Polynomial::constant(cplx c) { return Polynomial(std::vector<cplx>{c}); }

Polynomial Polynomial::monomial(int k, cplx c) {
  std::vector<cplx> v(k + 1, 0.0);
  v[k] = c;
  return Polynomial(std::move(v));
}

Polynomial Polynomial::from_roots(std::span<const cplx> roots, cplx leading) {
  std::vector<cplx> v{leading};
  for (cplx r : roots) {
    std::vector<cplx> w(v.size() + 1, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      w[i + 1] += v[i];
      w[i] -= r * v[i];
    }
    v = std::move(w);
  }
  return Polynomial(std::move(v));
}

void Polynomial::trim() {
  double m = 0.0;
  for (cplx z : c_) m = std::max(m, std::abs(z));
  if (m == 0.0) {
    c_.clear();
    return;
  }
  while (!c_.empty() && std::abs(c_.back()) <= kTrimRelative * m) c_.pop_back();
}

Polynomial Polynomial::with_bound(int k) const { return Polynomial(c_, k); }

std::vector<cplx> Polynomial::padded(int k) const {
  std::vector<cplx> v(k + 1, 0.0);
  for (int i = 0; i <= std::min(k, degree()); ++i) v[i] = c_[i];
  return v;
}

cplx Polynomial::operator()(cplx z) const {
  cplx acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  std::vector<cplx> v;
  for (int i = 1; i <= degree(); ++i) v.push_back(double(i) * c_[i]);
  Polynomial d(std::move(v));
  d.bound_ = std::max(bound_ - 1, std::max(d.degree(), 0));
  return d;
}

double Polynomial::norm() const {
  double s = 0.0;
  for (cplx z : c_) s += std::norm(z);
  return std::sqrt(s);
}

double Polynomial::max_abs() const {
  double m = 0.0;
  for (cplx z : c_) m = std::max(m, std::abs(z));
  return m;
}

Polynomial Polynomial::monic() const {
  if (is_zero()) fail(ErrorKind::Precondition, "monic of zero polynomial");
  Polynomial r = *this;
  cplx l = leading();
  for (cplx& z : r.c_) z /= l;
  r.c_.back() = 1.0;
  return r;
}

Polynomial Polynomial::shifted(int k) const {
  if (is_zero()) {
    Polynomial z;
    z.bound_ = bound_ + k;
    return z;
  }
  std::vector<cplx> v(k, 0.0);
  v.insert(v.end(), c_.begin(), c_.end());
  return Polynomial(std::move(v), bound_ + k);
}

Polynomial Polynomial::conj_coeffs() const {
  Polynomial r = *this;
  for (cplx& z : r.c_) z = std::conj(z);
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (cplx& z : r.c_) z = -z;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  bound_ = std::max(bound_, o.bound_);
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  bound_ = std::max(bound_, o.bound_);
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(cplx s) {
  for (cplx& z : c_) z *= s;
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  r.bound_ = a.bound_ + b.bound_;
  if (a.is_zero() || b.is_zero()) return r;
  r.c_.assign(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
  r.trim();
  return r;
}

std::pair<Polynomial, Polynomial> divmod(const Polynomial& num, const Polynomial& den) {
  if (den.is_zero()) fail(ErrorKind::Precondition, "division by zero polynomial");
  int n = num.degree(), m = den.degree();
  if (n < m) return {Polynomial(), num};
  std::vector<cplx> r(num.coeffs().begin(), num.coeffs().end());
  std::vector<cplx> q(n - m + 1, 0.0);
  cplx lead = den.leading();
  for (int k = n - m; k >= 0; --k) {
    q[k] = r[k + m] / lead;
    for (int j = 0; j <= m; ++j) r[k + j] -= q[k] * den[j];
  }
  r.resize(std::max(m, 0));
  return {Polynomial(std::move(q)), Polynomial(std::move(r))};
}

Polynomial exact_quotient(const Polynomial& num, const Polynomial& den, double* residual) {
  if (den.is_zero()) fail(ErrorKind::Precondition, "division by zero polynomial");
  int bound = std::max(num.bound() - den.bound(), 0);
  if (num.is_zero()) {
    if (residual) *residual = 0.0;
    return Polynomial({}, bound);
  }
  int n = num.degree(), m = den.degree();
  if (n < m) {
    if (residual) *residual = 1.0;
    return Polynomial({}, bound);
  }
  int qn = n - m + 1;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n + 1, qn);
  for (int j = 0; j < qn; ++j)
    for (int i = 0; i <= m; ++i) M(i + j, j) = den[i];
  Eigen::VectorXcd rhs(n + 1);
  for (int i = 0; i <= n; ++i) rhs(i) = num[i];
  Eigen::VectorXcd q = M.colPivHouseholderQr().solve(rhs);
  if (residual) *residual = (M * q - rhs).norm() / rhs.norm();
  std::vector<cplx> v(q.data(), q.data() + qn);
  Polynomial out(std::move(v));
  return out.degree() <= bound ? out.with_bound(bound) : out;
}

double relative_distance(const Polynomial& a, const Polynomial& b) {
  double s = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / s;
}

}  // namespace whitham
