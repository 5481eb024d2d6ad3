#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "whitham/curve.hpp"

namespace whitham {

// (P, b1, b2) with P in P^{2g+2}_R and b^i in P^{g+3}_R.
struct SpectralTriple {
  int g = 0;
  Polynomial P, b1, b2;

  // Bounds set to 2g+2 and g+3; throws DegreeBound if a polynomial is too long.
  SpectralTriple() = default;
  SpectralTriple(int genus, Polynomial P, Polynomial b1, Polynomial b2);

  const Polynomial& b(int i) const { return i == 1 ? b1 : b2; }
};

// Componentwise x + h v.
SpectralTriple axpy(const SpectralTriple& x, double h, const SpectralTriple& v);
double coefficient_norm(const SpectralTriple& t);

// Real coordinates: P (2g+3), b1 (g+4), b2 (g+4), 4g+11 in total.
Eigen::VectorXd coordinates(const SpectralTriple& t);
SpectralTriple from_coordinates(int g, const Eigen::VectorXd& x);
int coordinate_count(int g);

struct ToleranceProfile {
  double alg = 1e-10;       // algebraic checks
  double integral = 1e-8;   // lattice checks on periods and closings
  int quad_order = 32;
  double det = 1e-10;       // linear independence of principal parts
};

struct CheckEntry {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  // Margin entries pass when residual > tolerance (distances that must stay
  // away from zero); the others pass when residual <= tolerance.
  bool margin = false;
  bool pass = false;
  std::optional<long long> lattice;  // 2 pi i m target for periods and closings
  std::string note;
};

struct ValidationReport {
  std::vector<CheckEntry> entries;
  bool pass = false;
  const CheckEntry* find(const std::string& name) const;
};

ValidationReport validate(const SpectralTriple& t, const ToleranceProfile& tol = {},
                          const CycleBasis* basis = nullptr);

// Components of the condition map. Periods are ordered A_1..A_g, B_1..B_g for
// Theta^1 and then for Theta^2; closings are (gamma+, gamma-) for Theta^1 then
// Theta^2; residues are P_1 b^i_0 - 2 P_0 b^i_1.
struct PsiVector {
  int g = 0;
  std::vector<cplx> periods;
  std::vector<cplx> closings;
  std::vector<cplx> residues;
  cplx scaling = 1.0;
  std::vector<double> errors;      // quadrature estimates for periods then closings
  std::vector<double> magnitudes;  // sum |w f| for periods then closings

  // Re/Im of every period, closing and residue, then Re of the scaling:
  // 8g + 8 + 4 + 1 real rows.
  Eigen::VectorXd flatten() const;
  // The same rows measured from the targets: 2 pi i m with m the nearest
  // integers (or the given ones), 0 for residues, 1 for the scaling.
  Eigen::VectorXd residual(const std::vector<long long>* lattice = nullptr) const;
  std::vector<long long> lattice() const;
  double max_residual(const std::vector<long long>* lattice = nullptr) const;
};

// prod |1 - alpha_k|^2 / P(1) over the roots alpha_k of P in the closed unit
// disc. Equals 1 exactly for P of the product form and is smooth through
// the conformal case.
cplx scaling_value(const Polynomial& P, const HyperellipticCurve& curve);

PsiVector psi(const SpectralTriple& t, const CycleBasis& basis, int quad_order = 32);
PsiVector psi(const SpectralTriple& t, int quad_order = 32);

// Ψ with the basis transported to t.
PsiVector psi_transported(const SpectralTriple& t, const CycleBasis& basis, int quad_order = 32);

// (Psi(t + h v) - Psi(t - h v)) / 2h, flattened.
Eigen::VectorXd d_psi(const SpectralTriple& t, const SpectralTriple& v, double h,
                      const CycleBasis& basis, int quad_order = 32);

// Central-difference Jacobian of the flattened Psi in the real coordinates,
// (8g+13) x (4g+11). h is relative to max(1, |x_k|).
Eigen::MatrixXd psi_jacobian(const SpectralTriple& t, const CycleBasis& basis, double h = 1e-5,
                             int quad_order = 32);

// P -> P / lambda^2, b^i -> b^i / lambda with lambda^2 = P(1) / prod |1-alpha_k|^2.
SpectralTriple normalize(const SpectralTriple& t);

// Leading Laurent coefficient of Theta = b dzeta/(zeta^2 eta) at zeta = 0 in
// the local coordinate (zeta, or sqrt(zeta) when P_0 = 0), up to a common factor.
cplx principal_part(const Polynomial& P, const Polynomial& b);
// Im(conj(z1) z2) / (|z1||z2|): zero iff the principal parts are R-dependent.
double principal_determinant(const SpectralTriple& t);

}  // namespace whitham
