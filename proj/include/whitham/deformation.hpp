#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "whitham/bezout.hpp"
#include "whitham/spectral.hpp"

namespace whitham {

enum class Case { A, B, C, D, E, F };
const char* to_string(Case c);

struct CaseLabel {
  Case label = Case::A;
  FactorStructure evidence;
  bool conformal = false;
  bool borderline = false;  // a gcd cluster sat near the matching radius
  std::vector<std::string> warnings;

  bool deformable() const { return label == Case::A || label == Case::B || label == Case::E; }
  // Case (b) split by the degree of G.
  bool g_linear() const { return label == Case::B && evidence.d_G == 1; }
};

// |P_0| <= tol ||P|| counts as conformal; gcd_tol is the root matching radius.
CaseLabel classify(const SpectralTriple& t, double tol = 1e-10, double gcd_tol = kGcdClusterRadius);

// Parameters of a tangent vector. Qt is the reduced quadratic Q~ with bound
// 2 in case (a), 1 in case (b) with G linear, 0 in case (b) with G quadratic
// and in case (e) (where it is Q_1). r selects within the affine family in
// the last two cases and must be 0 otherwise.
struct DeformationParams {
  Polynomial Qt;
  double r = 0.0;
};

// Last coefficient of the minimal solution X of A X - B Y = C, degree deg B - 1:
// the leading coefficient of the confluent interpolant of C/A at the roots of B.
cplx interpolant_leading(const Polynomial& A, const Polynomial& B, const Polynomial& C);

// R(Q) at a case-(a) point.
cplx r_value(const SpectralTriple& t, const Polynomial& Q);
cplx r_value(const CaseLabel& label, const Polynomial& Q);

// Basis of {Q in P^2_R : R(Q) = 0}, orthonormal in coefficient space.
struct RKernel {
  std::array<Polynomial, 2> basis;
  std::array<double, 3> singular_values{};  // of R on P^2_R as a 2 x 3 real map
  double scale = 0.0;
};
RKernel r_kernel(const SpectralTriple& t, double rank_tol = 1e-8);

// Case (c) diagnostic: the degree-dropping coefficient with Q~ = 1.
cplx case_c_indicator(const SpectralTriple& t);

struct QSolution {
  Polynomial c1, c2, Q;
  Polynomial c1_tilde, c2_tilde;
  double residual = 0.0;  // relative residual of b1 c2 - b2 c1 - Q P
};

QSolution solve_q_equation(const SpectralTriple& t, const CaseLabel& label,
                           const DeformationParams& params, double tol = 1e-9);
QSolution solve_q_equation(const SpectralTriple& t, const DeformationParams& params,
                           double tol = 1e-9);

struct TangentResiduals {
  double empdi1 = 0.0, empdi2 = 0.0;      // relative, per equation
  double residue1 = 0.0, residue2 = 0.0;  // residue-tangent conditions
  double scaling = 0.0;                   // derivative of log scaling
  double q_equation = 0.0;
  double reconcile = 0.0;                 // mismatch of the two P-dot solutions
  double max() const;
};

struct TangentVector {
  Polynomial P_dot, b1_dot, b2_dot;
  DeformationParams params;
  Polynomial c1, c2, Q;
  TangentResiduals residuals;
  bool ill_conditioned = false;

  SpectralTriple as_triple(int g) const;
};

// Right-hand side 2P(c^ - zeta c^') + P' zeta c^ for c^ = (zeta^2 - 1) c.
Polynomial empdi_rhs(const Polynomial& P, const Polynomial& c);

// Derivative of the log of the scaling component along P_dot.
double scaling_log_derivative(const Polynomial& P, const Polynomial& P_dot);

// Tangent-condition residue: P'_1 b_0 + P_1 b'_0 - 2 P'_0 b_1 - 2 P_0 b'_1.
cplx residue_tangent(const Polynomial& P, const Polynomial& b, const Polynomial& P_dot,
                     const Polynomial& b_dot);

TangentVector solve_empdi(const SpectralTriple& t, const CaseLabel& label, const QSolution& q,
                          double tol = 1e-9);

TangentVector tangent(const SpectralTriple& t, const CaseLabel& label,
                      const DeformationParams& params, double tol = 1e-9);
TangentVector tangent(const SpectralTriple& t, const DeformationParams& params, double tol = 1e-9);

// The canonical parameter pair for the case of t.
std::array<DeformationParams, 2> parameter_basis(const SpectralTriple& t, const CaseLabel& label);

struct TangentBasis {
  CaseLabel label;
  std::array<TangentVector, 2> vectors;
  double gram_determinant = 0.0;  // of the normalized coefficient vectors
};
TangentBasis tangent_basis(const SpectralTriple& t, double tol = 1e-9);

// Matrix of c^ -> 2P(c^ - zeta c^') + P' zeta c^ on P^{g+3} (complex, 3g+6 x g+4).
Eigen::MatrixXcd homogeneous_operator(const Polynomial& P, int g);
// Smallest singular value after normalizing each row to unit length.
double homogeneous_min_singular(const Polynomial& P, int g);

// c^1, c^2 from a tangent vector.
std::array<Polynomial, 2> recover_chat(const SpectralTriple& t, const TangentVector& v,
                                       double rank_tol = 1e-10);

// tau = b2_0 / b1_0.
cplx conformal_type(const SpectralTriple& t);
// tau_dot = Q_0 tau P_0 / (b1_0 b2_0).
cplx conformal_type_rate(const SpectralTriple& t, const TangentVector& v);

}  // namespace whitham
