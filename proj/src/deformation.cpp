#include "whitham/deformation.hpp"

#include <algorithm>
#include <cmath>

#include "whitham/error.hpp"

namespace whitham {

const char* to_string(Case c) {
  switch (c) {
    case Case::A: return "a";
    case Case::B: return "b";
    case Case::C: return "c";
    case Case::D: return "d";
    case Case::E: return "e";
    case Case::F: return "f";
  }
  return "?";
}

namespace {

double safe_ratio(double num, double den) { return den > 0 ? num / den : num; }

Polynomial real_basis_element(int k, int deg) {
  std::vector<double> x(deg + 1, 0.0);
  x[k] = 1.0;
  return from_real_coordinates(x, deg);
}

}  // namespace

// ---- classification -------------------------------------------------------------

CaseLabel classify(const SpectralTriple& t, double tol, double gcd_tol) {
  CaseLabel out;
  out.evidence = factor_structure(t.P, t.b1, t.b2, gcd_tol);
  const FactorStructure& fs = out.evidence;
  out.borderline = fs.borderline;
  if (fs.borderline) out.warnings.push_back("a root cluster sat near the gcd matching radius");
  out.conformal = std::abs(t.P[0]) <= tol * t.P.norm();
  if (out.conformal) {
    bool zeta_factor = fs.d_F == 2 && std::abs(fs.F[0]) <= 1e-8 && fs.F.degree() == 1;
    out.label = (zeta_factor && fs.d_G == 0) ? Case::E : Case::F;
    if (fs.d_F == 0) out.warnings.push_back("P_0 = 0 but zeta does not divide both b^i");
  } else if (fs.d_F == 0 && fs.d_G == 0) {
    out.label = Case::A;
  } else if (fs.d_F == 0 && fs.d_G <= 2) {
    out.label = Case::B;
  } else if (fs.d_F == 2 && fs.d_G == 0) {
    out.label = Case::C;
  } else {
    out.label = Case::D;
  }
  return out;
}

// ---- R --------------------------------------------------------------------------

cplx interpolant_leading(const Polynomial& A, const Polynomial& B, const Polynomial& C) {
  if (B.degree() < 1) fail(ErrorKind::UndefinedRoots, "interpolation needs deg B >= 1");
  BezoutSolution s = minimal_solution(A, B, C);
  return s.X[B.degree() - s.D.degree() - 1];
}

cplx r_value(const CaseLabel& label, const Polynomial& Q) {
  if (label.label != Case::A) fail(ErrorKind::Precondition, "R is defined in case (a) only");
  const FactorStructure& fs = label.evidence;
  if (fs.b2_tilde.degree() < 1) fail(ErrorKind::UndefinedRoots, "b2~ has no roots");
  return interpolant_leading(fs.b1_tilde, fs.b2_tilde, Q.with_bound(2) * fs.P_tilde);
}

cplx r_value(const SpectralTriple& t, const Polynomial& Q) { return r_value(classify(t), Q); }

RKernel r_kernel(const SpectralTriple& t, double rank_tol) {
  CaseLabel label = classify(t);
  if (label.label != Case::A) fail(ErrorKind::Precondition, "R is defined in case (a) only");
  // Orthonormal basis of P^2_R in coefficient space.
  std::array<Polynomial, 3> f;
  for (int k = 0; k < 3; ++k) {
    f[k] = real_basis_element(k, 2);
    f[k] = f[k] * (1.0 / f[k].norm());
  }
  Eigen::Matrix<double, 2, 3> M;
  double scale = 0.0;
  for (int k = 0; k < 3; ++k) {
    cplx r = r_value(label, f[k]);
    M(0, k) = r.real();
    M(1, k) = r.imag();
    const FactorStructure& fs = label.evidence;
    scale = std::max(scale, minimal_solution(fs.b1_tilde, fs.b2_tilde, f[k] * fs.P_tilde).X.norm());
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>> svd(M, Eigen::ComputeFullV);
  RKernel out;
  out.scale = scale;
  out.singular_values = {svd.singularValues()[0], svd.singularValues()[1], 0.0};
  double s0 = svd.singularValues()[0], s1 = svd.singularValues()[1];
  if (s0 <= 1e-12 * std::max(scale, 1e-300))
    fail(ErrorKind::Degenerate, "R vanishes on all of P^2_R");
  if (s1 > rank_tol * s0)
    fail(ErrorKind::Degenerate, "R has real rank 2 on P^2_R; the reality relation fails");
  for (int j = 0; j < 2; ++j) {
    Eigen::Vector3d v = svd.matrixV().col(1 + j);
    int big = 0;
    for (int k = 1; k < 3; ++k)
      if (std::abs(v[k]) > std::abs(v[big]) + 1e-12) big = k;
    if (v[big] < 0) v = -v;
    Polynomial q = f[0] * v[0] + f[1] * v[1] + f[2] * v[2];
    out.basis[j] = q.with_bound(2);
  }
  return out;
}

cplx case_c_indicator(const SpectralTriple& t) {
  CaseLabel label = classify(t);
  if (label.label != Case::C) fail(ErrorKind::Precondition, "not a case (c) point");
  const FactorStructure& fs = label.evidence;
  return interpolant_leading(fs.b1_tilde, fs.b2_tilde, fs.P_tilde);
}

// ---- Q equation -------------------------------------------------------------------

QSolution solve_q_equation(const SpectralTriple& t, const CaseLabel& label,
                           const DeformationParams& params, double tol) {
  if (!label.deformable()) {
    std::string msg = std::string("case (") + to_string(label.label) + ") admits no deformations";
    if (label.label == Case::C) {
      cplx ind = case_c_indicator(t);
      msg += "; R(., F) = " + std::to_string(ind.real()) + " + " + std::to_string(ind.imag()) + "i";
    }
    fail(ErrorKind::NotDeformable, msg);
  }
  const FactorStructure& fs = label.evidence;
  int qbound = 0;
  if (label.label == Case::A) qbound = 2;
  else if (label.g_linear()) qbound = 1;
  Polynomial Qt = params.Qt.with_bound(qbound);
  if (!is_real_section(Qt, qbound, 1e-12 * std::max(1.0, Qt.norm())).is_real)
    fail(ErrorKind::RealityViolation, "Q~ must be a real section");
  bool family = label.label == Case::E || (label.label == Case::B && fs.d_G == 2);
  if (!family && params.r != 0.0)
    fail(ErrorKind::Precondition, "r is only a parameter when G is quadratic or in case (e)");

  Polynomial Fc = label.conformal ? Polynomial::constant(1.0) : fs.F;
  Polynomial M = label.conformal ? fs.F : Polynomial::constant(1.0);
  const Polynomial& A = fs.b1_tilde;
  const Polynomial& B = fs.b2_tilde;
  Polynomial C = (M * Qt * fs.P_tilde).with_bound(M.bound() + qbound + fs.P_tilde.bound());
  int a = A.bound(), b = B.bound(), c = C.bound();

  Polynomial X, Y;
  if (c - a - b < 0) {
    BezoutSolution s = minimal_solution(A, B, C);
    if (label.label == Case::A) {
      cplx R = s.X[b - 1];
      double sc = std::max(s.X.norm(), 1e-300);
      if (std::abs(R) > tol * std::max(1.0, sc) && !Qt.is_zero())
        fail(ErrorKind::Precondition, "R(Q) does not vanish");
    }
    s = realify(A, B, C, a, b, c, s);
    X = s.X;
    Y = s.Y;
  } else {
    SolutionSpace sp = solution_space(A, B, C, a, b, c, 0);
    if (sp.param_degree != 0) fail(ErrorKind::Shape, "unexpected solution family dimension");
    std::tie(X, Y) = sp.member(Polynomial::constant(params.r));
  }
  QSolution out;
  out.c2_tilde = X;
  out.c1_tilde = Y;
  out.c1 = (Fc * fs.F1 * Y).with_bound(t.g + 1);
  out.c2 = (Fc * fs.F2 * X).with_bound(t.g + 1);
  out.Q = (fs.F * fs.G * Qt).with_bound(2);
  Polynomial lhs = t.b1 * out.c2 - t.b2 * out.c1;
  Polynomial rhs = out.Q * t.P;
  double den = t.b1.norm() * out.c2.norm() + t.b2.norm() * out.c1.norm() + rhs.norm();
  out.residual = safe_ratio((lhs - rhs).norm(), den);
  return out;
}

QSolution solve_q_equation(const SpectralTriple& t, const DeformationParams& params, double tol) {
  return solve_q_equation(t, classify(t), params, tol);
}

// ---- EMPDi ------------------------------------------------------------------------

Polynomial empdi_rhs(const Polynomial& P, const Polynomial& c) {
  Polynomial zz({-1.0, 0.0, 1.0});
  Polynomial ch = (zz * c).with_bound(c.bound() + 2);
  std::vector<cplx> d1(ch.bound() + 1), e(P.bound() + 1);
  for (int k = 0; k <= ch.bound(); ++k) d1[k] = (1.0 - k) * ch[k];
  for (int k = 0; k <= P.bound(); ++k) e[k] = double(k) * P[k];
  Polynomial D1(d1, ch.bound()), E(e, P.bound());
  return (2.0 * P * D1 + E * ch).with_bound(P.bound() + ch.bound());
}

double scaling_log_derivative(const Polynomial& P, const Polynomial& P_dot) {
  HyperellipticCurve curve = build_curve(P);
  Polynomial dP = P.derivative();
  double s = -(P_dot(1.0) / P(1.0)).real();
  for (const BranchPair& bp : curve.branch_pairs) {
    cplx a = bp.inner;
    cplx adot = -P_dot(a) / dP(a);
    s -= 2.0 * (adot / (1.0 - a)).real();
  }
  return s;
}

cplx residue_tangent(const Polynomial& P, const Polynomial& b, const Polynomial& Pd,
                     const Polynomial& bd) {
  return Pd[1] * b[0] + P[1] * bd[0] - 2.0 * Pd[0] * b[1] - 2.0 * P[0] * bd[1];
}

namespace {

// Coefficient norms rather than the four products: those can all vanish
// together (P_1 = b_1 = 0) while the expression is still meaningful.
double residue_tangent_scale(const Polynomial& P, const Polynomial& b, const Polynomial& Pd,
                             const Polynomial& bd) {
  return Pd.norm() * b.norm() + P.norm() * bd.norm();
}

double empdi_residual(const Polynomial& P, const Polynomial& b, const Polynomial& Pd,
                      const Polynomial& bd, const Polynomial& rhs) {
  Polynomial lhs = Pd * b - 2.0 * P * bd;
  double den = Pd.norm() * b.norm() + 2 * P.norm() * bd.norm() + rhs.norm();
  return safe_ratio((lhs - rhs).norm(), den);
}

}  // namespace

double TangentResiduals::max() const {
  return std::max({empdi1, empdi2, residue1, residue2, scaling, q_equation, reconcile});
}

SpectralTriple TangentVector::as_triple(int g) const { return SpectralTriple(g, P_dot, b1_dot, b2_dot); }

TangentVector solve_empdi(const SpectralTriple& t, const CaseLabel& label, const QSolution& q,
                          double tol) {
  int g = t.g;
  const FactorStructure& fs = label.evidence;
  std::array<Polynomial, 2> rhs = {empdi_rhs(t.P, q.c1), empdi_rhs(t.P, q.c2)};
  std::array<SolutionSpace, 2> sp;
  bool ill = false;
  for (int i = 0; i < 2; ++i) {
    int d = fs.d_F + (i == 0 ? fs.d_1 : fs.d_2);
    sp[i] = solution_space(t.b(i + 1), 2.0 * t.P, rhs[i], g + 3, 2 * g + 2, 3 * g + 5, d);
    ill = ill || sp[i].base.ill_conditioned;
  }
  int n1 = sp[0].param_degree + 1, n2 = sp[1].param_degree + 1;
  int nP = 2 * g + 3;
  int rows = nP + 3;
  Eigen::MatrixXd M(rows, n1 + n2);
  Eigen::VectorXd r0(rows);

  auto constraint_rows = [&](const Polynomial& dP1, const Polynomial& db1, const Polynomial& dP2,
                             bool with_i1) {
    Eigen::VectorXd v(rows);
    std::vector<double> x = real_coordinates((dP1 - dP2).with_bound(2 * g + 2), 2 * g + 2);
    for (int k = 0; k < nP; ++k) v[k] = x[k];
    if (with_i1) {
      v[nP] = scaling_log_derivative(t.P, dP1);
      cplx rt = residue_tangent(t.P, t.b1, dP1, db1);
      v[nP + 1] = rt.real();
      v[nP + 2] = rt.imag();
    } else {
      v[nP] = v[nP + 1] = v[nP + 2] = 0.0;
    }
    return v;
  };
  const Polynomial& P1 = sp[0].base.X;
  const Polynomial& B1 = sp[0].base.Y;
  const Polynomial& P2 = sp[1].base.X;
  r0 = constraint_rows(P1, B1, P2, true);
  for (int k = 0; k < n1; ++k) {
    Polynomial e = real_basis_element(k, n1 - 1);
    M.col(k) = constraint_rows(e * sp[0].hom_X, e * sp[0].hom_Y, Polynomial(), true);
  }
  for (int k = 0; k < n2; ++k) {
    Polynomial e = real_basis_element(k, n2 - 1);
    M.col(n1 + k) = constraint_rows(Polynomial(), Polynomial(), e * sp[1].hom_X, false);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smax = svd.singularValues()[0];
  double smin = svd.singularValues()[svd.singularValues().size() - 1];
  if (!(smin > 1e-10 * smax))
    fail(ErrorKind::Degenerate, "reconciliation system is rank deficient");
  Eigen::VectorXd u = svd.solve(-r0);
  double mismatch = (M * u + r0).norm();

  Polynomial U1 = from_real_coordinates(std::vector<double>(u.data(), u.data() + n1), n1 - 1);
  Polynomial U2 = from_real_coordinates(std::vector<double>(u.data() + n1, u.data() + n1 + n2), n2 - 1);
  auto [Pd1, bd1] = sp[0].member(U1);
  auto [Pd2, bd2] = sp[1].member(U2);

  TangentVector v;
  v.P_dot = realify_section(((Pd1 + Pd2) * 0.5).with_bound(2 * g + 2), 2 * g + 2);
  v.b1_dot = realify_section(bd1.with_bound(g + 3), g + 3);
  v.b2_dot = realify_section(bd2.with_bound(g + 3), g + 3);
  v.c1 = q.c1;
  v.c2 = q.c2;
  v.Q = q.Q;
  v.ill_conditioned = ill;
  auto& R = v.residuals;
  double scale = std::max({Pd1.norm(), Pd2.norm(), bd1.norm(), bd2.norm()});
  R.reconcile = safe_ratio(mismatch, scale);
  R.empdi1 = empdi_residual(t.P, t.b1, v.P_dot, v.b1_dot, rhs[0]);
  R.empdi2 = empdi_residual(t.P, t.b2, v.P_dot, v.b2_dot, rhs[1]);
  R.residue1 = safe_ratio(std::abs(residue_tangent(t.P, t.b1, v.P_dot, v.b1_dot)),
                          residue_tangent_scale(t.P, t.b1, v.P_dot, v.b1_dot));
  R.residue2 = safe_ratio(std::abs(residue_tangent(t.P, t.b2, v.P_dot, v.b2_dot)),
                          residue_tangent_scale(t.P, t.b2, v.P_dot, v.b2_dot));
  R.scaling = std::abs(scaling_log_derivative(t.P, v.P_dot)) /
              std::max(1.0, v.P_dot.norm() / std::max(t.P.norm(), 1e-300));
  R.q_equation = q.residual;
  if (R.reconcile > tol)
    fail(ErrorKind::Inconsistent,
         "the two P-dot solutions cannot be reconciled (mismatch " + std::to_string(R.reconcile) +
             "); the point is probably not on the moduli space");
  return v;
}

TangentVector tangent(const SpectralTriple& t, const CaseLabel& label,
                      const DeformationParams& params, double tol) {
  QSolution q = solve_q_equation(t, label, params, tol);
  TangentVector v = solve_empdi(t, label, q, tol);
  v.params = params;
  return v;
}

TangentVector tangent(const SpectralTriple& t, const DeformationParams& params, double tol) {
  return tangent(t, classify(t), params, tol);
}

std::array<DeformationParams, 2> parameter_basis(const SpectralTriple& t, const CaseLabel& label) {
  switch (label.label) {
    case Case::A: {
      RKernel k = r_kernel(t);
      return {DeformationParams{k.basis[0], 0.0}, DeformationParams{k.basis[1], 0.0}};
    }
    case Case::B:
      if (label.evidence.d_G == 1)
        return {DeformationParams{Polynomial({1.0, 1.0}, 1), 0.0},
                DeformationParams{Polynomial({cplx(0, 1), cplx(0, -1)}, 1), 0.0}};
      [[fallthrough]];
    case Case::E:
      return {DeformationParams{Polynomial::constant(1.0), 0.0},
              DeformationParams{Polynomial(), 1.0}};
    default:
      fail(ErrorKind::NotDeformable,
           std::string("case (") + to_string(label.label) + ") admits no deformations");
  }
}

TangentBasis tangent_basis(const SpectralTriple& t, double tol) {
  TangentBasis out;
  out.label = classify(t);
  auto params = parameter_basis(t, out.label);
  for (int j = 0; j < 2; ++j) out.vectors[j] = tangent(t, out.label, params[j], tol);
  auto flat = [&](const TangentVector& v) {
    Eigen::VectorXd x = coordinates(v.as_triple(t.g));
    double n = x.norm();
    return n > 0 ? Eigen::VectorXd(x / n) : x;
  };
  Eigen::VectorXd x0 = flat(out.vectors[0]), x1 = flat(out.vectors[1]);
  double c = x0.dot(x1);
  out.gram_determinant = x0.squaredNorm() * x1.squaredNorm() - c * c;
  if (!(out.gram_determinant >= 1e-8))
    fail(ErrorKind::Degenerate, "tangent basis vectors are not independent");
  return out;
}

// ---- homogeneous operator and recovery ---------------------------------------------

Eigen::MatrixXcd homogeneous_operator(const Polynomial& P, int g) {
  int rows = 3 * g + 6, cols = g + 4;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(rows, cols);
  for (int k = 0; k < cols; ++k)
    for (int m = k; m < rows; ++m) H(m, k) = double(2 + m - 3 * k) * P[m - k];
  return H;
}

double homogeneous_min_singular(const Polynomial& P, int g) {
  Eigen::MatrixXcd H = homogeneous_operator(P, g);
  for (int i = 0; i < H.rows(); ++i) {
    double n = H.row(i).norm();
    if (n > 0) H.row(i) /= n;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H);
  return svd.singularValues()[svd.singularValues().size() - 1];
}

std::array<Polynomial, 2> recover_chat(const SpectralTriple& t, const TangentVector& v,
                                       double rank_tol) {
  int g = t.g;
  Eigen::MatrixXcd H = homogeneous_operator(t.P, g);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (!(s[s.size() - 1] > rank_tol * s[0]))
    fail(ErrorKind::Degenerate, "homogeneous operator is numerically singular");
  std::array<Polynomial, 2> out;
  for (int i = 1; i <= 2; ++i) {
    Polynomial rhs = v.P_dot * t.b(i) - 2.0 * t.P * (i == 1 ? v.b1_dot : v.b2_dot);
    Eigen::VectorXcd r(H.rows());
    for (int m = 0; m < H.rows(); ++m) r[m] = rhs[m];
    Eigen::VectorXcd c = svd.solve(r);
    out[i - 1] = Polynomial(std::vector<cplx>(c.data(), c.data() + c.size()), g + 3);
  }
  return out;
}

cplx conformal_type(const SpectralTriple& t) {
  if (t.b1[0] == 0.0) fail(ErrorKind::UndefinedConformalType, "b1_0 = 0: conformal type undefined");
  return t.b2[0] / t.b1[0];
}

cplx conformal_type_rate(const SpectralTriple& t, const TangentVector& v) {
  if (std::abs(t.P[0]) <= 1e-14 * t.P.norm())
    fail(ErrorKind::UndefinedConformalType, "conformal point: tau is not defined by b_0");
  if (t.b1[0] == 0.0) fail(ErrorKind::UndefinedConformalType, "b1_0 = 0: conformal type undefined");
  // Q_0 tau P_0 / (b1_0 b2_0) with tau = b2_0 / b1_0.
  return v.Q[0] * t.P[0] / (t.b1[0] * t.b1[0]);
}

}  // namespace whitham
