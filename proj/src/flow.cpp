#include "whitham/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "whitham/error.hpp"
#include "parallel.hpp"

namespace whitham {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

Polynomial pair_polynomial(cplx alpha) {
  // (zeta - alpha)(1 - conj(alpha) zeta)
  return Polynomial({-alpha, 1.0 + std::norm(alpha), -std::conj(alpha)}, 2);
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Gauss-Newton driver shared by projection and the flow corrector. residual
// evaluates at a triple with a basis already transported to it.
struct NewtonProblem {
  std::function<Eigen::VectorXd(const SpectralTriple&, const CycleBasis&)> residual;
  double tol = 1e-11;
  int max_iter = 40;
  double fd_step = 1e-6;
  double rank_tol = 1e-10;
  std::optional<double> capture_radius;
  // Number of singular directions used; the solution set of the Psi rows
  // alone is two-dimensional, so this is n - 2 plus the extra equations.
  std::optional<int> rank;
};

struct Evaluated {
  SpectralTriple t;
  CycleBasis basis;
  Eigen::VectorXd r;
};

Evaluated evaluate(const NewtonProblem& pb, const SpectralTriple& t, const CycleBasis& from) {
  HyperellipticCurve curve = build_curve(t.P);
  if (curve.genus != t.g) fail(ErrorKind::Geometry, "curve genus changed");
  CycleBasis b = transport_basis(from, curve);
  Eigen::VectorXd r = pb.residual(t, b);
  return {t, std::move(b), std::move(r)};
}

Eigen::MatrixXd fd_jacobian(const NewtonProblem& pb, const Evaluated& at) {
  Eigen::VectorXd x = coordinates(at.t);
  int n = static_cast<int>(x.size());
  Eigen::MatrixXd J(at.r.size(), n);
  parallel_for(n, [&](int k) {
    double h = pb.fd_step * std::max(1.0, std::abs(x[k]));
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    Eigen::VectorXd rp = evaluate(pb, from_coordinates(at.t.g, xp), at.basis).r;
    Eigen::VectorXd rm = evaluate(pb, from_coordinates(at.t.g, xm), at.basis).r;
    J.col(k) = (rp - rm) / (2 * h);
  });
  return J;
}

// Minimum-norm solution of J dx = -r over the leading singular directions:
// at most pb.rank of them, and none below rank_tol relative to the largest.
Eigen::VectorXd truncated_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& r, const NewtonProblem& pb) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  int k = static_cast<int>(sv.size());
  if (pb.rank) k = std::min(k, *pb.rank);
  while (k > 0 && !(sv[k - 1] > pb.rank_tol * sv[0])) --k;
  Eigen::VectorXd coef = svd.matrixU().leftCols(k).transpose() * r;
  coef.array() /= sv.head(k).array();
  return -(svd.matrixV().leftCols(k) * coef);
}

ProjectionResult newton(const NewtonProblem& pb, const SpectralTriple& guess, const CycleBasis& basis) {
  Evaluated cur;
  try {
    cur = evaluate(pb, guess, basis);
  } catch (const Error& e) {
    fail(ErrorKind::ProjectionFailure, std::string("initial guess is not admissible: ") + e.what());
  }
  ProjectionResult out;
  double res = max_abs(cur.r);
  out.history.push_back(res);
  if (pb.capture_radius && !(res <= *pb.capture_radius))
    fail(ErrorKind::ProjectionFailure,
         "initial residual " + std::to_string(res) + " exceeds the capture radius");
  int it = 0;
  while (!(res <= pb.tol)) {
    if (it >= pb.max_iter)
      fail(ErrorKind::ProjectionFailure,
           "no convergence after " + std::to_string(it) + " iterations, residual " + std::to_string(res));
    ++it;
    Eigen::MatrixXd J;
    try {
      J = fd_jacobian(pb, cur);
    } catch (const Error& e) {
      fail(ErrorKind::ProjectionFailure, std::string("Jacobian left the admissible set: ") + e.what());
    }
    Eigen::VectorXd dx = truncated_step(J, cur.r, pb);
    Eigen::VectorXd x = coordinates(cur.t);
    double step = 1.0;
    bool accepted = false;
    double norm0 = cur.r.norm();
    for (int ls = 0; ls < 12 && !accepted; ++ls, step *= 0.5) {
      try {
        Evaluated trial = evaluate(pb, from_coordinates(cur.t.g, x + step * dx), cur.basis);
        if (trial.r.norm() < norm0 || max_abs(trial.r) <= pb.tol) {
          cur = std::move(trial);
          accepted = true;
        }
      } catch (const Error&) {
      }
    }
    if (!accepted) {
      fail(ErrorKind::ProjectionFailure, "line search failed at residual " + std::to_string(res));
    }
    res = max_abs(cur.r);
    out.history.push_back(res);
  }
  out.triple = cur.t;
  out.basis = cur.basis;
  out.iterations = it;
  out.residual = res;
  return out;
}

Eigen::VectorXd stack(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd r(a.size() + b.size());
  r << a, b;
  return r;
}

Eigen::MatrixXd tangent_matrix(const TangentBasis& tb, int g) {
  Eigen::MatrixXd V(coordinate_count(g), 2);
  for (int j = 0; j < 2; ++j) V.col(j) = coordinates(tb.vectors[j].as_triple(g));
  return V;
}

DeformationParams combine(const std::array<DeformationParams, 2>& pb, double a0, double a1) {
  DeformationParams p;
  p.Qt = pb[0].Qt * a0 + pb[1].Qt * a1;
  p.r = pb[0].r * a0 + pb[1].r * a1;
  return p;
}

}  // namespace

// ---- seeds --------------------------------------------------------------------

std::array<Polynomial, 2> genus0_differentials(cplx alpha) {
  if (std::abs(alpha) >= 1.0) fail(ErrorKind::Precondition, "alpha must lie inside the unit disc");
  std::array<Polynomial, 2> out;
  if (alpha == cplx(0.0)) {
    out[0] = Polynomial({0.0, 1.0, 1.0, 0.0}, 3);
    out[1] = Polynomial({0.0, cplx(0, 1), cplx(0, -1), 0.0}, 3);
    return out;
  }
  cplx x = -(1.0 + std::norm(alpha)) / (2.0 * alpha);
  for (int j = 0; j < 2; ++j) {
    cplx y = j == 0 ? cplx(1.0) : cplx(0.0, 1.0);
    out[j] = Polynomial({y, x * y, std::conj(x * y), std::conj(y)}, 3);
  }
  return out;
}

SpectralTriple genus0_seed(cplx alpha, std::array<long long, 2> m1, std::array<long long, 2> m2,
                           int quad_order) {
  Polynomial P = pair_polynomial(alpha);
  if (alpha == cplx(0.0)) P = Polynomial({0.0, 1.0, 0.0}, 2);
  auto e = genus0_differentials(alpha);
  HyperellipticCurve curve = build_curve(P);
  CycleBasis basis = homology_basis(curve);
  // Closing integrals of e0, e1 over gamma+ and gamma-.
  Eigen::Matrix2d M;
  double scale = 0.0;
  for (int row = 0; row < 2; ++row) {
    const PathOnCurve& path = row == 0 ? basis.gamma_plus : basis.gamma_minus;
    for (int j = 0; j < 2; ++j) {
      cplx v = integrate(Differential{curve, e[j]}, path, quad_order).value;
      M(row, j) = v.imag();
      scale = std::max(scale, std::abs(v));
    }
  }
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(1e-10);
  std::array<Polynomial, 2> b;
  for (int i = 0; i < 2; ++i) {
    const auto& m = i == 0 ? m1 : m2;
    Eigen::Vector2d rhs(kTwoPi * m[0], kTwoPi * m[1]);
    Eigen::Vector2d y = svd.solve(rhs);
    if ((M * y - rhs).norm() > 1e-9 * std::max(1.0, rhs.norm()))
      fail(ErrorKind::NoSolution, "closing targets are not reachable at this alpha");
    b[i] = e[0] * y[0] + e[1] * y[1];
  }
  return SpectralTriple(0, P, b[0], b[1]);
}

// ---- projection ---------------------------------------------------------------

Eigen::VectorXd projection_residual(const SpectralTriple& t, const std::vector<long long>& lattice,
                                    const CycleBasis& basis, const ProjectionOptions& opt) {
  Eigen::VectorXd r = psi(t, basis, opt.quad_order).residual(&lattice);
  if (opt.target_shift) {
    if (opt.target_shift->size() != r.size()) fail(ErrorKind::Shape, "target shift has the wrong length");
    r -= *opt.target_shift;
  }
  if (opt.extra) r = stack(r, opt.extra(t));
  return r;
}

ProjectionResult project_to_Mg(const SpectralTriple& guess, const std::vector<long long>& lattice,
                               const CycleBasis& basis, const ProjectionOptions& opt) {
  if (static_cast<int>(lattice.size()) != 4 * guess.g + 4)
    fail(ErrorKind::Shape, "lattice needs 4g + 4 integers");
  NewtonProblem pb;
  pb.residual = [&](const SpectralTriple& t, const CycleBasis& b) {
    return projection_residual(t, lattice, b, opt);
  };
  pb.tol = opt.tol;
  pb.max_iter = opt.max_iter;
  pb.fd_step = opt.fd_step;
  pb.rank_tol = opt.rank_tol;
  pb.capture_radius = opt.capture_radius;
  int n = coordinate_count(guess.g);
  int extras = opt.extra ? static_cast<int>(opt.extra(guess).size()) : 0;
  pb.rank = std::min(n, n - 2 + extras);
  return newton(pb, guess, basis);
}

ProjectionResult project_to_Mg(const SpectralTriple& guess, const std::vector<long long>& lattice,
                               const ProjectionOptions& opt) {
  HyperellipticCurve curve;
  try {
    curve = build_curve(guess.P);
  } catch (const Error& e) {
    fail(ErrorKind::ProjectionFailure, std::string("initial guess is not admissible: ") + e.what());
  }
  return project_to_Mg(guess, lattice, homology_basis(curve), opt);
}

// ---- flow ---------------------------------------------------------------------

FlowChart make_chart(const SpectralTriple& t, std::array<double, 2> params, const CycleBasis& basis,
                     int quad_order) {
  double pn = std::hypot(params[0], params[1]);
  if (!(pn > 0)) fail(ErrorKind::Precondition, "flow parameters must be nonzero");
  FlowChart c;
  c.g = t.g;
  c.label = classify(t);
  if (!c.label.deformable())
    fail(ErrorKind::NotDeformable, std::string("case (") + to_string(c.label.label) + ") has no tangent construction");
  TangentBasis tb = tangent_basis(t);
  Eigen::MatrixXd V = tangent_matrix(tb, t.g);
  c.x0 = coordinates(t);
  Eigen::VectorXd u = V * Eigen::Vector2d(params[0], params[1]);
  Eigen::VectorXd w = V * Eigen::Vector2d(-params[1], params[0]);
  c.u = u.normalized();
  w -= c.u.dot(w) * c.u;
  if (w.norm() < 1e-12 * u.norm()) fail(ErrorKind::Degenerate, "tangent plane is degenerate");
  c.w = w.normalized();
  c.lattice = psi(t, transport_basis(basis, build_curve(t.P)), quad_order).lattice();
  return c;
}

ChartTangent chart_tangent(const SpectralTriple& t, const FlowChart& chart) {
  TangentBasis tb = tangent_basis(t);
  if (tb.label.label != chart.label.label)
    fail(ErrorKind::Degenerate, std::string("boundary event: case changed from (") +
                                    to_string(chart.label.label) + ") to (" + to_string(tb.label.label) +
                                    "), d_F = " + std::to_string(tb.label.evidence.d_F) +
                                    ", d_G = " + std::to_string(tb.label.evidence.d_G));
  Eigen::MatrixXd V = tangent_matrix(tb, t.g);
  Eigen::Matrix2d A;
  A.row(0) = chart.u.transpose() * V;
  A.row(1) = chart.w.transpose() * V;
  Eigen::FullPivLU<Eigen::Matrix2d> lu(A);
  if (!lu.isInvertible() || std::abs(A.determinant()) < 1e-12 * A.squaredNorm())
    fail(ErrorKind::Degenerate, "chart is transverse to the tangent plane");
  Eigen::Vector2d a = lu.solve(Eigen::Vector2d(1.0, 0.0));
  auto pb = parameter_basis(t, tb.label);
  ChartTangent out;
  out.vector = tangent(t, tb.label, combine(pb, a[0], a[1]));
  out.direction = out.vector.as_triple(t.g);
  return out;
}

PathSample make_sample(const SpectralTriple& t, double s, const CycleBasis& basis,
                       const std::vector<long long>& lattice, int quad_order) {
  PathSample out;
  out.s = s;
  out.triple = t;
  out.lattice = lattice;
  out.psi_residual = psi(t, basis, quad_order).max_residual(&lattice);
  out.label = classify(t);
  if (!out.label.conformal && t.b1[0] != cplx(0.0)) out.tau = conformal_type(t);
  return out;
}

PathSample flow_step(const SpectralTriple& t, double s, double h, const FlowChart& chart,
                     CycleBasis& basis, const FlowConfig& cfg) {
  if (h == 0.0) {
    CycleBasis b = transport_basis(basis, build_curve(t.P));
    PathSample out = make_sample(t, s, b, chart.lattice, cfg.quad_order);
    basis = b;
    return out;
  }
  ChartTangent tan = chart_tangent(t, chart);
  SpectralTriple predictor = axpy(t, h, tan.direction);
  double target = s + h;
  NewtonProblem pb;
  pb.residual = [&](const SpectralTriple& x, const CycleBasis& b) {
    Eigen::VectorXd r = psi(x, b, cfg.quad_order).residual(&chart.lattice);
    Eigen::VectorXd d = coordinates(x) - chart.x0;
    Eigen::VectorXd extra(2);
    extra << chart.u.dot(d) - target, chart.w.dot(d);
    return stack(r, extra);
  };
  pb.tol = cfg.projection_tol;
  pb.max_iter = cfg.max_newton;
  ProjectionResult pr = newton(pb, predictor, basis);
  PathSample out = make_sample(pr.triple, target, pr.basis, chart.lattice, cfg.quad_order);
  out.newton_iterations = pr.iterations;
  if (cfg.stop_on_case_change && out.label.label != chart.label.label)
    fail(ErrorKind::Degenerate, std::string("boundary event: case changed from (") +
                                    to_string(chart.label.label) + ") to (" + to_string(out.label.label) +
                                    "), d_F = " + std::to_string(out.label.evidence.d_F) +
                                    ", d_G = " + std::to_string(out.label.evidence.d_G));
  if (out.lattice != psi(pr.triple, pr.basis, cfg.quad_order).lattice())
    fail(ErrorKind::ProjectionFailure, "lattice integers changed during the step");
  basis = pr.basis;
  return out;
}

std::vector<PathSample> trace(const SpectralTriple& t, const FlowConfig& cfg, const FlowChart* chart,
                              double s0, const CycleBasis* basis) {
  if (cfg.steps < 0) fail(ErrorKind::Precondition, "step count must be nonnegative");
  if (!(cfg.projection_tol > 0)) fail(ErrorKind::Precondition, "projection tolerance must be positive");
  HyperellipticCurve curve = build_curve(t.P);
  CycleBasis B = basis ? transport_basis(*basis, curve) : homology_basis(curve);
  FlowChart own;
  if (!chart && cfg.steps > 0) {
    own = make_chart(t, cfg.params, B, cfg.quad_order);
    chart = &own;
  }
  std::vector<long long> lattice =
      chart ? chart->lattice : psi(t, B, cfg.quad_order).lattice();
  std::vector<PathSample> out;
  out.push_back(make_sample(t, s0, B, lattice, cfg.quad_order));
  SpectralTriple cur = t;
  double s = s0;
  for (int k = 0; k < cfg.steps; ++k) {
    double goal = s + cfg.h;
    double h = cfg.h;
    PathSample last;
    while (s != goal) {
      double step = std::abs(goal - s) < std::abs(h) ? goal - s : h;
      CycleBasis trial = B;
      try {
        last = flow_step(cur, s, step, *chart, trial, cfg);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Degenerate || e.kind() == ErrorKind::NotDeformable) throw;
        h *= 0.5;
        if (std::abs(h) < cfg.h_min)
          fail(ErrorKind::StepSize, std::string("step size fell below the floor: ") + e.what());
        continue;
      }
      B = trial;
      cur = last.triple;
      s = std::abs(goal - last.s) <= 1e-15 * std::max(1.0, std::abs(goal)) ? goal : last.s;
    }
    last.s = goal;
    out.push_back(last);
  }
  return out;
}

}  // namespace whitham
