#include "whitham/seeds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "whitham/error.hpp"
#include "whitham/flow.hpp"
#include "whitham/polyring.hpp"

namespace whitham {

const char* to_string(SeedShape s) {
  switch (s) {
    case SeedShape::Generic: return "generic";
    case SeedShape::CircleRoot: return "circle-root";
    case SeedShape::CommonPair: return "common-pair";
    case SeedShape::Conformal: return "conformal";
  }
  return "?";
}

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
// Largest residual handed to the final polish.
constexpr double kFinalAccept = 1e-10;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * ((gen_() >> 11) * 0x1.0p-53); }
  cplx in_disc(double r) {
    for (;;) {
      cplx z(uniform(-r, r), uniform(-r, r));
      if (std::abs(z) < r) return z;
    }
  }

 private:
  std::mt19937_64 gen_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Shape parameters: root pairs a_1..a_{g+1} (a_{g+1} = 0 in the conformal
// shape), then phi for CircleRoot or beta for CommonPair.
struct Model {
  int g = 0;
  SeedShape shape = SeedShape::Generic;

  int pairs() const { return shape == SeedShape::Conformal ? g : g + 1; }
  int extra() const {
    return shape == SeedShape::CircleRoot ? 1 : shape == SeedShape::CommonPair ? 2 : 0;
  }
  int n_params() const { return 2 * pairs() + extra(); }
  // Degree of the free factor c in b = (common root factor) c.
  int c_degree() const {
    return shape == SeedShape::CircleRoot ? g + 2 : shape == SeedShape::CommonPair ? g + 1 : g + 3;
  }
  // Dimension of the residue-free family.
  int dim() const { return c_degree() + 1 - 2; }

  Polynomial P(const Eigen::VectorXd& p) const {
    Polynomial out({1.0}, 0);
    for (int k = 0; k < pairs(); ++k) out = out * real_root_pair({p[2 * k], p[2 * k + 1]});
    if (shape == SeedShape::Conformal) out = out * real_root_pair(0.0);
    return out.with_bound(2 * g + 2);
  }

  Polynomial factor(const Eigen::VectorXd& p) const {
    int o = 2 * pairs();
    if (shape == SeedShape::CircleRoot) return real_unit_root(p[o]);
    if (shape == SeedShape::CommonPair) return real_root_pair({p[o], p[o + 1]});
    return Polynomial({1.0}, 0);
  }

  // Inadmissible parameters (roots too close to the circle, to each other or
  // to zero) are rejected before any curve is built.
  bool admissible(const Eigen::VectorXd& p) const {
    std::vector<cplx> a;
    for (int k = 0; k < pairs(); ++k) a.emplace_back(p[2 * k], p[2 * k + 1]);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a[i]) > 0.92) return false;
      if (shape == SeedShape::Conformal && std::abs(a[i]) < 0.05) return false;
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs(a[i] - a[j]) < 0.03) return false;
    }
    if (shape == SeedShape::CommonPair) {
      double r = std::abs(cplx(p[2 * pairs()], p[2 * pairs() + 1]));
      if (r < 0.03 || r > 0.95) return false;
    }
    return true;
  }
};

// Linear data of the conditions at fixed shape parameters. The family is
// b = factor * c(K_ref y), with c restricted to the residue-free subspace by
// an orthogonal projector, so it varies smoothly with the parameters.
struct Linear {
  Polynomial P;
  CycleBasis basis;
  Eigen::MatrixXd family;  // real coordinates of b (g+4) x dim
  Eigen::MatrixXd re, im;  // Re and Im of periods then closings of Theta^1, (2g+2) x dim
};

Eigen::MatrixXd residue_free_projector(const Model& m, const Polynomial& P, const Polynomial& factor) {
  int n = m.c_degree() + 1;
  Eigen::MatrixXd A(2, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    Polynomial b = (factor * from_real_coordinates(e, m.c_degree())).with_bound(m.g + 3);
    cplx r = residue_condition(P, b);
    A(0, j) = r.real();
    A(1, j) = r.imag();
  }
  Eigen::MatrixXd G = A * A.transpose();
  if (std::abs(G.determinant()) < 1e-24 * std::pow(G.trace(), 2))
    fail(ErrorKind::Degenerate, "residue conditions are dependent on the seed family");
  return Eigen::MatrixXd::Identity(n, n) - A.transpose() * G.inverse() * A;
}

Linear linear_data(const Model& m, const Eigen::VectorXd& p, const Eigen::MatrixXd& k_ref,
                   const CycleBasis* from, int quad_order) {
  Linear out;
  out.P = m.P(p);
  HyperellipticCurve curve = build_curve(out.P);
  out.basis = from ? transport_basis(*from, curve) : homology_basis(curve);
  Polynomial factor = m.factor(p);
  Eigen::MatrixXd C = residue_free_projector(m, out.P, factor) * k_ref;
  int d = m.dim(), rows = 2 * m.g + 2;
  out.family.resize(m.g + 4, d);
  out.re.resize(rows, d);
  out.im.resize(rows, d);
  for (int j = 0; j < d; ++j) {
    std::vector<double> c(C.col(j).data(), C.col(j).data() + C.rows());
    Polynomial b = (factor * from_real_coordinates(c, m.c_degree())).with_bound(m.g + 3);
    out.family.col(j) = to_vector(real_coordinates(b, m.g + 3));
    PsiVector ps = psi(SpectralTriple(m.g, out.P, b, b), out.basis, quad_order);
    for (int k = 0; k < 2 * m.g; ++k) {
      out.re(k, j) = ps.periods[k].real();
      out.im(k, j) = ps.periods[k].imag();
    }
    for (int k = 0; k < 2; ++k) {
      out.re(2 * m.g + k, j) = ps.closings[k].real();
      out.im(2 * m.g + k, j) = ps.closings[k].imag();
    }
  }
  return out;
}

Eigen::MatrixXd initial_k_ref(const Model& m, const Eigen::VectorXd& p) {
  Eigen::MatrixXd Pi = residue_free_projector(m, m.P(p), m.factor(p));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Pi, Eigen::ComputeFullU);
  return svd.matrixU().leftCols(m.dim());
}

// Levenberg-Marquardt on a generic residual f(x); returns the final residual norm.
// on_accept runs after every accepted step.
template <class F, class Ok, class Accept>
double levenberg_marquardt(F&& f, Ok&& ok, Accept&& on_accept, Eigen::VectorXd& x, int max_iter,
                           double tol) {
  double mu = 1e-3;
  Eigen::VectorXd r;
  try {
    r = f(x);
  } catch (const Error&) {
    return INFINITY;
  }
  for (int it = 0; it < max_iter && r.norm() > tol; ++it) {
    Eigen::MatrixXd J(r.size(), x.size());
    try {
      for (int k = 0; k < x.size(); ++k) {
        double h = 1e-7 * std::max(1.0, std::abs(x[k]));
        Eigen::VectorXd xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        J.col(k) = (f(xp) - f(xm)) / (2 * h);
      }
    } catch (const Error&) {
      break;
    }
    Eigen::MatrixXd JtJ = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * r;
    bool accepted = false;
    for (int tries = 0; tries < 24 && !accepted; ++tries) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += mu * (1.0 + JtJ.diagonal().array());
      Eigen::VectorXd x2 = x - A.ldlt().solve(g);
      if (!ok(x2)) {
        mu *= 4;
        continue;
      }
      try {
        Eigen::VectorXd r2 = f(x2);
        if (r2.norm() < r.norm()) {
          x = x2;
          r = r2;
          mu = std::max(mu / 3, 1e-12);
          accepted = true;
          on_accept(x);
        } else {
          mu *= 4;
        }
      } catch (const Error&) {
        mu *= 4;
      }
    }
    if (!accepted) break;
  }
  return r.norm();
}

// Two smallest squared singular values of the Re block on the family,
// relative to the whole block of integrals.
double plane_defect(const Linear& l) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(l.re);
  Eigen::VectorXd s = svd.singularValues();
  int n = static_cast<int>(s.size());
  double total = std::max(1e-300, l.re.squaredNorm() + l.im.squaredNorm());
  if (n < 2) return 0.0;
  return (s[n - 1] * s[n - 1] + s[n - 2] * s[n - 2]) / total;
}

// Moves the shape parameters until the Re block on the family has a
// two-dimensional kernel, parametrised by an orthonormal d x 2 matrix Z.
bool find_locus(const Model& m, Eigen::VectorXd& p, Eigen::MatrixXd& k_ref, int quad_order) {
  int d = m.dim(), np = m.n_params();
  if (d - 2 >= m.g) return true;  // generic kernel already two-dimensional
  Linear l0 = linear_data(m, p, k_ref, nullptr, quad_order);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(l0.re, Eigen::ComputeFullV);
  Eigen::MatrixXd Z0 = svd.matrixV().rightCols(2);
  double scale = std::max(1e-300, l0.re.norm());
  CycleBasis basis = l0.basis;

  Eigen::VectorXd x(np + 2 * d);
  x.head(np) = p;
  x.tail(2 * d) = Eigen::Map<const Eigen::VectorXd>(Z0.data(), 2 * d);
  auto f = [&](const Eigen::VectorXd& v) {
    Linear l = linear_data(m, v.head(np), k_ref, &basis, quad_order);
    Eigen::Map<const Eigen::MatrixXd> Z(v.data() + np, d, 2);
    Eigen::MatrixXd E = l.re * Z / scale;
    Eigen::MatrixXd G = Z.transpose() * Z - Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd out(E.size() + 3);
    out.head(E.size()) = Eigen::Map<const Eigen::VectorXd>(E.data(), E.size());
    out[E.size()] = G(0, 0);
    out[E.size() + 1] = G(1, 1);
    out[E.size() + 2] = G(0, 1);
    return out;
  };
  auto ok = [&](const Eigen::VectorXd& v) { return m.admissible(v.head(np)); };
  auto accept = [&](const Eigen::VectorXd& v) {
    basis = linear_data(m, v.head(np), k_ref, &basis, quad_order).basis;
  };
  double res = levenberg_marquardt(f, ok, accept, x, 200, 1e-13);
  if (!(res < 1e-11)) return false;
  p = x.head(np);
  return true;
}

// Parameter start for the root-sharing shapes: the best of a scan over the
// extra parameters at fixed P.
void scan_extra(const Model& m, Eigen::VectorXd& p, int quad_order) {
  int o = 2 * m.pairs();
  double best = INFINITY;
  Eigen::VectorXd best_p = p;
  std::vector<Eigen::VectorXd> candidates;
  if (m.shape == SeedShape::CircleRoot) {
    for (int i = 0; i < 48; ++i) {
      Eigen::VectorXd q = p;
      q[o] = kTwoPi * (i + 0.5) / 48;
      candidates.push_back(q);
    }
  } else if (m.shape == SeedShape::CommonPair) {
    for (int i = 1; i <= 6; ++i)
      for (int j = 0; j < 16; ++j) {
        Eigen::VectorXd q = p;
        cplx b = std::polar(0.14 * i, kTwoPi * (j + 0.5) / 16);
        q[o] = b.real();
        q[o + 1] = b.imag();
        candidates.push_back(q);
      }
  }
  for (const Eigen::VectorXd& q : candidates) {
    if (!m.admissible(q)) continue;
    try {
      Eigen::MatrixXd k_ref = initial_k_ref(m, q);
      double dfct = plane_defect(linear_data(m, q, k_ref, nullptr, quad_order));
      if (dfct < best) {
        best = dfct;
        best_p = q;
      }
    } catch (const Error&) {
    }
  }
  p = best_p;
}

std::vector<long long> round_targets(const Eigen::VectorXd& v) {
  std::vector<long long> out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = std::llround(v[k] / kTwoPi);
  return out;
}

bool independent(const std::vector<long long>& a, const std::vector<long long>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (a[i] * b[j] - a[j] * b[i] != 0) return true;
  return false;
}

struct Attempt {
  SpectralTriple triple;
  std::vector<long long> lattice;
  double residual = INFINITY;
};

// Joint solve for the shape parameters and the coefficients y^1, y^2 of b^i
// in the family against fixed integers.
std::optional<Attempt> solve_lattice(const Model& m, Eigen::VectorXd p, Eigen::MatrixXd k_ref,
                                     Rng& rng, const SeedOptions& opt) {
  int d = m.dim(), np = m.n_params(), rows = 2 * m.g + 2;
  Linear l0 = linear_data(m, p, k_ref, nullptr, opt.quad_order);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(l0.re, Eigen::ComputeFullV);
  Eigen::MatrixXd Z = svd.matrixV().rightCols(2);

  // Two directions in the kernel, scaled so that the integers are of size lattice_scale.
  double theta = rng.uniform(0.0, kTwoPi);
  Eigen::Matrix2d R;
  R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  Eigen::MatrixXd Y = Z * R;
  std::vector<long long> m1, m2;
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXd v = l0.im * Y.col(i);
    double top = v.cwiseAbs().maxCoeff();
    if (!(top > 1e-8)) return std::nullopt;
    Y.col(i) *= kTwoPi * opt.lattice_scale * rng.uniform(0.8, 1.25) / top;
    (i ? m2 : m1) = round_targets(l0.im * Y.col(i));
  }
  if (!independent(m1, m2)) return std::nullopt;
  Eigen::VectorXd final_target(2 * rows), target(2 * rows);
  for (int k = 0; k < rows; ++k) {
    final_target[k] = kTwoPi * m1[k];
    final_target[rows + k] = kTwoPi * m2[k];
  }
  target << l0.im * Y.col(0), l0.im * Y.col(1);
  const Eigen::VectorXd start_target = target;

  CycleBasis basis = l0.basis;
  auto f = [&](const Eigen::VectorXd& x) {
    Linear l = linear_data(m, x.head(np), k_ref, &basis, opt.quad_order);
    Eigen::VectorXd out(4 * rows);
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd y = x.segment(np + i * d, d);
      out.segment(2 * i * rows, rows) = l.re * y;
      out.segment((2 * i + 1) * rows, rows) = l.im * y - target.segment(i * rows, rows);
    }
    return out;
  };
  Eigen::VectorXd x(np + 2 * d);
  x.head(np) = p;
  x.segment(np, d) = Y.col(0);
  x.segment(np + d, d) = Y.col(1);

  // Gauss-Newton with truncated minimum-norm steps against the current target.
  auto gauss_newton = [&](Eigen::VectorXd& x, double tol) {
    Eigen::VectorXd r = f(x);
    for (int it = 0; it < 40 && r.cwiseAbs().maxCoeff() > tol; ++it) {
      // The conditions are linear in y, so only the shape columns need differences.
      Linear here = linear_data(m, x.head(np), k_ref, &basis, opt.quad_order);
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(r.size(), x.size());
      for (int i = 0; i < 2; ++i) {
        J.block(2 * i * rows, np + i * d, rows, d) = here.re;
        J.block((2 * i + 1) * rows, np + i * d, rows, d) = here.im;
      }
      for (int k = 0; k < np; ++k) {
        double h = 1e-6 * std::max(1.0, std::abs(x[k]));
        Eigen::VectorXd xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        J.col(k) = (f(xp) - f(xm)) / (2 * h);
      }
      Eigen::BDCSVD<Eigen::MatrixXd> s(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
      Eigen::VectorXd sv = s.singularValues();
      Eigen::VectorXd c = s.matrixU().transpose() * r;
      Eigen::VectorXd dx = Eigen::VectorXd::Zero(x.size());
      for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv[k] > 1e-10 * sv[0]) dx -= s.matrixV().col(k) * (c[k] / sv[k]);
      double step = 1.0;
      bool accepted = false;
      for (int halving = 0; halving < 14 && !accepted; ++halving, step *= 0.5) {
        Eigen::VectorXd x2 = x + step * dx;
        if (!m.admissible(x2.head(np))) continue;
        try {
          Eigen::VectorXd r2 = f(x2);
          if (r2.norm() < r.norm()) {
            x = x2;
            r = r2;
            accepted = true;
            basis = linear_data(m, x.head(np), k_ref, &basis, opt.quad_order).basis;
          }
        } catch (const Error&) {
        }
      }
      if (!accepted) break;
    }
    return r.cwiseAbs().maxCoeff();
  };

  // Continuation from the integrals at the start to the rounded integers.
  double tau = 0.0, dtau = 0.25;
  while (tau < 1.0) {
    double next = std::min(1.0, tau + dtau);
    Eigen::VectorXd x_try = x;
    CycleBasis basis_saved = basis;
    target = start_target + next * (final_target - start_target);
    double res = INFINITY;
    try {
      res = gauss_newton(x_try, next < 1.0 ? 1e-9 : opt.tol);
    } catch (const Error&) {
    }
    if (res <= (next < 1.0 ? 1e-9 : kFinalAccept)) {
      x = x_try;
      tau = next;
      dtau = std::min(0.5, 2 * dtau);
    } else {
      basis = basis_saved;
      dtau *= 0.5;
      if (dtau < 1.0 / 256) return std::nullopt;
    }
  }

  Linear l = linear_data(m, x.head(np), k_ref, &basis, opt.quad_order);
  auto poly = [&](int i) {
    Eigen::VectorXd c = l.family * x.segment(np + i * d, d);
    return from_real_coordinates(std::vector<double>(c.data(), c.data() + c.size()), m.g + 3);
  };
  Attempt out;
  out.triple = SpectralTriple(m.g, l.P, poly(0), poly(1));
  PsiVector ps = psi(out.triple, l.basis, opt.quad_order);
  out.lattice = ps.lattice();
  out.residual = ps.max_residual(&out.lattice);
  return out;
}

bool expected_case(SeedShape shape, const CaseLabel& c) {
  switch (shape) {
    case SeedShape::Generic: return c.label == Case::A;
    case SeedShape::CircleRoot: return c.label == Case::B && c.evidence.d_G == 1;
    case SeedShape::CommonPair: return c.label == Case::B && c.evidence.d_G == 2;
    case SeedShape::Conformal: return c.label == Case::E;
  }
  return false;
}

}  // namespace

SeedResult lattice_seed(const SeedOptions& opt) {
  if (opt.genus < 0) fail(ErrorKind::Precondition, "genus must be nonnegative");
  Model m{opt.genus, opt.shape};
  if (m.dim() < 2)
    fail(ErrorKind::Precondition, std::string("shape ") + to_string(opt.shape) +
                                      " needs a larger genus (family dimension " +
                                      std::to_string(m.dim()) + ")");
  Rng rng(opt.seed);
  for (int attempt = 1; attempt <= opt.max_attempts; ++attempt) {
    Eigen::VectorXd p(m.n_params());
    do {
      for (int k = 0; k < m.pairs(); ++k) {
        cplx a = rng.in_disc(0.6);
        p[2 * k] = a.real();
        p[2 * k + 1] = a.imag();
      }
      for (int k = 2 * m.pairs(); k < p.size(); ++k) p[k] = 0.0;
    } while (!m.admissible(p) && m.extra() == 0);
    try {
      scan_extra(m, p, opt.quad_order);
      if (!m.admissible(p)) continue;
      Eigen::MatrixXd k_ref = initial_k_ref(m, p);
      if (!find_locus(m, p, k_ref, opt.quad_order)) continue;
      std::optional<Attempt> a = solve_lattice(m, p, k_ref, rng, opt);
      if (!a) continue;
      ProjectionOptions po;
      po.quad_order = opt.quad_order;
      po.tol = std::max(opt.tol, 1e-12);
      SpectralTriple t = a->triple;
      if (a->residual > po.tol) t = project_to_Mg(t, a->lattice, po).triple;
      ToleranceProfile tol;
      tol.quad_order = opt.quad_order;
      if (!validate(t, tol).pass) continue;
      CaseLabel label = classify(t);
      if (!expected_case(opt.shape, label) || label.borderline) continue;
      SeedResult out;
      out.triple = t;
      PsiVector ps = psi(t, opt.quad_order);
      out.lattice = ps.lattice();
      out.residual = ps.max_residual(&out.lattice);
      out.label = label;
      out.attempts = attempt;
      return out;
    } catch (const Error&) {
      continue;
    }
  }
  fail(ErrorKind::NoSolution, std::string("no ") + to_string(opt.shape) + " point found at genus " +
                                  std::to_string(opt.genus) + " within " +
                                  std::to_string(opt.max_attempts) + " attempts");
}

}  // namespace whitham
