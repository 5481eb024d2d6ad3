#include "whitham/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "whitham/bezout.hpp"
#include "whitham/curve.hpp"
#include "whitham/deformation.hpp"
#include "whitham/error.hpp"
#include "whitham/polyring.hpp"

namespace whitham {

namespace {

// Portable draws: the standard distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo = -1.0, double hi = 1.0) {
    return lo + (hi - lo) * ((gen_() >> 11) * 0x1.0p-53);
  }
  int integer(int lo, int hi) { return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  cplx complex() { return {uniform(), uniform()}; }
  cplx annulus(double rmin, double rmax) {
    return std::polar(uniform(rmin, rmax), uniform(-std::numbers::pi, std::numbers::pi));
  }
  Polynomial poly(int deg) {
    std::vector<cplx> c(deg + 1);
    for (auto& z : c) z = complex();
    if (std::abs(c.back()) < 0.3) c.back() += 1.0;
    return Polynomial(c);
  }
  Polynomial poly_from_roots(int deg, double rmin, double rmax) {
    std::vector<cplx> r(deg);
    for (auto& z : r) z = annulus(rmin, rmax);
    return Polynomial::from_roots(r, complex() + 1.5);
  }
  Polynomial real_section(int k) {
    std::vector<double> x(k + 1);
    for (auto& v : x) v = uniform();
    return from_real_coordinates(x, k);
  }
  // Roots in pairs a, 1/conj(a) with |a| in [rmin, rmax], one on the circle for odd k.
  Polynomial real_section_paired(int k, double rmin = 0.2, double rmax = 0.8) {
    Polynomial p = Polynomial::constant(uniform(0.5, 2.0));
    for (int i = 0; i + 1 < k; i += 2) p = p * real_root_pair(annulus(rmin, rmax));
    if (k % 2 == 1) p = p * real_unit_root(uniform(-3.0, 3.0));
    return p.with_bound(k);
  }

 private:
  std::mt19937_64 gen_;
};

void record(SuiteResult& r, double err, const std::string& what) {
  ++r.instances;
  if (std::isnan(err)) err = INFINITY;
  r.worst = std::max(r.worst, err);
  if (!(err <= r.tolerance)) {
    if (r.failures == 0) r.detail = what;
    ++r.failures;
  }
}

std::string describe(int i, const std::string& s) {
  std::ostringstream o;
  o << "instance " << i << ": " << s;
  return o.str();
}

// Roots by companion-matrix eigenvalues, independent of the root finder.
std::vector<cplx> companion_roots(const Polynomial& p) {
  int n = p.degree();
  std::vector<cplx> out;
  if (n < 1) return out;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -p[i] / p.leading();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C);
  for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// Orthogonal projection of b in P^k_R onto the sections satisfying the
// residue condition for P.
Polynomial residue_free(const Polynomial& P, const Polynomial& b, int k) {
  int n = k + 1;
  Eigen::MatrixXd A(2, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    cplx r = residue_condition(P, from_real_coordinates(e, k));
    A(0, j) = r.real();
    A(1, j) = r.imag();
  }
  std::vector<double> x = real_coordinates(b, k);
  Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(x.data(), n);
  v -= A.transpose() * (A * A.transpose()).ldlt().solve(A * v);
  return from_real_coordinates(std::vector<double>(v.data(), v.data() + n), k);
}

}  // namespace

std::pair<Polynomial, Polynomial> stacked_bezout(const Polynomial& A, const Polynomial& B,
                                                 const Polynomial& C, int xdeg, int ydeg) {
  int nx = std::max(xdeg + 1, 0), ny = std::max(ydeg + 1, 0);
  int rows = std::max({A.degree() + nx, B.degree() + ny, C.degree() + 1, 1});
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(rows, nx + ny);
  Eigen::VectorXcd r = Eigen::VectorXcd::Zero(rows);
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i <= A.degree(); ++i) M(i + j, j) += A[i];
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= B.degree(); ++i) M(i + j, nx + j) -= B[i];
  for (int i = 0; i <= C.degree(); ++i) r(i) = C[i];
  Eigen::VectorXcd s = M.completeOrthogonalDecomposition().solve(r);
  std::vector<cplx> x(s.data(), s.data() + nx), y(s.data() + nx, s.data() + nx + ny);
  return {Polynomial(x), Polynomial(y)};
}

SuiteResult bezout_oracle_suite(std::uint64_t seed, int instances) {
  SuiteResult out;
  out.name = "bezout-oracle";
  out.seed = seed;
  out.tolerance = 1e-8;
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    int d = rng.integer(0, 2);
    Polynomial D = rng.poly_from_roots(d, 0.3, 2.0);
    Polynomial A = D * rng.poly_from_roots(rng.integer(0, 8 - d), 0.3, 2.5);
    Polynomial B = D * rng.poly_from_roots(rng.integer(1, 8 - d), 0.3, 2.5);
    Polynomial C = D * rng.poly(rng.integer(0, 8 - d));
    double err = INFINITY;
    try {
      BezoutSolution s = minimal_solution(A, B, C);
      int a = A.degree(), b = B.degree();
      auto ref = stacked_bezout(A, B, C, b - d - 1, std::max(a - d - 1, C.degree() - b));
      double scale = ref.first.norm() + ref.second.norm();
      err = ((s.X - ref.first).norm() + (s.Y - ref.second).norm()) / std::max(scale, 1e-300);
      if (s.X.degree() > b - d - 1) err = INFINITY;
    } catch (const Error& e) {
      record(out, INFINITY, describe(i, e.what()));
      continue;
    }
    record(out, err, describe(i, "mismatch against stacked solve"));
  }
  return out;
}

SuiteResult reality_suite(std::uint64_t seed, int instances) {
  SuiteResult out;
  out.name = "bezout-reality";
  out.seed = seed;
  out.tolerance = 1e-9;
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    int d = rng.integer(0, 2);
    Polynomial D = d == 0 ? Polynomial::constant(1.0)
                   : d == 1 ? real_unit_root(rng.uniform(-3.0, 3.0))
                            : real_root_pair(rng.annulus(0.2, 0.8));
    int a = d + rng.integer(1, 4), b = d + rng.integer(1, 4);
    int c = rng.integer(std::max(a, b), a + b - d - 1);
    Polynomial A = (D * rng.real_section_paired(a - d)).with_bound(a);
    Polynomial B = (D * rng.real_section_paired(b - d)).with_bound(b);
    Polynomial C = (A * rng.real_section(c - a) - B * rng.real_section(c - b)).with_bound(c);
    try {
      BezoutSolution s = minimal_solution(A, B, C);
      double dx = is_real_section(s.X, c - a, 0.0).witness.max_defect / std::max(1.0, s.X.norm());
      double dy = is_real_section(s.Y, c - b, 0.0).witness.max_defect / std::max(1.0, s.Y.norm());
      record(out, std::max(dx, dy), describe(i, "minimal solution is not a real section"));
    } catch (const Error& e) {
      record(out, INFINITY, describe(i, e.what()));
    }
  }
  return out;
}

SuiteResult membership_suite(std::uint64_t seed, int instances, int samples) {
  SuiteResult out;
  out.name = "bezout-membership";
  out.seed = seed;
  out.tolerance = 1e-9;
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    int d = rng.integer(0, 2);
    Polynomial D = d == 0 ? Polynomial::constant(1.0)
                   : d == 1 ? real_unit_root(rng.uniform(-3.0, 3.0))
                            : real_root_pair(rng.annulus(0.2, 0.8));
    int a = d + rng.integer(0, 3), b = d + rng.integer(1, 3);
    int c = a + b - d + rng.integer(0, 2);
    Polynomial A = (D * rng.real_section_paired(a - d)).with_bound(a);
    Polynomial B = (D * rng.real_section_paired(b - d)).with_bound(b);
    Polynomial C = (A * rng.real_section(c - a) - B * rng.real_section(c - b)).with_bound(c);
    try {
      SolutionSpace sp = solution_space(A, B, C, a, b, c, d);
      double worst = 0.0;
      for (int k = 0; k < samples; ++k) {
        auto [Xs, Ys] = sp.member(rng.real_section(sp.param_degree));
        worst = std::max(worst, bezout_residual(A, B, C, Xs, Ys));
      }
      record(out, worst, describe(i, "member does not solve the equation"));
    } catch (const Error& e) {
      record(out, INFINITY, describe(i, e.what()));
    }
  }
  return out;
}

namespace {

// conj R against (-1)^(n+1) (prod beta) R, relative to |R|.
double reality_defect(const Polynomial& B, cplx R) {
  cplx prod = 1.0;
  for (cplx z : companion_roots(B)) prod *= z;
  double sign = (B.degree() + 1) % 2 == 0 ? 1.0 : -1.0;
  return std::abs(std::conj(R) - sign * prod * R) / std::max(std::abs(R), 1e-300);
}

// Case-(a) shaped data whose b~2 has roots beta, beta + eps and their reflections.
struct ConfluentInstance {
  Polynomial P, b1, Q, rest;
  cplx beta;
  int g = 1;
  Polynomial b2(double eps) const {
    return (real_root_pair(beta) * real_root_pair(beta + eps) * rest).with_bound(g + 3);
  }
};

ConfluentInstance confluent_instance(Rng& rng) {
  ConfluentInstance c;
  c.g = rng.integer(1, 3);
  c.P = rng.real_section_paired(2 * c.g + 2);
  c.b1 = rng.real_section(c.g + 3);
  c.Q = rng.real_section(2);
  c.beta = rng.annulus(0.3, 0.7);
  c.rest = rng.real_section_paired(c.g - 1);
  return c;
}

}  // namespace

SuiteResult r_reality_suite(std::uint64_t seed, int instances, int confluent) {
  SuiteResult out;
  out.name = "r-reality";
  out.seed = seed;
  out.tolerance = 1e-8;
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    try {
      if (i < instances - confluent) {
        int g = rng.integer(0, 3);
        SpectralTriple t(g, rng.real_section_paired(2 * g + 2), rng.real_section(g + 3),
                         rng.real_section(g + 3));
        Polynomial Q = rng.real_section(2);
        CaseLabel label = classify(t);
        if (label.label != Case::A) {
          record(out, INFINITY, describe(i, "random instance not in case (a)"));
          continue;
        }
        record(out, reality_defect(label.evidence.b2_tilde, r_value(label, Q)),
               describe(i, "reality relation fails"));
      } else {
        ConfluentInstance c = confluent_instance(rng);
        double worst = 0.0;
        for (double eps : {1e-3, 1e-4, 1e-5}) {
          Polynomial B = c.b2(eps);
          worst = std::max(worst, reality_defect(B, interpolant_leading(c.b1, B, c.Q * c.P)));
        }
        record(out, worst, describe(i, "reality relation fails near a double root"));
      }
    } catch (const Error& e) {
      record(out, INFINITY, describe(i, e.what()));
    }
  }
  return out;
}

SuiteResult r_confluent_suite(std::uint64_t seed, int instances) {
  SuiteResult out;
  out.name = "r-confluent";
  out.seed = seed;
  out.tolerance = 1e-6;
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    ConfluentInstance c = confluent_instance(rng);
    try {
      Polynomial C = c.Q * c.P;
      cplx R0 = interpolant_leading(c.b1, c.b2(0.0), C);
      // Polynomial extrapolation to eps = 0 through the three samples.
      const double eps[3] = {1e-3, 1e-4, 1e-5};
      cplx extrapolated = 0.0;
      for (int k = 0; k < 3; ++k) {
        double w = 1.0;
        for (int j = 0; j < 3; ++j)
          if (j != k) w *= -eps[j] / (eps[k] - eps[j]);
        extrapolated += w * interpolant_leading(c.b1, c.b2(eps[k]), C);
      }
      double err = std::abs(extrapolated - R0) / std::max(std::abs(R0), 1e-300);
      record(out, err, describe(i, "R is discontinuous at the double root"));
    } catch (const Error& e) {
      record(out, INFINITY, describe(i, e.what()));
    }
  }
  return out;
}

SuiteResult kernel_suite(std::uint64_t seed, int instances) {
  SuiteResult out;
  out.name = "empdi-kernel";
  out.seed = seed;
  out.tolerance = 1e-8;
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    int g = rng.integer(0, 5);
    Polynomial P = rng.real_section_paired(2 * g + 2);
    try {
      double smin = homogeneous_min_singular(P, g);
      if (!(smin > 1e-10)) {
        record(out, INFINITY, describe(i, "homogeneous operator is singular"));
        continue;
      }
      // The tangent construction needs the residue conditions; periods play no role.
      SpectralTriple t(g, P, residue_free(P, rng.real_section(g + 3), g + 3),
                       residue_free(P, rng.real_section(g + 3), g + 3));
      CaseLabel label = classify(t);
      RKernel k = r_kernel(t);
      double u = rng.uniform(), w = rng.uniform();
      DeformationParams params{(k.basis[0] * u + k.basis[1] * w).with_bound(2), 0.0};
      TangentVector v = tangent(t, label, params);
      auto chat = recover_chat(t, v);
      Polynomial z2m1({-1.0, 0.0, 1.0});
      double err = 0.0;
      for (int j = 0; j < 2; ++j) {
        Polynomial expect = z2m1 * (j == 0 ? v.c1 : v.c2);
        err = std::max(err, (chat[j] - expect).norm() / std::max(expect.norm(), 1e-300));
      }
      record(out, err, describe(i, "recover_chat does not invert solve_empdi"));
    } catch (const Error& e) {
      record(out, INFINITY, describe(i, e.what()));
    }
  }
  return out;
}

std::vector<SuiteResult> run_oracle_suites(std::uint64_t seed) {
  return {bezout_oracle_suite(seed), reality_suite(seed + 1), membership_suite(seed + 2),
          r_reality_suite(seed + 3), r_confluent_suite(seed + 4), kernel_suite(seed + 5)};
}

}  // namespace whitham
