#include "whitham/bezout.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "whitham/error.hpp"

namespace whitham {

namespace {

using lcplx = std::complex<long double>;

lcplx widen(cplx z) { return {z.real(), z.imag()}; }

// First r Taylor coefficients of p at x, in extended precision.
std::vector<lcplx> taylor(const Polynomial& p, cplx at, int r) {
  std::vector<lcplx> c;
  for (cplx z : p.coeffs()) c.push_back(widen(z));
  lcplx x = widen(at);
  std::vector<lcplx> out(r, 0.0L);
  for (int k = 0; k < r && !c.empty(); ++k) {
    // Synthetic division by (zeta - x): c = q*(zeta - x) + rem.
    int n = static_cast<int>(c.size()) - 1;
    std::vector<lcplx> q(std::max(n, 0), 0.0L);
    lcplx acc = 0.0L;
    for (int i = n; i >= 0; --i) {
      acc = acc * x + c[i];
      if (i > 0) q[i - 1] = acc;
    }
    out[k] = acc;
    c = std::move(q);
  }
  return out;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

Eigen::MatrixXcd confluent_vandermonde(const std::vector<Root>& nodes, int n) {
  int rows = 0;
  for (const Root& r : nodes) rows += r.multiplicity;
  if (rows != n + 1)
    fail(ErrorKind::Shape, "confluent Vandermonde: total multiplicity " + std::to_string(rows) +
                               " != n + 1 = " + std::to_string(n + 1));
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(rows, n + 1);
  int row = 0;
  for (const Root& r : nodes) {
    for (int m = 0; m < r.multiplicity; ++m, ++row) {
      double fact = 1.0;
      for (int i = 2; i <= m; ++i) fact *= i;
      for (int j = m; j <= n; ++j) V(row, j) = fact * binom(j, m) * std::pow(r.value, j - m);
    }
  }
  return V;
}

std::vector<Root> leja_order(std::vector<Root> r) {
  if (r.size() < 2) return r;
  std::vector<Root> out;
  auto first = std::max_element(r.begin(), r.end(), [](const Root& a, const Root& b) {
    return std::abs(a.value) < std::abs(b.value);
  });
  out.push_back(*first);
  r.erase(first);
  while (!r.empty()) {
    std::size_t best = 0;
    double bv = -1.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      double lp = 0.0;
      for (const Root& s : out) lp += std::log(std::abs(r[i].value - s.value) + 1e-300);
      if (lp > bv) {
        bv = lp;
        best = i;
      }
    }
    out.push_back(r[best]);
    r.erase(r.begin() + best);
  }
  return out;
}

double bezout_residual(const Polynomial& A, const Polynomial& B, const Polynomial& C,
                       const Polynomial& X, const Polynomial& Y) {
  double scale = A.norm() * X.norm() + B.norm() * Y.norm() + C.norm();
  if (scale == 0.0) return 0.0;
  return (A * X - B * Y - C).norm() / scale;
}

BezoutSolution minimal_solution(const Polynomial& A, const Polynomial& B, const Polynomial& C,
                                const BezoutOptions& opt) {
  if (B.is_zero()) fail(ErrorKind::Precondition, "bezout: B is zero");
  BezoutSolution s;
  s.D = approx_gcd(A, B, opt.gcd_tol);

  Polynomial Cd;
  if (!C.is_zero()) {
    double res = 0.0;
    Cd = exact_quotient(C, s.D, &res);
    if (!(res <= opt.divisibility_tol))
      fail(ErrorKind::NoSolution,
           "bezout: gcd(A,B) does not divide C (relative remainder " + std::to_string(res) + ")");
  }

  std::vector<Root> bd_roots;
  if (B.degree() > 0) {
    bd_roots = roots(B);
    if (s.D.degree() > 0) bd_roots = match_roots(bd_roots, roots(s.D), opt.gcd_tol).only_a;
  }
  int nb = 0;
  for (const Root& r : bd_roots) nb += r.multiplicity;

  if (nb == 0) {
    double res = 0.0;
    s.X = Polynomial();
    s.Y = exact_quotient(-C, B, &res);
    s.residual = bezout_residual(A, B, C, s.X, s.Y);
    return s;
  }

  Polynomial Ad = A.is_zero() ? Polynomial() : exact_quotient(A, s.D);
  bd_roots = leja_order(bd_roots);
  double sc = 1.0;
  for (const Root& r : bd_roots) sc = std::max(sc, std::abs(r.value));

  // The confluent Vandermonde system is solved in Newton form (Hermite divided
  // differences over the Leja-ordered nodes, then Horner expansion), which
  // stays accurate when roots of B/D nearly coalesce. The dense scaled matrix
  // is kept for the condition estimate.
  Eigen::MatrixXcd M(nb, nb);
  std::vector<lcplx> node(nb), dd(nb);
  std::vector<int> group(nb);
  std::vector<std::vector<lcplx>> taylor_h;
  int row = 0;
  for (std::size_t ri = 0; ri < bd_roots.size(); ++ri) {
    const Root& r = bd_roots[ri];
    int mult = r.multiplicity;
    std::vector<lcplx> tc = taylor(Cd, r.value, mult);
    std::vector<lcplx> ta = taylor(Ad, r.value, mult);
    if (std::abs(ta[0]) == 0.0L) fail(ErrorKind::NumericalFailure, "bezout: A/D vanishes at a root of B/D");
    std::vector<lcplx> q(mult);
    for (int m = 0; m < mult; ++m) {
      lcplx acc = tc[m];
      for (int j = 1; j <= m; ++j) acc -= ta[j] * q[m - j];
      q[m] = acc / ta[0];
    }
    taylor_h.push_back(q);
    for (int m = 0; m < mult; ++m, ++row) {
      node[row] = widen(r.value);
      group[row] = static_cast<int>(ri);
      dd[row] = q[0];
      double rmax = 0.0;
      for (int j = 0; j < nb; ++j) {
        M(row, j) = j < m ? cplx(0.0)
                          : binom(j, m) * std::pow(r.value, j - m) * std::pow(sc, -double(j));
        rmax = std::max(rmax, std::abs(M(row, j)));
      }
      if (rmax == 0.0) rmax = 1.0;
      M.row(row) /= rmax;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& sv = svd.singularValues();
  s.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  s.ill_conditioned = !(s.condition <= opt.condition_cap);

  for (int k = 1; k < nb; ++k)
    for (int i = nb - 1; i >= k; --i) {
      if (group[i] == group[i - k])
        dd[i] = taylor_h[group[i]][k];  // f[z, ..., z] with k + 1 copies
      else
        dd[i] = (dd[i] - dd[i - 1]) / (node[i] - node[i - k]);
    }
  std::vector<lcplx> xl(1, dd[nb - 1]);
  for (int k = nb - 2; k >= 0; --k) {
    // xl <- xl * (zeta - node[k]) + dd[k]
    xl.push_back(0.0L);
    for (int j = static_cast<int>(xl.size()) - 1; j > 0; --j) xl[j] = xl[j - 1] - node[k] * xl[j];
    xl[0] = -node[k] * xl[0] + dd[k];
  }
  std::vector<cplx> xc;
  for (lcplx z : xl) xc.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  s.X = Polynomial(std::move(xc));
  s.Y = exact_quotient(A * s.X - C, B);
  s.residual = bezout_residual(A, B, C, s.X, s.Y);
  return s;
}

BezoutSolution realify(const Polynomial& A, const Polynomial& B, const Polynomial& C, int a,
                       int b, int c, const BezoutSolution& sol) {
  double tol = 1e-8;
  if (!is_real_section(A, a, tol * A.norm()).is_real ||
      !is_real_section(B, b, tol * B.norm()).is_real ||
      !is_real_section(C, c, tol * std::max(C.norm(), 1e-300)).is_real)
    fail(ErrorKind::Precondition, "realify: A, B, C must be real sections");
  auto excess = [](const Polynomial& p, int k) {
    double e = 0.0;
    for (int i = k + 1; i <= p.degree(); ++i) e = std::max(e, std::abs(p[i]));
    return e;
  };
  if (excess(sol.X, c - a) > tol * std::max(1.0, sol.X.norm()) ||
      excess(sol.Y, c - b) > tol * std::max(1.0, sol.Y.norm()))
    fail(ErrorKind::Precondition, "realify: solution degree exceeds c-a or c-b");
  BezoutSolution out = sol;
  out.X = realify_section(sol.X, c - a);
  out.Y = realify_section(sol.Y, c - b);
  out.residual = bezout_residual(A, B, C, out.X, out.Y);
  return out;
}

std::pair<Polynomial, Polynomial> SolutionSpace::member(const Polynomial& U) const {
  if (U.degree() > param_degree)
    fail(ErrorKind::DegreeBound, "solution space parameter degree too large");
  Polynomial X = (base.X + U * hom_X).with_bound(x_degree);
  Polynomial Y = (base.Y + U * hom_Y).with_bound(y_degree);
  return {X, Y};
}

SolutionSpace solution_space(const Polynomial& A, const Polynomial& B, const Polynomial& C,
                             int a, int b, int c, int d, const BezoutOptions& opt) {
  if (c < a + b - d) fail(ErrorKind::Precondition, "solution space needs c >= a + b - d");
  Polynomial An = A.with_bound(a), Bn = B.with_bound(b);
  BezoutSolution min = minimal_solution(An, Bn, C, opt);
  if (min.D.bound() != d)
    fail(ErrorKind::Precondition, "solution space: gcd has nominal degree " +
                                      std::to_string(min.D.bound()) + ", expected " +
                                      std::to_string(d));
  SolutionSpace sp;
  sp.param_degree = c - a - b + d;
  sp.x_degree = c - a;
  sp.y_degree = c - b;
  bool real = is_real_section(An, a, 1e-8 * An.norm()).is_real &&
              is_real_section(Bn, b, 1e-8 * Bn.norm()).is_real &&
              is_real_section(C, c, 1e-8 * C.norm()).is_real;
  sp.base = real ? realify(An, Bn, C, a, b, c, min) : min;
  Polynomial Dr = min.D;
  if (real) {
    if (auto u = real_phase(min.D, d)) Dr = realify_section(min.D * *u, d);
  }
  sp.hom_X = exact_quotient(Bn, Dr).with_bound(b - d);
  sp.hom_Y = exact_quotient(An, Dr).with_bound(a - d);
  if (real) {
    sp.hom_X = realify_section(sp.hom_X, b - d);
    sp.hom_Y = realify_section(sp.hom_Y, a - d);
  }
  return sp;
}

}  // namespace whitham
