#include "whitham/polyring.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "whitham/error.hpp"

namespace whitham {

// ---- real structure ---------------------------------------------------------

Polynomial real_pullback(const Polynomial& p, int k) {
  if (p.degree() > k)
    fail(ErrorKind::DegreeBound, "real pullback: degree " + std::to_string(p.degree()) +
                                     " exceeds " + std::to_string(k));
  std::vector<cplx> v(k + 1);
  for (int i = 0; i <= k; ++i) v[i] = std::conj(p[k - i]);
  return Polynomial(std::move(v), k);
}

RealSectionCheck is_real_section(const Polynomial& p, int k, double tol) {
  RealSectionCheck out;
  out.witness.k = k;
  // Coefficients above k count as defect in their own right.
  double d = 0.0;
  for (int i = k + 1; i <= p.degree(); ++i) d = std::max(d, std::abs(p[i]));
  std::vector<cplx> low(k + 1);
  for (int i = 0; i <= k; ++i) low[i] = p[i];
  out.witness.pullback = real_pullback(Polynomial(low, k), k);
  for (int i = 0; i <= k; ++i) d = std::max(d, std::abs(p[i] - std::conj(p[k - i])));
  out.witness.max_defect = d;
  out.is_real = d <= tol;
  return out;
}

Polynomial realify_section(const Polynomial& p, int k) {
  std::vector<cplx> low(k + 1);
  for (int i = 0; i <= k; ++i) low[i] = p[i];
  Polynomial q(low, k);
  return ((q + real_pullback(q, k)) * 0.5).with_bound(k);
}

std::optional<cplx> real_phase(const Polynomial& p, int k, double tol) {
  if (p.is_zero()) return cplx(1.0);
  if (p.degree() > k) return std::nullopt;
  Polynomial q = real_pullback(p, k);
  cplx inner = 0.0;
  for (int i = 0; i <= k; ++i) inner += std::conj(p[i]) * q[i];
  double pn = p.norm();
  if (std::abs(inner) < 0.5 * pn * pn) return std::nullopt;
  cplx u = std::sqrt(inner / std::abs(inner));
  Polynomial up = p * u;
  if (is_real_section(up, k, tol * pn).is_real) return u;
  return std::nullopt;
}

std::vector<double> real_coordinates(const Polynomial& p, int k) {
  std::vector<double> x;
  x.reserve(k + 1);
  for (int i = 0; 2 * i < k; ++i) {
    x.push_back(p[i].real());
    x.push_back(p[i].imag());
  }
  if (k % 2 == 0) x.push_back(p[k / 2].real());
  return x;
}

Polynomial from_real_coordinates(const double* x, int k) {
  std::vector<cplx> v(k + 1, 0.0);
  int j = 0;
  for (int i = 0; 2 * i < k; ++i) {
    v[i] = cplx(x[j], x[j + 1]);
    v[k - i] = std::conj(v[i]);
    j += 2;
  }
  if (k % 2 == 0) v[k / 2] = x[j];
  return Polynomial(std::move(v), k);
}

Polynomial real_root_pair(cplx a) {
  return Polynomial({-a, 1.0 + std::norm(a), -std::conj(a)}, 2);
}

Polynomial real_unit_root(double phi) {
  cplx u = cplx(0.0, 1.0) * std::polar(1.0, -phi / 2);
  return Polynomial({-u * std::polar(1.0, phi), u}, 1);
}

// ---- roots ------------------------------------------------------------------

namespace {

struct Eval {
  cplx newton;   // p/p'
  double resid;  // |p(z)| / sum |c_k||z|^k
};

Eval eval_ratio(const std::vector<cplx>& c, cplx z) {
  int n = static_cast<int>(c.size()) - 1;
  cplx p = 0.0, dp = 0.0;
  double s = 0.0;
  if (std::abs(z) <= 1.0) {
    double az = std::abs(z);
    for (int i = n; i >= 0; --i) {
      dp = dp * z + p;
      p = p * z + c[i];
      s = s * az + std::abs(c[i]);
    }
    return {p / dp, std::abs(p) / s};
  }
  cplx w = 1.0 / z;
  double aw = std::abs(w);
  for (int i = 0; i <= n; ++i) {
    dp = dp * w + p;
    p = p * w + c[i];
    s = s * aw + std::abs(c[i]);
  }
  // p is w^n P(z); N = z q / (n q - w q').
  return {z * p / (double(n) * p - w * dp), std::abs(p) / s};
}

std::vector<cplx> initial_guesses(const std::vector<cplx>& c) {
  int n = static_cast<int>(c.size()) - 1;
  std::vector<int> idx;
  std::vector<double> lg;
  for (int i = 0; i <= n; ++i) {
    if (c[i] != 0.0) {
      idx.push_back(i);
      lg.push_back(std::log(std::abs(c[i])));
    }
  }
  // Upper convex hull of (i, log|c_i|).
  std::vector<int> hull;
  for (std::size_t t = 0; t < idx.size(); ++t) {
    while (hull.size() >= 2) {
      int a = hull[hull.size() - 2], b = hull.back();
      double cross = (idx[b] - idx[a]) * (lg[t] - lg[a]) - (lg[b] - lg[a]) * (idx[t] - idx[a]);
      if (cross >= 0) hull.pop_back();
      else break;
    }
    hull.push_back(static_cast<int>(t));
  }
  std::vector<cplx> z;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    int i0 = idx[hull[h]], i1 = idx[hull[h + 1]];
    int len = i1 - i0;
    double r = std::exp((lg[hull[h]] - lg[hull[h + 1]]) / len);
    double off = 0.7 + two_pi * h / (n + 1.0);
    for (int j = 0; j < len; ++j) z.push_back(std::polar(r, off + two_pi * j / len));
  }
  return z;
}

}  // namespace

std::vector<cplx> raw_roots(const Polynomial& p) {
  if (p.is_zero()) fail(ErrorKind::UndefinedRoots, "roots of the zero polynomial");
  const auto& all = p.coeffs();
  int k0 = 0;
  while (all[k0] == 0.0) ++k0;
  std::vector<cplx> out(k0, 0.0);
  std::vector<cplx> c(all.begin() + k0, all.end());
  int n = static_cast<int>(c.size()) - 1;
  if (n == 0) return out;
  if (n == 1) {
    out.push_back(-c[0] / c[1]);
    return out;
  }
  std::vector<cplx> z = initial_guesses(c);
  std::vector<char> done(n, 0);
  const double stop = 4.0 * DBL_EPSILON;
  for (int it = 0; it < 200; ++it) {
    bool all_done = true;
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      Eval e = eval_ratio(c, z[i]);
      if (e.resid <= stop) {
        done[i] = 1;
        continue;
      }
      cplx sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      cplx w = e.newton / (1.0 - e.newton * sum);
      z[i] -= w;
      if (std::abs(w) <= stop * std::abs(z[i])) done[i] = 1;
      else all_done = false;
    }
    if (all_done) break;
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, eval_ratio(c, z[i]).resid);
  if (!(worst <= 1e-12))
    fail(ErrorKind::NumericalFailure,
         "root iteration did not converge (backward error " + std::to_string(worst) + ")");
  out.insert(out.end(), z.begin(), z.end());
  return out;
}

std::vector<Root> roots(const Polynomial& p, double cluster_radius) {
  std::vector<cplx> z = raw_roots(p);
  int n = static_cast<int>(z.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double scale = std::max({1.0, std::abs(z[i]), std::abs(z[j])});
      if (std::abs(z[i] - z[j]) <= cluster_radius * scale) parent[find(i)] = find(j);
    }
  std::vector<Root> out;
  std::vector<int> seen(n, -1);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (seen[r] < 0) {
      seen[r] = static_cast<int>(out.size());
      out.push_back({z[i], 1});
    } else {
      Root& rt = out[seen[r]];
      rt.value = (rt.value * double(rt.multiplicity) + z[i]) / double(rt.multiplicity + 1);
      rt.multiplicity += 1;
    }
  }
  // Simple roots: Newton steps with the residual in extended precision, which
  // matters for nearly coalescing pairs where the double residual limits accuracy.
  for (Root& rt : out) {
    if (rt.multiplicity != 1) continue;
    using lcplx = std::complex<long double>;
    auto eval = [&](lcplx x, lcplx& dv) {
      lcplx v = 0.0L;
      dv = 0.0L;
      for (int i = p.degree(); i >= 0; --i) {
        dv = dv * x + v;
        v = v * x + lcplx(p[i].real(), p[i].imag());
      }
      return v;
    };
    lcplx x(rt.value.real(), rt.value.imag()), dv;
    long double best = std::abs(eval(x, dv));
    for (int it = 0; it < 3 && best > 0.0L; ++it) {
      lcplx v = eval(x, dv);
      if (dv == 0.0L) break;
      lcplx y = x - v / dv, dy;
      long double r = std::abs(eval(y, dy));
      if (!(r < best) || std::abs(y - x) > cluster_radius * std::max(1.0L, std::abs(x))) break;
      x = y;
      best = r;
    }
    rt.value = cplx(static_cast<double>(x.real()), static_cast<double>(x.imag()));
  }
  // Polishing can pull the two halves of a split multiple root together.
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t i = 0; i < out.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < out.size() && !merged; ++j) {
        double scale = std::max({1.0, std::abs(out[i].value), std::abs(out[j].value)});
        if (std::abs(out[i].value - out[j].value) > cluster_radius * scale) continue;
        int m = out[i].multiplicity + out[j].multiplicity;
        out[i].value = (out[i].value * double(out[i].multiplicity) +
                        out[j].value * double(out[j].multiplicity)) / double(m);
        out[i].multiplicity = m;
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(j));
        merged = true;
      }
  }
  // Refine multiple roots as simple roots of the (m-1)-th derivative.
  for (Root& rt : out) {
    if (rt.multiplicity == 1 || rt.value == 0.0) continue;
    Polynomial d = p;
    for (int m = 1; m < rt.multiplicity; ++m) d = d.derivative();
    Polynomial dd = d.derivative();
    cplx x = rt.value;
    double limit = cluster_radius * std::max(1.0, std::abs(x));
    for (int it = 0; it < 8; ++it) {
      cplx den = dd(x);
      if (den == 0.0) break;
      cplx step = d(x) / den;
      if (std::abs(step) > limit) break;
      x -= step;
      if (std::abs(step) <= 4 * DBL_EPSILON * std::abs(x)) break;
    }
    if (std::abs(x - rt.value) <= limit) rt.value = x;
  }
  return out;
}

std::vector<cplx> expand_roots(const std::vector<Root>& r) {
  std::vector<cplx> v;
  for (const Root& x : r)
    for (int m = 0; m < x.multiplicity; ++m) v.push_back(x.value);
  return v;
}

SectionRoots section_roots(const Polynomial& p, double cluster_radius) {
  SectionRoots s;
  s.finite = roots(p, cluster_radius);
  s.at_infinity = p.bound() - p.degree();
  return s;
}

// ---- gcd ----------------------------------------------------------------------

RootMatch match_roots(const std::vector<Root>& a, const std::vector<Root>& b, double tol) {
  RootMatch m;
  std::vector<int> left(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) left[j] = b[j].multiplicity;
  for (const Root& ra : a) {
    int best = -1;
    double bd = INFINITY;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (left[j] == 0) continue;
      double d = std::abs(ra.value - b[j].value);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(j);
      }
    }
    double radius = tol * std::max(1.0, std::abs(ra.value));
    if (best >= 0 && bd <= 10 * radius && bd >= 0.1 * radius) m.borderline = true;
    if (best >= 0 && bd <= radius) {
      int k = std::min(ra.multiplicity, left[best]);
      m.common.push_back({0.5 * (ra.value + b[best].value), k});
      left[best] -= k;
      if (ra.multiplicity > k) m.only_a.push_back({ra.value, ra.multiplicity - k});
    } else {
      m.only_a.push_back(ra);
    }
  }
  for (std::size_t j = 0; j < b.size(); ++j)
    if (left[j] > 0) m.only_b.push_back({b[j].value, left[j]});
  return m;
}

GcdReport approx_gcd_report(const Polynomial& p, const Polynomial& q, double tol) {
  if (p.is_zero() && q.is_zero()) fail(ErrorKind::UndefinedRoots, "gcd of two zero polynomials");
  GcdReport rep;
  if (q.is_zero()) {
    rep.gcd = p.monic().with_bound(p.bound());
    return rep;
  }
  if (p.is_zero()) {
    rep.gcd = q.monic().with_bound(q.bound());
    return rep;
  }
  RootMatch m = match_roots(roots(p), roots(q), tol);
  std::vector<cplx> c = expand_roots(m.common);
  Polynomial g = Polynomial::from_roots(c);
  int inf = std::min(p.bound() - p.degree(), q.bound() - q.degree());
  rep.gcd = g.with_bound(g.degree() + std::max(inf, 0));
  rep.borderline = m.borderline;
  return rep;
}

Polynomial approx_gcd(const Polynomial& p, const Polynomial& q, double tol) {
  return approx_gcd_report(p, q, tol).gcd;
}

// ---- factor tower -------------------------------------------------------------

namespace {

Polynomial monic_from(const std::vector<Root>& r, int at_inf) {
  std::vector<cplx> z = expand_roots(r);
  Polynomial g = Polynomial::from_roots(z);
  g = g.with_bound(g.degree() + at_inf);
  if (auto u = real_phase(g, g.bound())) {
    g = realify_section(g * *u, g.bound());
  }
  return g;
}

std::vector<Root> remove(const std::vector<Root>& a, const std::vector<Root>& sub, double tol) {
  return match_roots(a, sub, tol).only_a;
}

}  // namespace

FactorStructure factor_structure(const Polynomial& P, const Polynomial& b1,
                                 const Polynomial& b2, double tol) {
  if (P.is_zero() || b1.is_zero() || b2.is_zero())
    fail(ErrorKind::UndefinedRoots, "factor structure of a zero polynomial");
  SectionRoots rp = section_roots(P), r1 = section_roots(b1), r2 = section_roots(b2);
  FactorStructure fs;

  RootMatch m01 = match_roots(rp.finite, r1.finite, tol);
  RootMatch mF = match_roots(m01.common, r2.finite, tol);
  fs.borderline = m01.borderline || mF.borderline;
  const std::vector<Root>& Fr = mF.common;
  int iF = std::min({rp.at_infinity, r1.at_infinity, r2.at_infinity});

  std::vector<Root> Pq = remove(rp.finite, Fr, tol);
  std::vector<Root> q1 = remove(r1.finite, Fr, tol);
  std::vector<Root> q2 = remove(r2.finite, Fr, tol);
  RootMatch m1 = match_roots(Pq, q1, tol);
  RootMatch m2 = match_roots(Pq, q2, tol);
  fs.borderline = fs.borderline || m1.borderline || m2.borderline;
  int iP = rp.at_infinity - iF, i1 = r1.at_infinity - iF, i2 = r2.at_infinity - iF;
  int iF1 = std::min(iP, i1), iF2 = std::min(iP, i2);

  std::vector<Root> Pt = remove(remove(Pq, m1.common, tol), m2.common, tol);
  std::vector<Root> t1 = remove(q1, m1.common, tol);
  std::vector<Root> t2 = remove(q2, m2.common, tol);
  RootMatch mG = match_roots(t1, t2, tol);
  fs.borderline = fs.borderline || mG.borderline;
  int iG = std::min(i1 - iF1, i2 - iF2);

  fs.F = monic_from(Fr, iF);
  fs.F1 = monic_from(m1.common, iF1);
  fs.F2 = monic_from(m2.common, iF2);
  fs.G = monic_from(mG.common, iG);
  fs.d_F = fs.F.bound();
  fs.d_1 = fs.F1.bound();
  fs.d_2 = fs.F2.bound();
  fs.d_G = fs.G.bound();

  Polynomial denP = fs.F * fs.F1 * fs.F2;
  Polynomial den1 = fs.F * fs.F1 * fs.G;
  Polynomial den2 = fs.F * fs.F2 * fs.G;
  auto rebuild = [&](const std::vector<Root>& r, const Polynomial& orig, const Polynomial& den) {
    Polynomial t = Polynomial::from_roots(expand_roots(r), orig.leading() / den.leading());
    return t.with_bound(orig.bound() - den.bound());
  };
  fs.P_tilde = rebuild(Pt, P, denP);
  fs.b1_tilde = rebuild(mG.only_a, b1, den1);
  fs.b2_tilde = rebuild(mG.only_b, b2, den2);
  for (Polynomial* t : {&fs.P_tilde, &fs.b1_tilde, &fs.b2_tilde}) {
    if (is_real_section(*t, t->bound(), 1e-6 * t->norm()).is_real)
      *t = realify_section(*t, t->bound());
  }
  fs.reconstruction_residual = std::max({relative_distance(P, denP * fs.P_tilde),
                                         relative_distance(b1, den1 * fs.b1_tilde),
                                         relative_distance(b2, den2 * fs.b2_tilde)});
  return fs;
}

}  // namespace whitham
