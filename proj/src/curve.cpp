#include "whitham/curve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "whitham/error.hpp"

namespace whitham {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2 * kPi);
  if (a < 0) a += 2 * kPi;
  return a - kPi;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// ---- curves ----------------------------------------------------------------

HyperellipticCurve general_curve(const Polynomial& P) {
  if (P.degree() < 1) fail(ErrorKind::CurveViolation, "curve polynomial has no roots");
  HyperellipticCurve c;
  c.P = P;
  c.leading = P.leading();
  auto r = roots(P);
  for (const Root& x : r) {
    if (x.multiplicity > 1)
      fail(ErrorKind::CurveViolation, "repeated root of P: curve is singular");
    c.branch_points.push_back(x.value);
  }
  int n = static_cast<int>(c.branch_points.size());
  c.genus = (n - 1) / 2;
  return c;
}

HyperellipticCurve build_curve(const Polynomial& P, double tol) {
  int k = P.bound();
  if (k < 2 || k % 2 != 0)
    fail(ErrorKind::CurveViolation, "P must have even nominal degree 2g+2 >= 2");
  if (!is_real_section(P, k, 1e-8 * P.norm()).is_real)
    fail(ErrorKind::RealityViolation, "P is not a real section");
  HyperellipticCurve c = general_curve(P);
  c.genus = k / 2 - 1;
  int inf = k - P.degree();
  std::vector<cplx> inner, outer;
  for (cplx z : c.branch_points) {
    double m = std::abs(z);
    if (std::abs(m - 1.0) < tol)
      fail(ErrorKind::CurveViolation, "P has a root on the unit circle");
    if (m < 1.0) inner.push_back(z);
    else outer.push_back(z);
  }
  for (cplx a : inner) {
    if (a == 0.0 || std::abs(a) < 1e-300) {
      c.branched_at_zero = true;
      c.branch_pairs.push_back({0.0, INFINITY, true});
      continue;
    }
    cplx partner = 1.0 / std::conj(a);
    auto it = std::min_element(outer.begin(), outer.end(), [&](cplx u, cplx v) {
      return std::abs(u - partner) < std::abs(v - partner);
    });
    if (it == outer.end() || std::abs(*it - partner) > 1e-6 * std::abs(partner))
      fail(ErrorKind::RealityViolation, "unpaired root of P");
    c.branch_pairs.push_back({a, *it, false});
    outer.erase(it);
  }
  if (!outer.empty()) fail(ErrorKind::RealityViolation, "unpaired root of P outside the disc");
  if (c.branched_at_zero != (inf == 1) || inf > 1)
    fail(ErrorKind::RealityViolation, "roots at zero and infinity do not pair");
  if (static_cast<int>(c.branch_pairs.size()) != c.genus + 1)
    fail(ErrorKind::CurveViolation, "wrong number of branch pairs for the genus");
  return c;
}

// ---- paths -----------------------------------------------------------------

PathPiece PathPiece::segment(cplx a, cplx b) {
  PathPiece p;
  p.kind = Kind::Segment;
  p.from = a;
  p.to = b;
  return p;
}

PathPiece PathPiece::arc(cplx center, double radius, double theta0, double theta1) {
  PathPiece p;
  p.kind = Kind::Arc;
  p.center = center;
  p.radius = radius;
  p.theta0 = theta0;
  p.theta1 = theta1;
  p.from = center + std::polar(radius, theta0);
  p.to = center + std::polar(radius, theta1);
  return p;
}

PathPiece PathPiece::unit_arc(cplx a, cplx b) {
  double t0 = std::arg(a);
  double t1 = t0 + wrap_angle(std::arg(b) - t0);
  PathPiece p = arc(0.0, 1.0, t0, t1);
  p.from = a;
  p.to = b;
  return p;
}

PathPiece PathPiece::lasso(int branch, cplx target, double loop_radius) {
  PathPiece p;
  p.kind = Kind::Lasso;
  p.branch = branch;
  p.target = target;
  p.loop_radius = loop_radius;
  return p;
}

cplx PathOnCurve::end() const {
  cplx z = start;
  for (const PathPiece& p : pieces)
    if (p.kind != PathPiece::Kind::Lasso) z = p.to;
  return z;
}

std::vector<cplx> PathOnCurve::polyline(int n) const {
  std::vector<cplx> out{start};
  cplx cur = start;
  for (const PathPiece& p : pieces) {
    switch (p.kind) {
      case PathPiece::Kind::Segment:
        for (int i = 1; i <= n; ++i) out.push_back(p.from + (p.to - p.from) * (double(i) / n));
        cur = p.to;
        break;
      case PathPiece::Kind::Arc:
        for (int i = 1; i <= n; ++i)
          out.push_back(p.center + std::polar(p.radius, p.theta0 + (p.theta1 - p.theta0) * i / n));
        cur = p.to;
        break;
      case PathPiece::Kind::Lasso: {
        cplx tip = p.loop_radius > 0 ? p.loop_radius * cur / std::abs(cur) : p.target;
        out.push_back(tip);
        if (p.loop_radius > 0) {
          double a = std::arg(tip);
          for (int i = 1; i <= n; ++i) out.push_back(std::polar(p.loop_radius, a + 2 * kPi * i / n));
        }
        out.push_back(cur);
        break;
      }
    }
  }
  return out;
}

// ---- integration engine --------------------------------------------------

namespace {

struct State {
  std::vector<cplx> s;  // branch of sqrt(zeta - e_j) at the current point
  int sign = 1;
  cplx z = 1.0;
};

// A smooth parametrised piece t in [t0, t1].
struct Param {
  std::function<cplx(double)> z;
  std::function<cplx(double)> dz;
  // Preimages of a point of the zeta-plane in the complex t-plane.
  std::function<std::vector<cplx>(cplx, double)> preimage;
  double t0 = 0.0, t1 = 1.0;
  double max_panel = INFINITY;
  int special = -1;        // lasso target handled analytically
  cplx special_value = 0;  // sqrt(z_start - e) for the special factor
};

double bernstein_rho(cplx x) {
  cplx s = std::sqrt(x * x - 1.0);
  return std::max(std::abs(x + s), std::abs(x - s));
}

class Engine {
 public:
  Engine(const HyperellipticCurve& c, int max_power, int order, bool estimate)
      : e_(c.branch_points), sqrt_lc_(std::sqrt(c.leading)), M_(max_power), estimate_(estimate) {
    gauss_legendre(order, xs_, ws_);
    if (estimate) gauss_legendre(2 * order, xl_, wl_);
    singular_ = e_;
    bool zero_listed = false;
    for (cplx z : e_) zero_listed = zero_listed || z == 0.0;
    if (!zero_listed) singular_.push_back(0.0);
  }

  State canonical_at_one() const {
    State st;
    st.z = 1.0;
    for (cplx e : e_) st.s.push_back(std::sqrt(1.0 - e));
    cplx eta = eta_of(st);
    st.sign = (eta.real() > 0 || (eta.real() == 0 && eta.imag() > 0)) ? 1 : -1;
    return st;
  }

  cplx eta_of(const State& st) const {
    cplx v = double(st.sign) * sqrt_lc_;
    for (cplx f : st.s) v *= f;
    return v;
  }

  // Move the state from 1 to the start of a path (along the unit circle when
  // the start lies on it).
  State initial_state(cplx start) {
    State st = canonical_at_one();
    if (std::abs(start - 1.0) == 0.0) return st;
    PathPiece p = std::abs(std::abs(start) - 1.0) < 1e-12 ? PathPiece::unit_arc(1.0, start)
                                                           : PathPiece::segment(1.0, start);
    run_piece(p, st, nullptr, nullptr, nullptr);
    return st;
  }

  void run(const PathOnCurve& path, MonomialIntegrals& out) {
    State st = initial_state(path.start);
    int sign0 = st.sign * path.start_sheet;
    st.sign = sign0;
    std::vector<cplx> vs(M_ + 1, 0.0), vl(M_ + 1, 0.0);
    std::vector<double> mag(M_ + 1, 0.0);
    for (const PathPiece& p : path.pieces) run_piece(p, st, &vs, estimate_ ? &vl : nullptr, &mag);
    out.value = estimate_ ? vl : vs;
    out.magnitude = mag;
    out.error.assign(M_ + 1, 0.0);
    if (estimate_)
      for (int m = 0; m <= M_; ++m) out.error[m] = std::abs(vl[m] - vs[m]);
    // Compare eta at the end with continuation of the start sheet.
    State ref = initial_state(path.end());
    cplx a = eta_of(st), b = eta_of(ref) * double(path.start_sheet);
    out.end_sheet_flip = std::abs(a - b) < std::abs(a + b) ? 1 : -1;
  }

  void run_piece(const PathPiece& p, State& st, std::vector<cplx>* vs, std::vector<cplx>* vl,
                 std::vector<double>* mag) {
    switch (p.kind) {
      case PathPiece::Kind::Segment: {
        cplx a = p.from, b = p.to;
        if (std::abs(st.z - a) > 1e-9 * std::max(1.0, std::abs(a)))
          fail(ErrorKind::Geometry, "path pieces do not join");
        Param q;
        q.z = [a, b](double t) { return a + (b - a) * t; };
        q.dz = [a, b](double) { return b - a; };
        q.preimage = [a, b](cplx w, double) { return std::vector<cplx>{(w - a) / (b - a)}; };
        smooth(q, st, vs, vl, mag);
        st.z = b;
        break;
      }
      case PathPiece::Kind::Arc: {
        cplx c = p.center;
        double r = p.radius;
        if (std::abs(st.z - p.from) > 1e-9 * std::max(1.0, std::abs(p.from)))
          fail(ErrorKind::Geometry, "path pieces do not join");
        Param q;
        q.z = [c, r](double t) { return c + std::polar(r, t); };
        q.dz = [c, r](double t) { return cplx(0.0, 1.0) * std::polar(r, t); };
        q.preimage = [c, r](cplx w, double mid) {
          cplx u = (w - c) / r;
          double a = std::arg(u);
          a += 2 * kPi * std::round((mid - a) / (2 * kPi));
          return std::vector<cplx>{cplx(a, -std::log(std::abs(u)))};
        };
        q.t0 = p.theta0;
        q.t1 = p.theta1;
        q.max_panel = kPi / 4;
        smooth(q, st, vs, vl, mag);
        st.z = p.to;
        break;
      }
      case PathPiece::Kind::Lasso:
        lasso(p, st, vs, vl, mag);
        break;
    }
  }

 private:
  void lasso(const PathPiece& p, State& st, std::vector<cplx>* vs, std::vector<cplx>* vl,
             std::vector<double>* mag) {
    int k = p.branch;
    if (k < 0 || k >= static_cast<int>(e_.size()) ||
        std::abs(e_[k] - p.target) > 1e-9 * std::max(1.0, std::abs(p.target)))
      fail(ErrorKind::Geometry, "lasso target is not a branch point of this curve");
    cplx zs = st.z;
    if (p.loop_radius > 0) {
      cplx tip = p.loop_radius * zs / std::abs(zs);
      double a = std::arg(tip);
      run_piece(PathPiece::segment(zs, tip), st, vs, vl, mag);
      run_piece(PathPiece::arc(0.0, p.loop_radius, a, a + 2 * kPi), st, vs, vl, mag);
      st.z = tip;
      run_piece(PathPiece::segment(tip, zs), st, vs, vl, mag);
      return;
    }
    cplx e = e_[k];
    cplx d = zs - e;
    Param q;
    q.z = [e, d](double v) { return e + d * v * v; };
    q.dz = [d](double) { return 2.0 * d; };  // the factor v cancels against sqrt(zeta - e)
    q.preimage = [e, d](cplx w, double) {
      cplx r = std::sqrt((w - e) / d);
      return std::vector<cplx>{r, -r};
    };
    q.t0 = 1.0;
    q.t1 = 0.0;
    q.special = k;
    q.special_value = st.s[k];
    std::vector<cplx> ts(M_ + 1, 0.0), tl(M_ + 1, 0.0);
    std::vector<double> tm(M_ + 1, 0.0);
    State tmp = st;
    smooth(q, tmp, vs ? &ts : nullptr, vl ? &tl : nullptr, mag ? &tm : nullptr);
    for (int m = 0; m <= M_; ++m) {
      if (vs) (*vs)[m] += 2.0 * ts[m];
      if (vl) (*vl)[m] += 2.0 * tl[m];
      if (mag) (*mag)[m] += 2.0 * tm[m];
    }
    st.s[k] = -st.s[k];
  }

  void panels(const Param& q, double a, double b, int depth, std::vector<std::pair<double, double>>& out) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    bool ok = std::abs(b - a) <= q.max_panel;
    for (std::size_t j = 0; ok && j < singular_.size(); ++j) {
      if (static_cast<int>(j) == q.special) continue;
      for (cplx t : q.preimage(singular_[j], mid)) {
        if (bernstein_rho((t - mid) / half) < 3.0) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      out.emplace_back(a, b);
      return;
    }
    if (depth > 48) fail(ErrorKind::Geometry, "path passes through a branch point or pole");
    panels(q, a, mid, depth + 1, out);
    panels(q, mid, b, depth + 1, out);
  }

  // Integrates along q from t0 to t1, continuing the sheet state.
  void smooth(const Param& q, State& st, std::vector<cplx>* vs, std::vector<cplx>* vl,
              std::vector<double>* mag) {
    std::vector<std::pair<double, double>> pan;
    double lo = std::min(q.t0, q.t1), hi = std::max(q.t0, q.t1);
    if (hi == lo) return;
    panels(q, lo, hi, 0, pan);
    if (q.t1 < q.t0) {
      std::reverse(pan.begin(), pan.end());
      for (auto& pr : pan) std::swap(pr.first, pr.second);
    }
    std::vector<cplx> buf(M_ + 1);
    for (const auto& [ta, tb] : pan) {
      cplx za = q.z(ta);
      double mid = 0.5 * (ta + tb), half = 0.5 * (tb - ta);
      auto eval = [&](double t, std::vector<cplx>& f) {
        cplx z = q.z(t);
        cplx eta = double(st.sign) * sqrt_lc_;
        for (std::size_t j = 0; j < e_.size(); ++j) {
          if (static_cast<int>(j) == q.special) eta *= q.special_value;
          else eta *= st.s[j] * std::sqrt((z - e_[j]) / (za - e_[j]));
        }
        cplx base = q.dz(t) / (z * z * eta);
        for (int m = 0; m <= M_; ++m) {
          f[m] = base;
          base *= z;
        }
      };
      if (vs || mag) {
        for (std::size_t i = 0; i < xs_.size(); ++i) {
          eval(mid + half * xs_[i], buf);
          for (int m = 0; m <= M_; ++m) {
            cplx c = half * ws_[i] * buf[m];
            if (vs) (*vs)[m] += c;
            if (mag && !vl) (*mag)[m] += std::abs(c);
          }
        }
      }
      if (vl) {
        for (std::size_t i = 0; i < xl_.size(); ++i) {
          eval(mid + half * xl_[i], buf);
          for (int m = 0; m <= M_; ++m) {
            cplx c = half * wl_[i] * buf[m];
            (*vl)[m] += c;
            if (mag) (*mag)[m] += std::abs(c);
          }
        }
      }
      cplx zb = q.z(tb);
      for (std::size_t j = 0; j < e_.size(); ++j)
        if (static_cast<int>(j) != q.special) st.s[j] *= std::sqrt((zb - e_[j]) / (za - e_[j]));
    }
    if (q.special < 0) st.z = q.z(q.t1);
  }

  std::vector<cplx> e_, singular_;
  cplx sqrt_lc_;
  int M_;
  bool estimate_;
  std::vector<double> xs_, ws_, xl_, wl_;
};

}  // namespace

cplx MonomialIntegrals::contract(const Polynomial& b) const {
  cplx s = 0.0;
  for (int m = 0; m <= b.degree() && m < static_cast<int>(value.size()); ++m) s += b[m] * value[m];
  return s;
}

double MonomialIntegrals::contract_magnitude(const Polynomial& b) const {
  double s = 0.0;
  for (int m = 0; m <= b.degree() && m < static_cast<int>(magnitude.size()); ++m)
    s += std::abs(b[m]) * magnitude[m];
  return s;
}

double MonomialIntegrals::contract_error(const Polynomial& b) const {
  double s = 0.0;
  for (int m = 0; m <= b.degree() && m < static_cast<int>(error.size()); ++m)
    s += std::abs(b[m]) * error[m];
  return s;
}

MonomialIntegrals integrate_monomials(const HyperellipticCurve& curve, const PathOnCurve& path,
                                      int max_power, int quad_order, bool estimate_error) {
  if (quad_order < 1) fail(ErrorKind::Precondition, "quadrature order must be positive");
  Engine eng(curve, max_power, quad_order, estimate_error);
  MonomialIntegrals out;
  eng.run(path, out);
  return out;
}

IntegrationResult integrate(const Differential& diff, const PathOnCurve& path, int quad_order,
                            bool estimate_error) {
  MonomialIntegrals mi =
      integrate_monomials(diff.curve, path, std::max(diff.b.degree(), 0), quad_order, estimate_error);
  IntegrationResult r;
  r.value = mi.contract(diff.b);
  r.magnitude = mi.contract_magnitude(diff.b);
  r.error = mi.contract_error(diff.b);
  r.end_sheet_flip = mi.end_sheet_flip;
  return r;
}

cplx residue_at_zero(const Differential& diff) {
  cplx P0 = diff.curve.P[0], P1 = diff.curve.P[1];
  if (P0 == 0.0)
    fail(ErrorKind::Precondition, "residue at zero undefined for P_0 = 0; use residue_condition");
  return diff.b[1] - 0.5 * P1 * diff.b[0] / P0;
}

cplx residue_condition(const Polynomial& P, const Polynomial& b) {
  return P[1] * b[0] - 2.0 * P[0] * b[1];
}

// ---- homology basis ---------------------------------------------------------

namespace {

double point_segment_distance(cplx q, cplx a, cplx b) {
  cplx d = b - a;
  double L2 = std::norm(d);
  if (L2 == 0.0) return std::abs(q - a);
  double t = std::clamp(((q - a) * std::conj(d)).real() / L2, 0.0, 1.0);
  return std::abs(q - (a + t * d));
}

struct Layout {
  std::vector<int> chain;
  std::vector<double> loop_radius;
  int excluded = -1;
};

// Loop radius for the circle variant, or 0 when a straight lasso is used.
double choose_loop_radius(const std::vector<cplx>& e, int k) {
  double r = std::abs(e[k]);
  if (r > 0.1) return 0.0;
  double others = INFINITY;
  for (std::size_t j = 0; j < e.size(); ++j)
    if (static_cast<int>(j) != k) others = std::min(others, std::abs(e[j]));
  double r0 = std::min(0.5 * others, 0.5);
  if (r0 >= 3.0 * r) return r0;
  if (r == 0.0) fail(ErrorKind::Geometry, "no room for a loop around the branch point at 0");
  return 0.0;
}

// Smallest distance from a lasso's support to the other singular points.
double lasso_clearance(const std::vector<cplx>& e, int k, double loop_radius, cplx z0) {
  cplx tip = loop_radius > 0 ? loop_radius * z0 / std::abs(z0) : e[k];
  double c = INFINITY;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (static_cast<int>(j) == k) continue;
    if (loop_radius > 0 && std::abs(e[j]) < loop_radius) continue;
    c = std::min(c, point_segment_distance(e[j], z0, tip));
  }
  if (loop_radius == 0.0) {
    bool zero_is_branch = false;
    for (cplx z : e) zero_is_branch = zero_is_branch || z == 0.0;
    if (!zero_is_branch) c = std::min(c, point_segment_distance(0.0, z0, tip));
  } else {
    for (std::size_t j = 0; j < e.size(); ++j)
      if (static_cast<int>(j) != k && std::abs(e[j]) >= loop_radius)
        c = std::min(c, std::abs(std::abs(e[j]) - loop_radius));
  }
  return c;
}

std::vector<int> fan_order(const std::vector<cplx>& e, const std::vector<int>& members, cplx z0,
                           cplx ref_dir) {
  std::vector<std::pair<double, int>> ang;
  for (int k : members) {
    double a = std::arg((e[k] - z0) / ref_dir);
    if (a <= 0) a += 2 * kPi;
    ang.emplace_back(a, k);
  }
  std::sort(ang.begin(), ang.end());
  std::vector<int> out;
  for (auto& [a, k] : ang) out.push_back(k);
  return out;
}

CycleBasis assemble(const HyperellipticCurve& c, cplx z0, double theta, std::vector<int> chain,
                    std::vector<double> loop_radius, double clearance) {
  CycleBasis B;
  B.base_point = z0;
  B.base_angle = theta;
  B.snapshot = c.branch_points;
  B.chain = chain;
  B.loop_radius = loop_radius;
  B.clearance = clearance;
  const auto& e = c.branch_points;
  auto lasso = [&](int k) { return PathPiece::lasso(k, e[k], loop_radius[k]); };
  int g = c.genus;
  for (int j = 0; j < 2 * g; ++j) {
    PathOnCurve p;
    p.start = z0;
    p.closed = true;
    p.pieces = {lasso(chain[j]), lasso(chain[j + 1])};
    (j % 2 == 0 ? B.a_cycles : B.b_cycles).push_back(p);
  }
  int best = chain.front();
  for (int k : chain)
    if (std::abs(e[k] - z0) < std::abs(e[best] - z0)) best = k;
  B.closing = best;
  for (int s : {1, -1}) {
    PathOnCurve p;
    p.start = double(s);
    p.closed = false;
    p.pieces = {PathPiece::unit_arc(double(s), z0), lasso(best), PathPiece::unit_arc(z0, double(s))};
    (s == 1 ? B.gamma_plus : B.gamma_minus) = p;
  }
  return B;
}

}  // namespace

CycleBasis homology_basis(const HyperellipticCurve& c, const BasisOptions& opt) {
  const auto& e = c.branch_points;
  int n = static_cast<int>(e.size());
  int g = c.genus;
  if (n != 2 * g + 1 && n != 2 * g + 2)
    fail(ErrorKind::Geometry, "branch point count does not match the genus");
  std::vector<int> members;
  int excluded = -1;
  if (n == 2 * g + 2) {
    excluded = 0;
    for (int k = 1; k < n; ++k)
      if (std::abs(e[k]) > std::abs(e[excluded])) excluded = k;
  }
  for (int k = 0; k < n; ++k)
    if (k != excluded) members.push_back(k);
  std::vector<double> loop_radius(n, 0.0);
  for (int k : members) loop_radius[k] = choose_loop_radius(e, k);

  auto score = [&](cplx z0) {
    double s = INFINITY;
    for (int k : members) s = std::min(s, lasso_clearance(e, k, loop_radius[k], z0));
    return s;
  };
  double best_theta = 0.0, best = -1.0;
  if (opt.base_angle) {
    best_theta = *opt.base_angle;
    best = score(std::polar(1.0, best_theta));
  } else {
    for (int i = 0; i < opt.angle_samples; ++i) {
      double th = -kPi + 2 * kPi * (i + 0.5) / opt.angle_samples;
      double s = score(std::polar(1.0, th));
      if (s > best + 1e-12) {
        best = s;
        best_theta = th;
      }
    }
  }
  if (!(best >= opt.min_clearance))
    fail(ErrorKind::Geometry, "no base point gives lassos clear of other branch points (clearance " +
                                  std::to_string(best) + ")");
  cplx z0 = std::polar(1.0, best_theta);
  cplx ref = excluded >= 0 ? e[excluded] - z0 : z0;
  std::vector<int> chain = fan_order(e, members, z0, ref);
  return assemble(c, z0, best_theta, chain, loop_radius, best);
}

CycleBasis transport_basis(const CycleBasis& basis, const HyperellipticCurve& c) {
  const auto& e = c.branch_points;
  int n = static_cast<int>(e.size());
  int old_n = static_cast<int>(basis.snapshot.size());
  std::vector<int> map(old_n, -1);
  std::vector<char> used(n, 0);
  // Chain members first: they must all be found.
  std::vector<int> order = basis.chain;
  for (int k = 0; k < old_n; ++k)
    if (std::find(order.begin(), order.end(), k) == order.end()) order.push_back(k);
  for (int k : order) {
    int best = -1;
    double bd = INFINITY;
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      double d = std::abs(e[j] - basis.snapshot[k]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    bool in_chain = std::find(basis.chain.begin(), basis.chain.end(), k) != basis.chain.end();
    if (best < 0) {
      if (in_chain) fail(ErrorKind::Geometry, "branch point lost while transporting the basis");
      continue;
    }
    if (in_chain) {
      double sep = INFINITY;
      for (int j = 0; j < old_n; ++j)
        if (j != k) sep = std::min(sep, std::abs(basis.snapshot[j] - basis.snapshot[k]));
      if (bd > 0.25 * sep && bd > 1e-12)
        fail(ErrorKind::Geometry, "branch points moved too far to transport the basis");
    }
    map[k] = best;
    used[best] = 1;
  }
  std::vector<int> chain;
  std::vector<double> loop_radius(n, 0.0);
  for (int k : basis.chain) {
    chain.push_back(map[k]);
    loop_radius[map[k]] = basis.loop_radius[k];
  }
  double clearance = INFINITY;
  for (int k : chain) {
    if (loop_radius[k] > 0 && std::abs(e[k]) * 1.5 > loop_radius[k])
      fail(ErrorKind::Geometry, "branch point left its loop while transporting the basis");
    clearance = std::min(clearance, lasso_clearance(e, k, loop_radius[k], basis.base_point));
  }
  if (!(clearance > 1e-6))
    fail(ErrorKind::Geometry, "a lasso became blocked while transporting the basis");
  CycleBasis out = assemble(c, basis.base_point, basis.base_angle, chain, loop_radius, clearance);
  out.closing = map[basis.closing];
  // assemble() picks the closing branch itself; keep the transported one.
  for (PathOnCurve* p : {&out.gamma_plus, &out.gamma_minus})
    p->pieces[1] = PathPiece::lasso(out.closing, e[out.closing], loop_radius[out.closing]);
  return out;
}

}  // namespace whitham
