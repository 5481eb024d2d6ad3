#include "whitham/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "whitham/error.hpp"
#include "parallel.hpp"

namespace whitham {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

long long nearest_lattice(cplx v) { return std::llround(v.imag() / kTwoPi); }

double lattice_distance(cplx v, long long m) { return std::abs(v - cplx(0.0, kTwoPi * m)); }

}  // namespace

SpectralTriple::SpectralTriple(int genus, Polynomial P_, Polynomial b1_, Polynomial b2_)
    : g(genus),
      P(P_.with_bound(2 * genus + 2)),
      b1(b1_.with_bound(genus + 3)),
      b2(b2_.with_bound(genus + 3)) {
  if (genus < 0) fail(ErrorKind::Precondition, "negative genus");
}

SpectralTriple axpy(const SpectralTriple& x, double h, const SpectralTriple& v) {
  return SpectralTriple(x.g, x.P + v.P * h, x.b1 + v.b1 * h, x.b2 + v.b2 * h);
}

double coefficient_norm(const SpectralTriple& t) {
  return std::sqrt(std::pow(t.P.norm(), 2) + std::pow(t.b1.norm(), 2) + std::pow(t.b2.norm(), 2));
}

int coordinate_count(int g) { return 4 * g + 11; }

Eigen::VectorXd coordinates(const SpectralTriple& t) {
  Eigen::VectorXd x(coordinate_count(t.g));
  int k = 0;
  for (double v : real_coordinates(t.P, 2 * t.g + 2)) x[k++] = v;
  for (double v : real_coordinates(t.b1, t.g + 3)) x[k++] = v;
  for (double v : real_coordinates(t.b2, t.g + 3)) x[k++] = v;
  return x;
}

SpectralTriple from_coordinates(int g, const Eigen::VectorXd& x) {
  if (x.size() != coordinate_count(g)) fail(ErrorKind::Shape, "coordinate vector has the wrong length");
  const double* p = x.data();
  Polynomial P = from_real_coordinates(p, 2 * g + 2);
  Polynomial b1 = from_real_coordinates(p + 2 * g + 3, g + 3);
  Polynomial b2 = from_real_coordinates(p + 3 * g + 7, g + 3);
  return SpectralTriple(g, P, b1, b2);
}

// ---- Psi --------------------------------------------------------------------

Eigen::VectorXd PsiVector::flatten() const {
  Eigen::VectorXd out(2 * (periods.size() + closings.size() + residues.size()) + 1);
  int k = 0;
  for (const auto* v : {&periods, &closings, &residues})
    for (cplx z : *v) {
      out[k++] = z.real();
      out[k++] = z.imag();
    }
  out[k] = scaling.real();
  return out;
}

std::vector<long long> PsiVector::lattice() const {
  std::vector<long long> m;
  for (cplx z : periods) m.push_back(nearest_lattice(z));
  for (cplx z : closings) m.push_back(nearest_lattice(z));
  return m;
}

Eigen::VectorXd PsiVector::residual(const std::vector<long long>* lat) const {
  std::vector<long long> m = lat ? *lat : lattice();
  if (m.size() != periods.size() + closings.size())
    fail(ErrorKind::Shape, "lattice target count does not match Psi");
  Eigen::VectorXd r = flatten();
  int k = 0;
  for (long long mi : m) {
    r[2 * k + 1] -= kTwoPi * mi;
    ++k;
  }
  r[r.size() - 1] -= 1.0;
  return r;
}

double PsiVector::max_residual(const std::vector<long long>* lat) const {
  return residual(lat).cwiseAbs().maxCoeff();
}

cplx scaling_value(const Polynomial& P, const HyperellipticCurve& curve) {
  double prod = 1.0;
  for (const BranchPair& bp : curve.branch_pairs) prod *= std::norm(1.0 - bp.inner);
  return prod / P(1.0);
}

PsiVector psi(const SpectralTriple& t, const CycleBasis& basis, int quad_order) {
  HyperellipticCurve curve = build_curve(t.P);
  if (curve.genus != t.g) fail(ErrorKind::Shape, "curve genus does not match the triple");
  PsiVector out;
  out.g = t.g;
  std::vector<const PathOnCurve*> paths;
  for (const auto& p : basis.a_cycles) paths.push_back(&p);
  for (const auto& p : basis.b_cycles) paths.push_back(&p);
  paths.push_back(&basis.gamma_plus);
  paths.push_back(&basis.gamma_minus);
  if (static_cast<int>(paths.size()) != 2 * t.g + 2)
    fail(ErrorKind::Shape, "cycle basis does not match the genus");
  std::vector<MonomialIntegrals> mi;
  for (const PathOnCurve* p : paths)
    mi.push_back(integrate_monomials(curve, *p, t.g + 3, quad_order, true));
  int ncyc = 2 * t.g;
  std::vector<double> perr, pmag, cerr, cmag;
  for (int i = 1; i <= 2; ++i) {
    const Polynomial& b = t.b(i);
    for (int j = 0; j < ncyc; ++j) {
      out.periods.push_back(mi[j].contract(b));
      perr.push_back(mi[j].contract_error(b));
      pmag.push_back(mi[j].contract_magnitude(b));
    }
    for (int j = ncyc; j < ncyc + 2; ++j) {
      out.closings.push_back(mi[j].contract(b));
      cerr.push_back(mi[j].contract_error(b));
      cmag.push_back(mi[j].contract_magnitude(b));
    }
  }
  out.errors = perr;
  out.errors.insert(out.errors.end(), cerr.begin(), cerr.end());
  out.magnitudes = pmag;
  out.magnitudes.insert(out.magnitudes.end(), cmag.begin(), cmag.end());
  out.residues = {residue_condition(t.P, t.b1), residue_condition(t.P, t.b2)};
  out.scaling = scaling_value(t.P, curve);
  return out;
}

PsiVector psi(const SpectralTriple& t, int quad_order) {
  return psi(t, homology_basis(build_curve(t.P)), quad_order);
}

PsiVector psi_transported(const SpectralTriple& t, const CycleBasis& basis, int quad_order) {
  HyperellipticCurve curve = build_curve(t.P);
  return psi(t, transport_basis(basis, curve), quad_order);
}

Eigen::VectorXd d_psi(const SpectralTriple& t, const SpectralTriple& v, double h,
                      const CycleBasis& basis, int quad_order) {
  if (!(h > 0)) fail(ErrorKind::Precondition, "difference step must be positive");
  PsiVector plus, minus;
  try {
    plus = psi_transported(axpy(t, h, v), basis, quad_order);
    minus = psi_transported(axpy(t, -h, v), basis, quad_order);
  } catch (const Error& e) {
    fail(ErrorKind::StepSize, std::string("difference step leaves the admissible set: ") + e.what());
  }
  return (plus.flatten() - minus.flatten()) / (2 * h);
}

Eigen::MatrixXd psi_jacobian(const SpectralTriple& t, const CycleBasis& basis, double h,
                             int quad_order) {
  Eigen::VectorXd x = coordinates(t);
  int n = static_cast<int>(x.size());
  Eigen::MatrixXd J(8 * t.g + 13, n);
  parallel_for(n, [&](int k) {
    double step = h * std::max(1.0, std::abs(x[k]));
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[k] = 1.0;
    J.col(k) = d_psi(t, from_coordinates(t.g, e), step, basis, quad_order);
  });
  return J;
}

// ---- normalization and principal parts ---------------------------------------

SpectralTriple normalize(const SpectralTriple& t) {
  HyperellipticCurve curve = build_curve(t.P);
  cplx s = scaling_value(t.P, curve);
  double lambda2 = 1.0 / s.real();
  if (!(lambda2 > 0) || std::abs(s.imag()) > 1e-8 * std::abs(s))
    fail(ErrorKind::RealityViolation, "P is a negative multiple of the product form");
  double lambda = std::sqrt(lambda2);
  return SpectralTriple(t.g, t.P * (1.0 / lambda2), t.b1 * (1.0 / lambda), t.b2 * (1.0 / lambda));
}

cplx principal_part(const Polynomial& P, const Polynomial& b) {
  if (std::abs(P[0]) > 1e-14 * std::max(1.0, P.norm())) return b[0] / std::sqrt(P[0]);
  return b[1] / std::sqrt(P[1]);
}

double principal_determinant(const SpectralTriple& t) {
  cplx z1 = principal_part(t.P, t.b1), z2 = principal_part(t.P, t.b2);
  double n = std::abs(z1) * std::abs(z2);
  if (n == 0.0 || !std::isfinite(n)) return 0.0;
  return (std::conj(z1) * z2).imag() / n;
}

// ---- validation --------------------------------------------------------------

const CheckEntry* ValidationReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

namespace {

CheckEntry upper(std::string name, double r, double tol) {
  CheckEntry e;
  e.name = std::move(name);
  e.residual = r;
  e.tolerance = tol;
  e.pass = r <= tol;
  return e;
}

CheckEntry lower(std::string name, double r, double tol) {
  CheckEntry e;
  e.name = std::move(name);
  e.residual = r;
  e.tolerance = tol;
  e.margin = true;
  e.pass = r > tol;
  return e;
}

CheckEntry failed(std::string name, std::string note) {
  CheckEntry e;
  e.name = std::move(name);
  e.residual = INFINITY;
  e.pass = false;
  e.note = std::move(note);
  return e;
}

}  // namespace

ValidationReport validate(const SpectralTriple& t, const ToleranceProfile& tol,
                          const CycleBasis* basis) {
  ValidationReport rep;
  auto& E = rep.entries;
  int g = t.g;
  double Pscale = std::max(1.0, t.P.norm());

  E.push_back(upper("real_curve", is_real_section(t.P, 2 * g + 2, 0.0).witness.max_defect / Pscale,
                    tol.alg));

  std::vector<cplx> z;
  bool have_roots = !t.P.is_zero();
  if (have_roots) {
    try {
      z = raw_roots(t.P);
    } catch (const Error& e) {
      have_roots = false;
    }
  }
  if (!have_roots) {
    E.push_back(failed("no_unit_circle_roots", "roots of P unavailable"));
    E.push_back(failed("simple_roots", "roots of P unavailable"));
  } else {
    double circ = INFINITY, sep = INFINITY;
    for (cplx a : z) circ = std::min(circ, std::abs(std::abs(a) - 1.0));
    for (std::size_t i = 0; i < z.size(); ++i)
      for (std::size_t j = i + 1; j < z.size(); ++j)
        sep = std::min(sep, std::abs(z[i] - z[j]) / std::max({1.0, std::abs(z[i]), std::abs(z[j])}));
    // At most one root at infinity.
    if (t.P.degree() < 2 * g + 1) sep = 0.0;
    E.push_back(lower("no_unit_circle_roots", circ, tol.alg));
    CheckEntry s = lower("simple_roots", sep, tol.alg);
    if (t.P.degree() < 2 * g + 1) s.note = "multiple root at infinity";
    E.push_back(s);
  }

  for (int i = 1; i <= 2; ++i) {
    const Polynomial& b = t.b(i);
    double bs = std::max(1.0, b.norm());
    std::string tag = "b" + std::to_string(i);
    E.push_back(upper(tag + "_real", is_real_section(b, g + 3, 0.0).witness.max_defect / bs, tol.alg));
    E.push_back(lower(tag + "_order_at_zero", std::max(std::abs(b[0]), std::abs(b[1])) / bs, tol.alg));
  }
  for (int i = 1; i <= 2; ++i) {
    double sc = std::max(1.0, Pscale * std::max(1.0, t.b(i).norm()));
    E.push_back(upper("residue_b" + std::to_string(i), std::abs(residue_condition(t.P, t.b(i))) / sc,
                      tol.alg));
  }
  E.push_back(lower("independence", std::abs(principal_determinant(t)), tol.det));

  bool curve_ok = std::all_of(E.begin(), E.begin() + 3, [](const CheckEntry& e) { return e.pass; });
  std::vector<std::string> names;
  for (int i = 1; i <= 2; ++i) {
    for (int k = 1; k <= g; ++k) names.push_back("period_A" + std::to_string(k) + "_b" + std::to_string(i));
    for (int k = 1; k <= g; ++k) names.push_back("period_B" + std::to_string(k) + "_b" + std::to_string(i));
  }
  for (int i = 1; i <= 2; ++i) {
    names.push_back("closing_plus_b" + std::to_string(i));
    names.push_back("closing_minus_b" + std::to_string(i));
  }
  if (!curve_ok) {
    for (const auto& n : names) E.push_back(failed(n, "curve conditions fail; not integrated"));
    E.push_back(failed("scaling", "curve conditions fail"));
  } else {
    try {
      HyperellipticCurve curve = build_curve(t.P);
      CycleBasis B = basis ? transport_basis(*basis, curve) : homology_basis(curve);
      PsiVector v = psi(t, B, tol.quad_order);
      std::vector<cplx> vals = v.periods;
      vals.insert(vals.end(), v.closings.begin(), v.closings.end());
      for (std::size_t k = 0; k < vals.size(); ++k) {
        long long m = nearest_lattice(vals[k]);
        CheckEntry e = upper(names[k], lattice_distance(vals[k], m), tol.integral);
        e.lattice = m;
        E.push_back(e);
      }
      E.push_back(upper("scaling", std::abs(v.scaling - 1.0), tol.alg));
    } catch (const Error& err) {
      for (const auto& n : names) E.push_back(failed(n, err.what()));
      E.push_back(failed("scaling", err.what()));
    }
  }
  rep.pass = std::all_of(E.begin(), E.end(), [](const CheckEntry& e) { return e.pass; });
  return rep;
}

}  // namespace whitham
