#include "whitham/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "whitham/error.hpp"

namespace whitham {

namespace {

// Non-finite values have no JSON number form; they are written as strings.
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number_from_json(const Json& j) {
  if (!j.is_number()) fail(ErrorKind::Parse, "expected a number, got " + j.dump());
  double v = j.get<double>();
  if (!std::isfinite(v)) fail(ErrorKind::Parse, "non-finite coefficient");
  return v;
}

}  // namespace

Json to_json(cplx z) { return Json::array({num(z.real()), num(z.imag())}); }

Json to_json(const Polynomial& p) {
  Json a = Json::array();
  for (int i = 0; i <= std::max(p.degree(), 0); ++i) a.push_back(to_json(p[i]));
  return a;
}

Json to_json(const SpectralTriple& t) {
  Json j;
  j["genus"] = t.g;
  j["P"] = to_json(t.P);
  j["b1"] = to_json(t.b1);
  j["b2"] = to_json(t.b2);
  return j;
}

Json to_json(const CheckEntry& e) {
  Json j;
  j["name"] = e.name;
  j["pass"] = e.pass;
  j["residual"] = num(e.residual);
  j["tolerance"] = num(e.tolerance);
  j["kind"] = e.margin ? "margin" : "residual";
  if (e.lattice) j["lattice"] = *e.lattice;
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

Json to_json(const ValidationReport& r) {
  Json j;
  j["pass"] = r.pass;
  Json entries = Json::array();
  for (const CheckEntry& e : r.entries) entries.push_back(to_json(e));
  j["entries"] = entries;
  return j;
}

Json to_json(const PsiVector& p) {
  Json j;
  j["genus"] = p.g;
  auto arr = [](const std::vector<cplx>& v) {
    Json a = Json::array();
    for (cplx z : v) a.push_back(to_json(z));
    return a;
  };
  j["periods"] = arr(p.periods);
  j["closings"] = arr(p.closings);
  j["residues"] = arr(p.residues);
  j["scaling"] = to_json(p.scaling);
  j["lattice"] = p.lattice();
  j["max_residual"] = num(p.max_residual());
  return j;
}

Json to_json(const FactorStructure& f) {
  Json j;
  j["d_F"] = f.d_F;
  j["d_1"] = f.d_1;
  j["d_2"] = f.d_2;
  j["d_G"] = f.d_G;
  j["F"] = to_json(f.F);
  j["G"] = to_json(f.G);
  j["borderline"] = f.borderline;
  j["reconstruction_residual"] = num(f.reconstruction_residual);
  return j;
}

Json to_json(const CaseLabel& l) {
  Json j;
  j["case"] = to_string(l.label);
  j["conformal"] = l.conformal;
  j["deformable"] = l.deformable();
  j["borderline"] = l.borderline;
  j["evidence"] = to_json(l.evidence);
  j["warnings"] = l.warnings;
  return j;
}

Json to_json(const TangentVector& v) {
  Json j;
  j["P_dot"] = to_json(v.P_dot);
  j["b1_dot"] = to_json(v.b1_dot);
  j["b2_dot"] = to_json(v.b2_dot);
  Json params;
  params["Q_tilde"] = to_json(v.params.Qt);
  params["r"] = num(v.params.r);
  j["params"] = params;
  j["Q"] = to_json(v.Q);
  j["c1"] = to_json(v.c1);
  j["c2"] = to_json(v.c2);
  Json res;
  res["empdi1"] = num(v.residuals.empdi1);
  res["empdi2"] = num(v.residuals.empdi2);
  res["residue1"] = num(v.residuals.residue1);
  res["residue2"] = num(v.residuals.residue2);
  res["scaling"] = num(v.residuals.scaling);
  res["q_equation"] = num(v.residuals.q_equation);
  res["reconcile"] = num(v.residuals.reconcile);
  j["residuals"] = res;
  j["ill_conditioned"] = v.ill_conditioned;
  return j;
}

Json to_json(const PathSample& s) {
  Json j;
  j["t"] = num(s.s);
  j["triple"] = to_json(s.triple);
  j["psi_residual"] = num(s.psi_residual);
  j["case"] = to_string(s.label.label);
  j["tau"] = s.tau ? to_json(*s.tau) : Json(nullptr);
  j["lattice"] = s.lattice;
  j["newton_iterations"] = s.newton_iterations;
  return j;
}

cplx complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) fail(ErrorKind::Parse, "complex number must be [re, im]");
  return {number_from_json(j[0]), number_from_json(j[1])};
}

Polynomial polynomial_from_json(const Json& j, int bound) {
  if (!j.is_array()) fail(ErrorKind::Parse, "polynomial must be an array of [re, im] pairs");
  std::vector<cplx> c;
  for (const Json& e : j) c.push_back(complex_from_json(e));
  Polynomial p(c);
  if (p.degree() > bound)
    fail(ErrorKind::Parse, "polynomial degree " + std::to_string(p.degree()) + " exceeds bound " +
                               std::to_string(bound));
  return p.with_bound(bound);
}

SpectralTriple triple_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::Parse, "triple must be a JSON object");
  for (const char* key : {"genus", "P", "b1", "b2"})
    if (!j.contains(key)) fail(ErrorKind::Parse, std::string("missing field \"") + key + "\"");
  if (!j["genus"].is_number_integer()) fail(ErrorKind::Parse, "genus must be an integer");
  int g = j["genus"].get<int>();
  if (g < 0) fail(ErrorKind::Parse, "genus must be nonnegative");
  return SpectralTriple(g, polynomial_from_json(j["P"], 2 * g + 2), polynomial_from_json(j["b1"], g + 3),
                        polynomial_from_json(j["b2"], g + 3));
}

SpectralTriple read_triple(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parse, "cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    fail(ErrorKind::Parse, path + ": " + e.what());
  }
  return triple_from_json(j);
}

void write_triple(const std::string& path, const SpectralTriple& t) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Parse, "cannot write " + path);
  out << dump(to_json(t));
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace whitham
