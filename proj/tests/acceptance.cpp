// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "whitham/cli.hpp"
#include "whitham/deformation.hpp"
#include "whitham/error.hpp"
#include "whitham/flow.hpp"
#include "whitham/io.hpp"
#include "whitham/oracle.hpp"

using namespace whitham;

namespace {

const double kTwoPi = 2 * std::numbers::pi;

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string data(const std::string& name) { return std::string(WHITHAM_TEST_DATA) + "/" + name; }

Verdict from_suite(const SuiteResult& s) {
  Verdict v;
  v.pass = s.pass();
  v.detail = std::to_string(s.instances) + " instances, " + std::to_string(s.failures) + " failures, worst " +
             sci(s.worst) + " (tol " + sci(s.tolerance) + ")";
  if (!s.detail.empty()) v.detail += "; " + s.detail;
  return v;
}

// ---- criteria -----------------------------------------------------------------

Verdict bezout_equivalence() {
  Timer timer;
  Verdict v = from_suite(bezout_oracle_suite(1, 500));
  double sec = timer.seconds();
  v.pass = v.pass && sec < 30.0;
  v.detail += ", " + std::string(sec < 30.0 ? "under" : "over") + " 30 s";
  return v;
}

Verdict reality() { return from_suite(reality_suite(2, 200)); }

Verdict membership() { return from_suite(membership_suite(3, 100, 5)); }

Verdict r_reality() {
  Verdict a = from_suite(r_reality_suite(4, 200, 20));
  Verdict b = from_suite(r_confluent_suite(5, 20));
  return {a.pass && b.pass, "relation: " + a.detail + "; confluent continuity: " + b.detail};
}

Verdict kernel() { return from_suite(kernel_suite(6, 100)); }

struct Point {
  const char* file;
  const char* shape;
};

Verdict tangent_dimension() {
  // Case (b) with G quadratic has no genus-1 representative: the common root
  // pair leaves a one-parameter family for four lattice conditions. It is
  // checked at genus 2.
  const Point points[] = {{"good_g0.json", "g0 (a)"},           {"g0_conformal.json", "g0 (e)"},
                          {"g1_generic.json", "g1 (a)"},        {"g1_circle.json", "g1 (b, G linear)"},
                          {"g1_conformal.json", "g1 (e)"},      {"g2_common_pair.json", "g2 (b, G quadratic)"}};
  Verdict v;
  double worst_dpsi = 0.0, min_gap = INFINITY, slowest = 0.0;
  for (const Point& p : points) {
    Timer timer;
    SpectralTriple t = read_triple(data(p.file));
    CycleBasis B = homology_basis(build_curve(t.P));
    TangentBasis tb = tangent_basis(t);
    Eigen::MatrixXd span(coordinate_count(t.g), 2);
    for (int j = 0; j < 2; ++j) {
      SpectralTriple d = tb.vectors[j].as_triple(t.g);
      double n = coordinates(d).norm();
      span.col(j) = coordinates(d) / n;
      SpectralTriple unit = from_coordinates(t.g, span.col(j));
      worst_dpsi = std::max(worst_dpsi, d_psi(t, unit, 1e-5, B).norm());
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> pair(span);
    bool independent = pair.singularValues()[1] > 1e-6;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi_jacobian(t, B, 1e-5));
    const auto& s = svd.singularValues();
    int n = static_cast<int>(s.size()), nullity = 0;
    for (int k = 0; k < n; ++k) nullity += s[k] <= 1e-6 * s[0];
    double gap = s[n - 3] / s[n - 2];
    min_gap = std::min(min_gap, gap);
    double sec = timer.seconds();
    slowest = std::max(slowest, sec);
    bool ok = independent && nullity == 2 && gap >= 1e3 && sec < 60.0;
    if (!ok) {
      v.pass = false;
      v.detail += std::string(p.shape) + ": nullity " + std::to_string(nullity) + ", gap " + sci(gap) + "; ";
    }
  }
  v.pass = v.pass && worst_dpsi <= 1e-6;
  v.detail += std::to_string(std::size(points)) + " points, max |dPsi v|/|v| " + sci(worst_dpsi) +
              ", min singular gap " + sci(min_gap) + ", slowest point " +
              std::to_string(static_cast<int>(std::ceil(slowest))) + " s or less; G quadratic at genus 2";
  return v;
}

Verdict conformal_constraints() {
  Verdict v;
  double q0 = 0.0, res1 = 0.0, res2 = 0.0;
  for (const char* f : {"g0_conformal.json", "g1_conformal.json"}) {
    SpectralTriple t = read_triple(data(f));
    TangentBasis tb = tangent_basis(t);
    if (tb.label.label != Case::E) {
      v.pass = false;
      v.detail += std::string(f) + " is not case (e); ";
    }
    for (const TangentVector& x : tb.vectors) {
      q0 = std::max(q0, std::abs(x.Q[0]));
      res1 = std::max(res1, x.residuals.residue1);
      res2 = std::max(res2, x.residuals.residue2);
    }
  }
  v.pass = v.pass && q0 <= 1e-10 && res1 <= 1e-9 && res2 <= 1e-9;
  v.detail += "max |Q_0| " + sci(q0) + ", residue tangent i=1 (imposed) " + sci(res1) +
              ", i=2 (not imposed) " + sci(res2);
  return v;
}

Verdict genus0_corpus() {
  oracle::Rng rng(8);
  Verdict v;
  int coprime = 0, agree = 0;
  double worst_residue = 0.0;
  for (int k = 0; k < 100; ++k) {
    cplx alpha = rng.annulus(0.05, 0.95);
    cplx x = -0.5 / alpha * (1.0 + alpha * std::conj(alpha));
    Polynomial P({-alpha, 1.0 + std::norm(alpha), -std::conj(alpha)});
    std::array<Polynomial, 2> b;
    for (int i = 0; i < 2; ++i) {
      cplx y = rng.complex();
      b[i] = Polynomial({y, x * y, std::conj(x * y), std::conj(y)}, 3);
      double sc = P.norm() * b[i].norm();
      worst_residue = std::max(worst_residue, std::abs(P[1] * b[i][0] - 2.0 * P[0] * b[i][1]) / sc);
    }
    SpectralTriple t(0, P, b[0], b[1]);
    CaseLabel l = classify(t);
    coprime += l.evidence.d_F == 0 && l.evidence.d_G == 0 && l.label == Case::A;
    // The library's genus-0 plane spans the same b.
    auto e = genus0_differentials(alpha);
    Eigen::MatrixXd M(8, 2);
    Eigen::VectorXd r(8);
    for (int c = 0; c < 4; ++c) {
      for (int j = 0; j < 2; ++j) {
        M(2 * c, j) = e[j][c].real();
        M(2 * c + 1, j) = e[j][c].imag();
      }
      r[2 * c] = b[0][c].real();
      r[2 * c + 1] = b[0][c].imag();
    }
    Eigen::VectorXd y = M.colPivHouseholderQr().solve(r);
    agree += (M * y - r).norm() <= 1e-12 * r.norm();
  }
  // Synthetic non-deformable inputs.
  SpectralTriple a = read_triple(data("good_g0.json"));
  SpectralTriple e0 = read_triple(data("g0_conformal.json"));
  SpectralTriple d(a.g, a.P, a.b1, a.b1 * 2.0);
  SpectralTriple f(e0.g, e0.P, e0.b1, e0.b1 * -3.0);
  int rejected = 0;
  for (const SpectralTriple* s : {&d, &f}) {
    try {
      tangent_basis(*s);
    } catch (const Error& err) {
      rejected += err.kind() == ErrorKind::NotDeformable;
    }
  }
  bool labels = classify(d).label == Case::D && classify(f).label == Case::F;
  v.pass = coprime == 100 && agree == 100 && worst_residue <= 1e-12 && rejected == 2 && labels;
  v.detail = std::to_string(coprime) + "/100 coprime, residue " + sci(worst_residue) + ", closed form matches library " +
             std::to_string(agree) + "/100, (d)/(f) rejected " + std::to_string(rejected) + "/2";
  return v;
}

Verdict period_integration() {
  oracle::Rng rng(9);
  Verdict v;
  double conv = 0.0;
  int pairs = 0;
  while (pairs < 50) {
    int g = rng.integer(0, 3);
    Polynomial P = Polynomial::constant(rng.uniform(0.5, 2.0));
    for (int k = 0; k <= g; ++k) P = P * real_root_pair(rng.annulus(0.15, 0.85));
    HyperellipticCurve c = build_curve(P.with_bound(2 * g + 2));
    CycleBasis B = homology_basis(c);
    std::vector<PathOnCurve> cycles = B.a_cycles;
    cycles.insert(cycles.end(), B.b_cycles.begin(), B.b_cycles.end());
    cycles.push_back(B.gamma_plus);
    cycles.push_back(B.gamma_minus);
    const PathOnCurve& path = cycles[rng.integer(0, static_cast<int>(cycles.size()) - 1)];
    Differential d{c, rng.real_section(g + 3)};
    auto lo = integrate(d, path, 16, false), hi = integrate(d, path, 64, false);
    conv = std::max(conv, std::abs(lo.value - hi.value) / std::abs(hi.value));
    ++pairs;
  }
  double acycle = 0.0;
  for (int k = 0; k < 20; ++k) {
    cplx a = rng.annulus(0.2, 0.7), b = rng.annulus(1.4, 3.0);
    Polynomial P = Polynomial::from_roots(std::vector<cplx>{a, b}, rng.complex() + 2.0);
    HyperellipticCurve c = general_curve(P);
    PathOnCurve loop;
    loop.start = std::polar(1.0, rng.uniform(-3, 3));
    loop.closed = true;
    loop.pieces = {PathPiece::lasso(0, c.branch_points[0]), PathPiece::lasso(1, c.branch_points[1])};
    // dzeta / eta with b = zeta^2; the residue at infinity is 1 / sqrt(leading).
    cplx I = integrate(Differential{c, Polynomial::monomial(2)}, loop).value * std::sqrt(c.leading);
    acycle = std::max(acycle, std::min(std::abs(I - cplx(0, kTwoPi)), std::abs(I + cplx(0, kTwoPi))) / kTwoPi);
  }
  double lattice = 0.0;
  for (const char* f : {"good_g0.json", "g1_generic.json", "g1_circle.json", "g1_conformal.json", "g2_generic.json"}) {
    SpectralTriple t = read_triple(data(f));
    CycleBasis B = homology_basis(build_curve(t.P));
    std::vector<long long> m = psi(t, B).lattice();
    Eigen::VectorXd x = coordinates(t);
    for (int k = 0; k < x.size(); ++k) x[k] += 1e-4 * rng.uniform();
    // Integers are relative to the basis, so it is carried along.
    SpectralTriple start = from_coordinates(t.g, x);
    ProjectionResult r = project_to_Mg(start, m, transport_basis(B, build_curve(start.P)));
    lattice = std::max(lattice, psi(r.triple, r.basis).max_residual(&m));
  }
  v.pass = conv <= 1e-10 && acycle <= 1e-10 && lattice <= 1e-9;
  v.detail = "16 vs 64 points on " + std::to_string(pairs) + " cycles " + sci(conv) + ", A-cycle vs 2 pi i " +
             sci(acycle) + ", lattice residual after projection " + sci(lattice);
  return v;
}

double distance(const SpectralTriple& a, const SpectralTriple& b) {
  return (coordinates(a) - coordinates(b)).norm();
}

Verdict flow_consistency() {
  Verdict v;
  double ret = 0.0, worst_res = 0.0;
  bool validated = true, constant = true;
  double ratio_lo = INFINITY, ratio_hi = 0.0;
  // Generic starts: the other cases are thin strata that a chart leaves at once.
  for (const char* f : {"good_g0.json", "g1_generic.json", "g2_generic.json"}) {
    SpectralTriple t = read_triple(data(f));
    FlowConfig cfg;
    cfg.h = 1e-2;
    cfg.steps = 20;
    CycleBasis B = homology_basis(build_curve(t.P));
    FlowChart chart = make_chart(t, cfg.params, B);
    auto fwd = trace(t, cfg, &chart, 0.0, &B);
    // Recompute the integers in a basis carried sample to sample.
    CycleBasis carried = B;
    for (const PathSample& s : fwd) {
      carried = transport_basis(carried, build_curve(s.triple.P));
      validated = validated && validate(s.triple).pass;
      constant = constant && psi(s.triple, carried).lattice() == chart.lattice;
      worst_res = std::max(worst_res, psi(s.triple, carried).max_residual(&chart.lattice));
    }
    FlowConfig back = cfg;
    back.h = -cfg.h;
    auto bwd = trace(fwd.back().triple, back, &chart, fwd.back().s, &B);
    ret = std::max(ret, distance(bwd.back().triple, t));

    // Forward difference of tau against the predicted rate, at h and h/2.
    for (int k : {0, 10}) {
      const SpectralTriple& x = fwd[k].triple;
      CycleBasis bx = transport_basis(B, build_curve(x.P));
      cplx rate = conformal_type_rate(x, chart_tangent(x, chart).vector);
      double err[2];
      for (int j = 0; j < 2; ++j) {
        double h = j == 0 ? 1e-2 : 5e-3;
        CycleBasis b = bx;
        PathSample s = flow_step(x, fwd[k].s, h, chart, b, cfg);
        err[j] = std::abs((conformal_type(s.triple) - conformal_type(x)) / h - rate);
      }
      ratio_lo = std::min(ratio_lo, err[1] / err[0]);
      ratio_hi = std::max(ratio_hi, err[1] / err[0]);
    }
  }
  bool first_order = ratio_lo >= 0.4 && ratio_hi <= 0.6;
  v.pass = validated && constant && worst_res <= 1e-9 && ret <= 1e-6 && first_order;
  v.detail = std::string(validated ? "all samples validate" : "a sample failed validation") +
             (constant ? ", lattice constant" : ", lattice changed") + ", Psi residual " + sci(worst_res) + ", return error " + sci(ret) +
             ", tau error ratio under halving " + sci(ratio_lo) + ".." + sci(ratio_hi) + " (first order: 0.5)";
  return v;
}

struct GoldenCase {
  const char* name;
  int exit;
  std::vector<std::string> args;
};

Verdict cli_contract() {
  const std::vector<GoldenCase> cases = {
      {"validate_good_g0", 0, {"validate", "good_g0.json"}},
      {"tangent_good_g0", 0, {"tangent", "good_g0.json"}},
      {"classify_g1_circle", 0, {"classify", "g1_circle.json"}},
      {"flow_good_g0_csv", 0, {"flow", "good_g0.json", "--steps", "3", "--format", "csv"}},
      {"plot_g1_circle", 0, {"plot", "g1_circle.json"}},
      {"validate_circle_root", 1, {"validate", "circle_root.json"}},
      {"tangent_circle_root", 1, {"tangent", "circle_root.json"}},
      {"validate_malformed", 2, {"validate", "malformed.json"}},
      {"validate_degree_overflow", 2, {"validate", "degree_overflow.json"}},
      {"tangent_zero_b1", 3, {"tangent", "zero_b1.json"}},
  };
  auto cwd = std::filesystem::current_path();
  std::filesystem::current_path(WHITHAM_TEST_DATA);
  Verdict v;
  int matched = 0;
  bool classes[4] = {false, false, false, false};
  for (const GoldenCase& c : cases) {
    std::string out[2];
    int code[2];
    for (int r = 0; r < 2; ++r) {
      std::vector<std::string> args = c.args;
      args.insert(args.begin(), "whitham");
      std::vector<char*> argv;
      for (auto& a : args) argv.push_back(a.data());
      std::ostringstream o, e;
      code[r] = cli_main(static_cast<int>(argv.size()), argv.data(), o, e);
      out[r] = o.str();
    }
    std::ifstream in(std::string(WHITHAM_GOLDEN) + "/" + c.name + ".out", std::ios::binary);
    std::string golden((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    bool ok = in.good() || in.eof();
    ok = ok && code[0] == c.exit && code[1] == c.exit && out[0] == out[1] && out[0] == golden;
    if (ok) {
      ++matched;
      classes[c.exit] = true;
    } else {
      v.pass = false;
      v.detail += std::string(c.name) + " differs; ";
    }
  }
  std::filesystem::current_path(cwd);
  int nclasses = classes[0] + classes[1] + classes[2] + classes[3];
  v.pass = v.pass && nclasses == 4;
  v.detail += std::to_string(matched) + "/" + std::to_string(cases.size()) +
              " golden reports identical across two runs, exit codes 0-3 covered: " + std::to_string(nclasses) + "/4";
  return v;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"Bezout solver matches the stacked solve", bezout_equivalence},
      {"minimal solution is real", reality},
      {"solution space membership", membership},
      {"R reality relation and confluent continuity", r_reality},
      {"homogeneous tangent operator is injective", kernel},
      {"tangent space has dimension two", tangent_dimension},
      {"conformal constraints", conformal_constraints},
      {"genus-0 corpus", genus0_corpus},
      {"period integration", period_integration},
      {"flow consistency", flow_consistency},
      {"CLI contract", cli_contract},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  std::cout << (std::size(criteria) - failed) << "/" << std::size(criteria) << " criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
