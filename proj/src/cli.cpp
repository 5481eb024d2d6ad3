#include "whitham/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "parallel.hpp"
#include "whitham/bezout.hpp"
#include "whitham/deformation.hpp"
#include "whitham/flow.hpp"
#include "whitham/io.hpp"
#include "whitham/oracle.hpp"
#include "whitham/seeds.hpp"

namespace whitham {

namespace fs = std::filesystem;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Usage:
      return kExitUsage;
    case ErrorKind::CurveViolation:
    case ErrorKind::RealityViolation:
    case ErrorKind::NotDeformable:
      return kExitFailed;
    default:
      return kExitNumerical;
  }
}

namespace {

struct Outcome {
  int code = kExitPass;
  Json report;
  std::string text;   // set when the format is not JSON
  std::string error;  // message for stderr
};

Json error_json(const std::string& kind, const std::string& message) {
  Json j;
  j["error"] = kind;
  j["message"] = message;
  return j;
}

// Shortest representation that reads back to the same double.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string format_of(const CliConfig& cfg, const char* fallback) {
  return cfg.format ? *cfg.format : fallback;
}

void require_format(const CliConfig& cfg, const std::string& fmt, std::initializer_list<const char*> ok) {
  for (const char* f : ok)
    if (fmt == f) return;
  fail(ErrorKind::Usage, "format " + fmt + " is not available for " + cfg.command);
}

// ---- svg ------------------------------------------------------------------------

class Canvas {
 public:
  explicit Canvas(double radius) : radius_(radius) {}

  void circle(cplx z, double r, const std::string& style) {
    auto [x, y] = map(z);
    body_ << "  <circle cx=\"" << fixed(x) << "\" cy=\"" << fixed(y) << "\" r=\"" << fixed(r) << "\" "
          << style << "/>\n";
  }
  void line(cplx a, cplx b, const std::string& style) {
    auto [x1, y1] = map(a);
    auto [x2, y2] = map(b);
    body_ << "  <line x1=\"" << fixed(x1) << "\" y1=\"" << fixed(y1) << "\" x2=\"" << fixed(x2)
          << "\" y2=\"" << fixed(y2) << "\" " << style << "/>\n";
  }
  void cross(cplx z, double r, const std::string& stroke) {
    double d = r / scale();
    line(z + cplx(-d, -d), z + cplx(d, d), "stroke=\"" + stroke + "\" stroke-width=\"1.5\"");
    line(z + cplx(-d, d), z + cplx(d, -d), "stroke=\"" + stroke + "\" stroke-width=\"1.5\"");
  }
  void plus(cplx z, double r, const std::string& stroke) {
    double d = r / scale();
    line(z - d, z + d, "stroke=\"" + stroke + "\" stroke-width=\"1.5\"");
    line(z - cplx(0, d), z + cplx(0, d), "stroke=\"" + stroke + "\" stroke-width=\"1.5\"");
  }
  void text(double x, double y, const std::string& s) {
    body_ << "  <text x=\"" << fixed(x) << "\" y=\"" << fixed(y)
          << "\" font-family=\"monospace\" font-size=\"12\">" << s << "</text>\n";
  }
  // Points beyond the frame are drawn on its edge.
  cplx clip(cplx z) const {
    double lim = 0.97 * radius_;
    return std::abs(z) > lim ? z * (lim / std::abs(z)) : z;
  }
  bool clipped(cplx z) const { return std::abs(z) > 0.97 * radius_; }
  double length(double d) const { return d * scale(); }

  std::string str() const {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" viewBox=\"0 0 " << kSize << " " << kSize << "\">\n"
      << "  <rect width=\"" << kSize << "\" height=\"" << kSize << "\" fill=\"white\"/>\n";
    s << body_.str() << "</svg>\n";
    return s.str();
  }

  static constexpr int kSize = 520;

 private:
  double scale() const { return (kSize / 2.0 - 30.0) / radius_; }
  std::pair<double, double> map(cplx z) const {
    return {kSize / 2.0 + scale() * z.real(), kSize / 2.0 - scale() * z.imag()};
  }
  double radius_;
  std::ostringstream body_;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::vector<cplx> finite_roots(const Polynomial& p) {
  if (p.is_zero()) return {};
  return expand_roots(roots(p));
}

double frame_radius(const std::vector<std::vector<cplx>>& sets) {
  double m = 1.0;
  for (const auto& s : sets)
    for (cplx z : s) m = std::max(m, std::abs(z));
  return std::min(std::max(1.25, 1.1 * m), 4.0);
}

void draw_axes(Canvas& c, double radius) {
  c.line(cplx(-radius, 0), cplx(radius, 0), "stroke=\"#dddddd\"");
  c.line(cplx(0, -radius), cplx(0, radius), "stroke=\"#dddddd\"");
  c.circle(0.0, c.length(1.0), "fill=\"none\" stroke=\"#444444\"");
}

// Branch points with the partner under zeta -> 1/conj(zeta) in the same color.
void draw_branch_points(Canvas& c, const std::vector<cplx>& bp, double r, double opacity) {
  std::vector<bool> used(bp.size(), false);
  int color = 0;
  char op[32];
  std::snprintf(op, sizeof op, "%.2f", opacity);
  for (std::size_t i = 0; i < bp.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::size_t partner = i;
    if (bp[i] != 0.0) {
      cplx target = 1.0 / std::conj(bp[i]);
      double best = INFINITY;
      for (std::size_t j = 0; j < bp.size(); ++j)
        if (!used[j] && std::abs(bp[j] - target) < best) best = std::abs(bp[j] - target), partner = j;
      if (best > 1e-4 * std::max(1.0, std::abs(target))) partner = i;
    }
    std::string col = kPalette[color++ % 8];
    std::string fill = "fill=\"" + col + "\" fill-opacity=\"" + op + "\"";
    if (partner != i) {
      used[partner] = true;
      if (opacity >= 1.0)
        c.line(c.clip(bp[i]), c.clip(bp[partner]),
               "stroke=\"" + col + "\" stroke-dasharray=\"4 3\" stroke-opacity=\"0.6\"");
      for (cplx z : {bp[i], bp[partner]})
        c.circle(c.clip(z), r, c.clipped(z) ? "fill=\"none\" stroke=\"" + col + "\"" : fill);
    } else {
      c.circle(c.clip(bp[i]), r, c.clipped(bp[i]) ? "fill=\"none\" stroke=\"" + col + "\"" : fill);
    }
  }
}

std::string plot_svg(const SpectralTriple& t) {
  std::vector<cplx> bp = finite_roots(t.P), r1 = finite_roots(t.b1), r2 = finite_roots(t.b2);
  double radius = frame_radius({bp, r1, r2});
  Canvas c(radius);
  draw_axes(c, radius);
  draw_branch_points(c, bp, 5.0, 1.0);
  for (cplx z : r1) c.cross(c.clip(z), 6.0, "#000000");
  for (cplx z : r2) c.plus(c.clip(z), 7.0, "#7f7f7f");
  c.text(10, 18, "genus " + std::to_string(t.g) + "  branch points: dots, paired by color");
  c.text(10, 34, "roots of b1: x   roots of b2: +");
  c.text(10, Canvas::kSize - 10,
         "at infinity: P " + std::to_string(t.P.bound() - t.P.degree()) + ", b1 " +
             std::to_string(t.b1.bound() - t.b1.degree()) + ", b2 " +
             std::to_string(t.b2.bound() - t.b2.degree()));
  return c.str();
}

// Branch points of every sample, fading from the start to the end of the path.
std::string locus_svg(const std::vector<PathSample>& samples) {
  std::vector<std::vector<cplx>> sets;
  for (const auto& s : samples) sets.push_back(finite_roots(s.triple.P));
  double radius = frame_radius(sets);
  Canvas c(radius);
  draw_axes(c, radius);
  int n = static_cast<int>(samples.size());
  for (int k = 0; k < n; ++k) {
    double opacity = k + 1 == n ? 1.0 : 0.15 + 0.6 * k / std::max(1, n - 1);
    draw_branch_points(c, sets[k], k + 1 == n ? 5.0 : 2.0, opacity);
  }
  const SpectralTriple& last = samples.back().triple;
  for (cplx z : finite_roots(last.b1)) c.cross(c.clip(z), 6.0, "#000000");
  for (cplx z : finite_roots(last.b2)) c.plus(c.clip(z), 7.0, "#7f7f7f");
  c.text(10, 18, "branch point locus over " + std::to_string(n) + " samples");
  c.text(10, 34, "last sample: roots of b1 x, roots of b2 +");
  return c.str();
}

// ---- commands -------------------------------------------------------------------

Outcome cmd_validate(const CliConfig& cfg, const SpectralTriple& t, const std::string& fmt) {
  ValidationReport r = validate(t, cfg.tol);
  Outcome o;
  o.code = r.pass ? kExitPass : kExitFailed;
  o.report = to_json(r);
  if (fmt == "csv") {
    std::ostringstream s;
    s << "name,pass,residual,tolerance,kind,lattice\n";
    for (const CheckEntry& e : r.entries)
      s << e.name << "," << (e.pass ? "true" : "false") << "," << num(e.residual) << ","
        << num(e.tolerance) << "," << (e.margin ? "margin" : "residual") << ","
        << (e.lattice ? std::to_string(*e.lattice) : "") << "\n";
    o.text = s.str();
  }
  return o;
}

Outcome cmd_classify(const CliConfig& cfg, const SpectralTriple& t) {
  Outcome o;
  o.report = to_json(classify(t, 1e-10, cfg.cluster_radius));
  return o;
}

Outcome cmd_tangent(const SpectralTriple& t) {
  TangentBasis tb = tangent_basis(t);
  Outcome o;
  o.report["case"] = to_string(tb.label.label);
  o.report["g_linear"] = tb.label.g_linear();
  o.report["gram_determinant"] = tb.gram_determinant;
  Json vs = Json::array();
  double worst = 0.0;
  for (const TangentVector& v : tb.vectors) {
    vs.push_back(to_json(v));
    worst = std::max(worst, v.residuals.max());
  }
  o.report["vectors"] = vs;
  o.report["max_residual"] = worst;
  o.report["warnings"] = tb.label.warnings;
  return o;
}

Outcome cmd_flow(const CliConfig& cfg, const SpectralTriple& t, const std::string& fmt) {
  ValidationReport start = validate(t, cfg.tol);
  if (!start.pass) {
    Outcome o;
    o.code = kExitFailed;
    o.report = to_json(start);
    return o;
  }
  FlowConfig fc;
  fc.h = cfg.dt;
  fc.steps = cfg.steps;
  fc.params = cfg.params;
  fc.quad_order = cfg.tol.quad_order;
  std::vector<PathSample> samples = trace(t, fc);
  Outcome o;
  std::ostringstream s;
  if (fmt == "json") {
    for (const PathSample& p : samples) s << to_json(p).dump() << "\n";
  } else if (fmt == "csv") {
    s << "t,tau_re,tau_im,residual\n";
    for (const PathSample& p : samples)
      s << num(p.s) << "," << (p.tau ? num(p.tau->real()) : "") << ","
        << (p.tau ? num(p.tau->imag()) : "") << "," << num(p.psi_residual) << "\n";
  } else {
    s << locus_svg(samples);
  }
  o.text = s.str();
  return o;
}

Outcome cmd_plot(const SpectralTriple& t, const std::string& fmt) {
  Outcome o;
  auto arr = [](const std::vector<cplx>& v) {
    Json a = Json::array();
    for (cplx z : v) a.push_back(to_json(z));
    return a;
  };
  o.report["branch_points"] = arr(finite_roots(t.P));
  o.report["b1_roots"] = arr(finite_roots(t.b1));
  o.report["b2_roots"] = arr(finite_roots(t.b2));
  if (fmt == "svg") o.text = plot_svg(t);
  return o;
}

Outcome cmd_oracle(const CliConfig& cfg, std::ostream& err) {
  Outcome o;
  if (!cfg.input.empty()) {
    // Ad-hoc minimal solution of A X - B Y = C.
    std::ifstream in(cfg.input);
    if (!in) fail(ErrorKind::Parse, "cannot open " + cfg.input);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      fail(ErrorKind::Parse, cfg.input + ": " + e.what());
    }
    if (!j.is_object()) fail(ErrorKind::Parse, "expected an object with A, B, C");
    for (const char* key : {"A", "B", "C"})
      if (!j.contains(key)) fail(ErrorKind::Parse, std::string("missing field \"") + key + "\"");
    Polynomial A = polynomial_from_json(j["A"], static_cast<int>(j["A"].size())),
               B = polynomial_from_json(j["B"], static_cast<int>(j["B"].size())),
               C = polynomial_from_json(j["C"], static_cast<int>(j["C"].size()));
    BezoutOptions opt;
    opt.gcd_tol = cfg.cluster_radius;
    BezoutSolution s = minimal_solution(A, B, C, opt);
    o.report["X"] = to_json(s.X);
    o.report["Y"] = to_json(s.Y);
    o.report["D"] = to_json(s.D);
    o.report["residual"] = s.residual;
    o.report["condition"] = s.condition;
    o.report["ill_conditioned"] = s.ill_conditioned;
    return o;
  }
  err << "oracle seed " << cfg.seed << "\n";
  std::vector<SuiteResult> suites = run_oracle_suites(cfg.seed);
  bool pass = true;
  Json arr = Json::array();
  for (const SuiteResult& s : suites) {
    Json j;
    j["name"] = s.name;
    j["seed"] = s.seed;
    j["instances"] = s.instances;
    j["failures"] = s.failures;
    j["worst"] = s.worst;
    j["tolerance"] = s.tolerance;
    j["pass"] = s.pass();
    if (!s.detail.empty()) j["detail"] = s.detail;
    arr.push_back(j);
    pass = pass && s.pass();
  }
  o.report["seed"] = cfg.seed;
  o.report["pass"] = pass;
  o.report["suites"] = arr;
  o.code = pass ? kExitPass : kExitFailed;
  return o;
}

SeedShape parse_shape(const std::string& s) {
  for (SeedShape k : {SeedShape::Generic, SeedShape::CircleRoot, SeedShape::CommonPair, SeedShape::Conformal})
    if (s == to_string(k)) return k;
  fail(ErrorKind::Usage, "unknown shape " + s);
}

Outcome cmd_seed(const CliConfig& cfg, std::ostream& err) {
  SeedOptions opt;
  opt.genus = cfg.genus;
  opt.shape = parse_shape(cfg.shape);
  opt.seed = cfg.seed;
  opt.lattice_scale = cfg.lattice_scale;
  opt.max_attempts = cfg.max_attempts;
  opt.quad_order = cfg.tol.quad_order;
  SeedResult r = lattice_seed(opt);
  err << "case " << to_string(r.label.label) << ", attempts " << r.attempts << ", residual "
      << num(r.residual) << ", lattice";
  for (long long m : r.lattice) err << " " << m;
  err << "\n";
  Outcome o;
  o.report = to_json(r.triple);
  return o;
}

// Runs a per-triple command with errors folded into the outcome.
template <class F>
Outcome guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    Outcome o;
    o.code = exit_code(e.kind());
    o.report = error_json(to_string(e.kind()), e.what());
    o.error = e.what();
    return o;
  } catch (const std::exception& e) {
    Outcome o;
    o.code = kExitNumerical;
    o.report = error_json("Internal", e.what());
    o.error = e.what();
    return o;
  }
}

Outcome on_triple(const CliConfig& cfg, const SpectralTriple& t, const std::string& fmt) {
  if (cfg.command == "validate") return cmd_validate(cfg, t, fmt);
  if (cfg.command == "classify") return cmd_classify(cfg, t);
  if (cfg.command == "tangent") return cmd_tangent(t);
  if (cfg.command == "flow") return cmd_flow(cfg, t, fmt);
  return cmd_plot(t, fmt);
}

Outcome on_directory(const CliConfig& cfg) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(cfg.input))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Outcome> results(files.size());
  parallel_for(static_cast<int>(files.size()), [&](int k) {
    results[k] = guarded([&] { return on_triple(cfg, read_triple(files[k].string()), "json"); });
  });
  Outcome o;
  Json arr = Json::array();
  for (std::size_t k = 0; k < files.size(); ++k) {
    Json j;
    j["file"] = files[k].filename().string();
    j["exit"] = results[k].code;
    j["report"] = results[k].report;
    arr.push_back(j);
    o.code = std::max(o.code, results[k].code);
  }
  o.report["files"] = arr;
  return o;
}

Outcome dispatch(const CliConfig& cfg, std::ostream& err) {
  const std::string& c = cfg.command;
  if (!(cfg.tol.alg > 0 && cfg.tol.integral > 0 && cfg.tol.det > 0 && cfg.tol.quad_order > 0 &&
        cfg.cluster_radius > 0))
    fail(ErrorKind::Usage, "tolerances and the quadrature order must be positive");
  if (c == "oracle") {
    require_format(cfg, format_of(cfg, "json"), {"json"});
    return cmd_oracle(cfg, err);
  }
  if (c == "seed") {
    require_format(cfg, format_of(cfg, "json"), {"json"});
    return cmd_seed(cfg, err);
  }
  std::string fmt;
  if (c == "validate") {
    fmt = format_of(cfg, "json");
    require_format(cfg, fmt, {"json", "csv"});
  } else if (c == "classify" || c == "tangent") {
    fmt = format_of(cfg, "json");
    require_format(cfg, fmt, {"json"});
  } else if (c == "flow") {
    fmt = format_of(cfg, "json");
    require_format(cfg, fmt, {"json", "csv", "svg"});
    if (cfg.steps < 0 || !(cfg.dt != 0.0) || !std::isfinite(cfg.dt))
      fail(ErrorKind::Usage, "flow needs --steps >= 0 and a finite nonzero --dt");
  } else if (c == "plot") {
    fmt = format_of(cfg, "svg");
    require_format(cfg, fmt, {"svg", "json"});
  } else {
    fail(ErrorKind::Usage, "unknown command " + c);
  }
  if (cfg.input.empty()) fail(ErrorKind::Usage, c + " needs an input file");
  if (fs::is_directory(cfg.input)) {
    if (fmt != "json" || c == "flow" || c == "plot")
      fail(ErrorKind::Usage, "directory input is available for validate, classify and tangent with JSON output");
    return on_directory(cfg);
  }
  return on_triple(cfg, read_triple(cfg.input), fmt);
}

}  // namespace

int run(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  Outcome o = guarded([&] { return dispatch(cfg, err); });
  if (!o.error.empty()) err << "error: " << o.error << "\n";
  std::string body = o.text.empty() ? dump(o.report) : o.text;
  if (cfg.out.empty()) {
    out << body;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << cfg.out << "\n";
      return kExitUsage;
    }
    f << body;
  }
  return o.code;
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral triples of harmonic tori: validation, classification, tangents and flows",
               "whitham"};
  app.require_subcommand(1);
  CliConfig cfg;
  std::string format;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol-alg", cfg.tol.alg, "tolerance of algebraic checks")->check(CLI::PositiveNumber);
    sub->add_option("--tol-int", cfg.tol.integral, "tolerance of period and closing lattice checks")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol-det", cfg.tol.det, "independence margin of the principal parts")
        ->check(CLI::PositiveNumber);
    sub->add_option("--quad-order", cfg.tol.quad_order, "Gauss points per path piece")->check(CLI::Range(2, 1024));
    sub->add_option("--cluster-radius", cfg.cluster_radius, "relative radius for matching common roots")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "write the report here instead of stdout");
    sub->add_option("--format", format, "json, csv or svg")->check(CLI::IsMember({"json", "csv", "svg"}));
  };

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"validate", "check a triple against all conditions (exit 1 if any fails)"},
      {"classify", "report the case label and the common-root evidence"},
      {"tangent", "compute the two tangent vectors at a point"},
      {"flow", "trace a deformation path by predictor and projection"},
      {"plot", "draw branch points and roots of b1, b2"},
  };
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("input", cfg.input, "triple JSON file or directory")->required();
    add_common(sub);
    if (std::string(s.name) == "flow") {
      sub->add_option("--steps", cfg.steps, "number of steps")->check(CLI::NonNegativeNumber);
      sub->add_option("--dt", cfg.dt, "step in the path parameter");
      sub->add_option("--params", cfg.params, "direction in the tangent parameters")->expected(2);
    }
  }
  CLI::App* oracle = app.add_subcommand("oracle", "run the randomized property suites, or solve one A X - B Y = C");
  oracle->add_option("input", cfg.input, "JSON object with polynomials A, B, C");
  oracle->add_option("--seed", cfg.seed, "base seed of the suites");
  add_common(oracle);

  CLI::App* seed = app.add_subcommand("seed", "construct a point with a prescribed root pattern");
  seed->add_option("--genus", cfg.genus, "genus")->check(CLI::Range(0, 5));
  seed->add_option("--shape", cfg.shape, "generic, circle-root, common-pair or conformal")
      ->check(CLI::IsMember({"generic", "circle-root", "common-pair", "conformal"}));
  seed->add_option("--seed", cfg.seed, "random seed");
  seed->add_option("--lattice-scale", cfg.lattice_scale, "typical size of the lattice integers")
      ->check(CLI::PositiveNumber);
  seed->add_option("--max-attempts", cfg.max_attempts, "attempts before giving up")->check(CLI::PositiveNumber);
  add_common(seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }
  for (CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();
  if (!format.empty()) cfg.format = format;
  return run(cfg, out, err);
}

}  // namespace whitham
