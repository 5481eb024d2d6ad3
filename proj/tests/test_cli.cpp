#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "whitham/cli.hpp"

using namespace whitham;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "whitham");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("exit codes by class") {
  CHECK(run_args({"validate", data_path("good_g0.json")}).code == kExitPass);
  CHECK(run_args({"validate", data_path("circle_root.json")}).code == kExitFailed);
  CHECK(run_args({"validate", data_path("malformed.json")}).code == kExitUsage);
  CHECK(run_args({"validate", data_path("degree_overflow.json")}).code == kExitUsage);
  CHECK(run_args({"tangent", data_path("zero_b1.json")}).code == kExitNumerical);
  CHECK(run_args({"tangent", data_path("circle_root.json")}).code == kExitFailed);
  CHECK(run_args({"frobnicate"}).code == kExitUsage);
  CHECK(run_args({"validate"}).code == kExitUsage);
  CHECK(run_args({"validate", data_path("good_g0.json"), "--tol-alg", "-1"}).code == kExitUsage);
  CHECK(run_args({"validate", data_path("good_g0.json"), "--format", "svg"}).code == kExitUsage);
  CHECK(run_args({"--help"}).code == kExitPass);
}

TEST_CASE("error kinds map onto exit codes") {
  CHECK(exit_code(ErrorKind::Parse) == kExitUsage);
  CHECK(exit_code(ErrorKind::CurveViolation) == kExitFailed);
  CHECK(exit_code(ErrorKind::NotDeformable) == kExitFailed);
  CHECK(exit_code(ErrorKind::ProjectionFailure) == kExitNumerical);
  CHECK(exit_code(ErrorKind::NumericalFailure) == kExitNumerical);
}

TEST_CASE("validate names the failing entry") {
  Run r = run_args({"validate", data_path("circle_root.json")});
  Json j = Json::parse(r.out);
  CHECK(j["pass"] == false);
  bool found = false;
  for (const auto& e : j["entries"])
    if (e["name"] == "no_unit_circle_roots") found = e["pass"] == false;
  CHECK(found);
}

TEST_CASE("tangent report carries two vectors and residuals") {
  Run r = run_args({"tangent", data_path("good_g0.json")});
  REQUIRE(r.code == kExitPass);
  Json j = Json::parse(r.out);
  CHECK(j["vectors"].size() == 2);
  CHECK(j["vectors"][0].contains("residuals"));
  CHECK(j["max_residual"].get<double>() <= 1e-9);
}

TEST_CASE("reports are byte-identical across runs") {
  for (std::vector<std::string> args :
       {std::vector<std::string>{"validate", data_path("g1_circle.json")},
        {"classify", data_path("g2_common_pair.json")},
        {"tangent", data_path("g1_conformal.json")},
        {"flow", data_path("good_g0.json"), "--steps", "3", "--format", "csv"},
        {"plot", data_path("g1_generic.json")},
        {"validate", WHITHAM_TEST_DATA}}) {
    CAPTURE(args[0]);
    Run a = run_args(args), b = run_args(args);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("directory mode is sorted and takes the worst exit code") {
  Run r = run_args({"validate", WHITHAM_TEST_DATA});
  CHECK(r.code == kExitUsage);
  Json j = Json::parse(r.out);
  std::vector<std::string> names;
  for (const auto& f : j["files"]) names.push_back(f["file"]);
  CHECK(std::is_sorted(names.begin(), names.end()));
  CHECK(names.size() >= frozen_points().size());
  CHECK(run_args({"flow", WHITHAM_TEST_DATA}).code == kExitUsage);
}

TEST_CASE("flow emits one JSON line per sample") {
  Run r = run_args({"flow", data_path("good_g0.json"), "--steps", "2", "--dt", "0.01"});
  REQUIRE(r.code == kExitPass);
  std::istringstream in(r.out);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    Json j = Json::parse(line);
    CHECK(j.contains("triple"));
    CHECK(j["lattice"].size() == 4);
    ++n;
  }
  CHECK(n == 3);
  CHECK(run_args({"flow", data_path("circle_root.json")}).code == kExitFailed);
}

TEST_CASE("emitted triples re-parse to equal values") {
  std::string path = (std::filesystem::temp_directory_path() / "whitham_cli_seed.json").string();
  Run r = run_args({"seed", "--genus", "0", "--seed", "4", "--out", path});
  REQUIRE(r.code == kExitPass);
  SpectralTriple t = read_triple(path);
  CHECK(validate(t).pass);
  CHECK(dump(to_json(t)) == [&] {
    std::ifstream in(path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }());
  std::remove(path.c_str());
}

TEST_CASE("oracle solves one Bezout identity on request") {
  std::string path = (std::filesystem::temp_directory_path() / "whitham_cli_abc.json").string();
  {
    std::ofstream f(path);
    f << R"({"A": [[1, 0], [1, 0]], "B": [[-1, 0], [0, 0], [1, 0]], "C": [[1, 0], [1, 0]]})";
  }
  Run r = run_args({"oracle", path});
  REQUIRE(r.code == kExitPass);
  Json j = Json::parse(r.out);
  CHECK(j["residual"].get<double>() < 1e-14);
  CHECK(j["D"].size() == 2);
  std::remove(path.c_str());
}

TEST_CASE("svg plot has the expected layers") {
  Run r = run_args({"plot", data_path("g1_circle.json")});
  REQUIRE(r.code == kExitPass);
  CHECK(r.out.rfind("<svg", 0) == 0);
  CHECK(r.out.find("stroke-dasharray") != std::string::npos);
  CHECK(r.out.find("</svg>") != std::string::npos);
}
