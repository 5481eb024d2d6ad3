#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "whitham/polynomial.hpp"

namespace whitham {

// Randomized property suites with independent reference computations. Each
// suite is reproducible from its seed; timing is left to the caller.
struct SuiteResult {
  std::string name;
  std::uint64_t seed = 0;
  int instances = 0;
  int failures = 0;
  double worst = 0.0;      // largest measured error over all instances
  double tolerance = 0.0;
  std::string detail;      // first failure, if any
  bool pass() const { return failures == 0; }
};

// A X - B Y = C as one dense least-squares problem over the stacked
// coefficient equations, with deg X <= xdeg and deg Y <= ydeg.
std::pair<Polynomial, Polynomial> stacked_bezout(const Polynomial& A, const Polynomial& B,
                                                 const Polynomial& C, int xdeg, int ydeg);

// minimal_solution against the stacked solve; deg <= 8 with a forced common
// factor of degree 0-2.
SuiteResult bezout_oracle_suite(std::uint64_t seed, int instances = 500);
// Real-section data with c < a + b - d: the minimal solution is real without averaging.
SuiteResult reality_suite(std::uint64_t seed, int instances = 200);
// c >= a + b - d: sampled members of the solution space satisfy the equation.
SuiteResult membership_suite(std::uint64_t seed, int instances = 100, int samples = 5);
// conj R = (-1)^(n+1) (prod beta) R on case-(a) shaped data, n = deg b~2;
// the last `confluent` instances approach a double root of b~2.
SuiteResult r_reality_suite(std::uint64_t seed, int instances = 200, int confluent = 20);
// R at a double root of b~2 against the limit extrapolated from eps = 1e-3, 1e-4, 1e-5.
SuiteResult r_confluent_suite(std::uint64_t seed, int instances = 20);
// Row-scaled smallest singular value of the homogeneous operator on random
// nonsingular P (g <= 5), and the recover_chat / solve_empdi roundtrip on
// case-(a) data satisfying the residue conditions.
SuiteResult kernel_suite(std::uint64_t seed, int instances = 100);

std::vector<SuiteResult> run_oracle_suites(std::uint64_t seed);

}  // namespace whitham
