#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "whitham/deformation.hpp"
#include "whitham/spectral.hpp"

namespace whitham {

// Root pattern imposed on the differentials of a constructed point.
enum class SeedShape {
  Generic,     // P a product of root pairs, no common roots: case (a)
  CircleRoot,  // b1, b2 share a root on the unit circle: case (b), G linear
  CommonPair,  // b1, b2 share a root pair off the circle: case (b), G quadratic
  Conformal,   // P_0 = 0: case (e)
};
const char* to_string(SeedShape s);

struct SeedOptions {
  int genus = 1;
  SeedShape shape = SeedShape::Generic;
  std::uint64_t seed = 1;
  double lattice_scale = 3.0;  // typical size of the target integers
  int max_attempts = 40;
  int quad_order = 32;
  double tol = 1e-12;
};

struct SeedResult {
  SpectralTriple triple;
  std::vector<long long> lattice;
  CaseLabel label;
  int attempts = 0;
  double residual = 0.0;
};

// Builds a point of M_g with the requested root pattern. P is taken as a
// product of real root pairs (times zeta in the conformal shape), so the
// scaling condition holds exactly; b^i range over the residue-free real
// sections with the imposed common root. The remaining period and closing
// conditions are linear in b^i for fixed P and fix P up to a
// two-dimensional family (fewer with the root constraints), which is solved
// by Gauss-Newton after rounding the integers at a nearby point.
SeedResult lattice_seed(const SeedOptions& opt);

}  // namespace whitham
