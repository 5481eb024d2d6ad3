#pragma once

#include <optional>
#include <vector>

#include "whitham/polyring.hpp"

namespace whitham {

struct BranchPair {
  cplx inner;           // inside the unit disc
  cplx outer;           // 1/conj(inner); unused when at_zero
  bool at_zero = false; // inner == 0, partner at infinity
};

// eta^2 = P(zeta).
struct HyperellipticCurve {
  Polynomial P;
  int genus = 0;
  std::vector<BranchPair> branch_pairs;
  bool branched_at_zero = false;
  std::vector<cplx> branch_points;  // finite roots of P
  cplx leading = 1.0;               // leading coefficient of P
};

// Checks the real structure: P in P^{2g+2}_R with simple roots off the unit
// circle, paired by zeta -> 1/conj(zeta).
HyperellipticCurve build_curve(const Polynomial& P, double tol = 1e-10);

// Same data for an arbitrary squarefree P, without reality checks.
HyperellipticCurve general_curve(const Polynomial& P);

// Theta = b dzeta / (zeta^2 eta).
struct Differential {
  HyperellipticCurve curve;
  Polynomial b;
};

struct PathPiece {
  enum class Kind { Segment, Arc, Lasso };
  Kind kind = Kind::Segment;
  cplx from = 0.0, to = 0.0;  // Segment endpoints, Arc endpoints (informational)
  cplx center = 0.0;          // Arc: center + radius e^{i theta}, theta0 -> theta1
  double radius = 0.0, theta0 = 0.0, theta1 = 0.0;
  // Lasso from the current point out to a branch point and back on the other
  // sheet. loop_radius > 0 selects the variant that runs in to a circle of that
  // radius around 0, once round it, and back (for branch points at or near 0).
  int branch = -1;
  cplx target = 0.0;
  double loop_radius = 0.0;

  static PathPiece segment(cplx a, cplx b);
  static PathPiece arc(cplx center, double radius, double theta0, double theta1);
  static PathPiece unit_arc(cplx a, cplx b);  // short way round the unit circle
  static PathPiece lasso(int branch, cplx target, double loop_radius = 0.0);
};

// The sheet at the start is the continuation of the canonical branch at
// zeta = 1 (Re eta(1) > 0) along the unit circle, times start_sheet.
struct PathOnCurve {
  cplx start = 1.0;
  int start_sheet = 1;
  std::vector<PathPiece> pieces;
  bool closed = false;

  cplx end() const;
  // Polyline for plotting.
  std::vector<cplx> polyline(int samples_per_piece = 24) const;
};

struct CycleBasis {
  cplx base_point = 1.0;
  double base_angle = 0.0;
  std::vector<cplx> snapshot;        // branch points the basis was built on
  std::vector<int> chain;            // indices into snapshot, fan order
  std::vector<double> loop_radius;   // per snapshot index, 0 = straight lasso
  int closing = -1;                  // snapshot index used by gamma +-
  double clearance = 0.0;
  std::vector<PathOnCurve> a_cycles, b_cycles;
  PathOnCurve gamma_plus, gamma_minus;
};

struct BasisOptions {
  std::optional<double> base_angle;  // force the base point e^{i angle}
  int angle_samples = 720;
  double min_clearance = 1e-3;
};

CycleBasis homology_basis(const HyperellipticCurve& curve, const BasisOptions& opt = {});

// Rebuild the same cycles on a nearby curve, matching branch points by proximity.
CycleBasis transport_basis(const CycleBasis& basis, const HyperellipticCurve& curve);

struct IntegrationResult {
  cplx value = 0.0;
  double error = 0.0;      // |I_n - I_2n| when estimated
  double magnitude = 0.0;  // sum |w f|, the scale for relative error
  int end_sheet_flip = 1;  // -1 when the path ends on the other sheet
};

IntegrationResult integrate(const Differential& diff, const PathOnCurve& path, int quad_order = 32,
                            bool estimate_error = true);

// Integrals of zeta^m dzeta/(zeta^2 eta) for m = 0..max_power along a path.
struct MonomialIntegrals {
  std::vector<cplx> value;
  std::vector<double> magnitude;
  std::vector<double> error;
  int end_sheet_flip = 1;
  cplx contract(const Polynomial& b) const;
  double contract_magnitude(const Polynomial& b) const;
  double contract_error(const Polynomial& b) const;
};

MonomialIntegrals integrate_monomials(const HyperellipticCurve& curve, const PathOnCurve& path,
                                      int max_power, int quad_order = 32,
                                      bool estimate_error = true);

// b_1 - P_1 b_0 / (2 P_0): the residue at zeta = 0 times eta(0).
cplx residue_at_zero(const Differential& diff);

// P_1 b_0 - 2 P_0 b_1.
cplx residue_condition(const Polynomial& P, const Polynomial& b);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace whitham
