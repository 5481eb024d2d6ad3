#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "whitham/deformation.hpp"
#include "whitham/spectral.hpp"

namespace whitham {

// ---- seeds --------------------------------------------------------------------

// The real 2-plane of b in P^3_R satisfying the residue condition for
// P = (zeta - alpha)(1 - conj(alpha) zeta), as the images of y = 1 and y = i.
// alpha = 0 gives b = zeta (m + conj(m) zeta) at m = 1 and m = i.
std::array<Polynomial, 2> genus0_differentials(cplx alpha);

// Genus-0 triple whose closing integrals (gamma+, gamma-) are 2 pi i m1 for
// Theta^1 and 2 pi i m2 for Theta^2.
SpectralTriple genus0_seed(cplx alpha, std::array<long long, 2> m1, std::array<long long, 2> m2,
                           int quad_order = 32);

// ---- projection ---------------------------------------------------------------

struct ProjectionOptions {
  double tol = 1e-11;           // max abs entry of the residual
  int max_iter = 40;
  double fd_step = 1e-6;        // relative central-difference step
  double rank_tol = 1e-10;      // relative singular value cutoff
  double capture_radius = 0.5;  // initial residual above this is rejected
  int quad_order = 32;
  // Extra equations appended to the Psi residual; each entry must vanish.
  std::function<Eigen::VectorXd(const SpectralTriple&)> extra;
  // Added to the Psi targets (same layout as PsiVector::residual), for homotopies.
  std::optional<Eigen::VectorXd> target_shift;
};

struct ProjectionResult {
  SpectralTriple triple;
  CycleBasis basis;  // transported to the result
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

// Gauss-Newton with minimum-norm updates towards Psi = (2 pi i m, 0, 1).
// lattice holds the integers for periods then closings (4g + 4 entries).
ProjectionResult project_to_Mg(const SpectralTriple& guess, const std::vector<long long>& lattice,
                               const CycleBasis& basis, const ProjectionOptions& opt = {});
ProjectionResult project_to_Mg(const SpectralTriple& guess, const std::vector<long long>& lattice,
                               const ProjectionOptions& opt = {});

// Full residual vector used by the projection (Psi rows, then extras).
Eigen::VectorXd projection_residual(const SpectralTriple& t, const std::vector<long long>& lattice,
                                    const CycleBasis& basis, const ProjectionOptions& opt);

// ---- flow ---------------------------------------------------------------------

// A path through a point x0 of M_g is fixed by two coordinate-space functionals:
// <u, x - x0> = s and <w, x - x0> = 0, with u, w spanning the tangent plane at
// x0 (u along the chosen parameters). Reusing the chart makes reverse traces
// follow the same curve.
struct FlowChart {
  Eigen::VectorXd x0, u, w;
  std::vector<long long> lattice;
  CaseLabel label;
  int g = 0;
};

FlowChart make_chart(const SpectralTriple& t, std::array<double, 2> params,
                     const CycleBasis& basis, int quad_order = 32);

// Unit tangent along the chart at t: the tangent-plane vector with
// <u, v> = 1 and <w, v> = 0, returned together with its tangent parameters.
struct ChartTangent {
  SpectralTriple direction;  // d x / d s
  TangentVector vector;      // the same, with Q and c^i
};
ChartTangent chart_tangent(const SpectralTriple& t, const FlowChart& chart);

struct PathSample {
  double s = 0.0;
  SpectralTriple triple;
  double psi_residual = 0.0;
  CaseLabel label;
  std::optional<cplx> tau;  // absent at conformal points
  std::vector<long long> lattice;
  int newton_iterations = 0;
};

struct FlowConfig {
  double h = 1e-2;
  int steps = 10;
  std::array<double, 2> params = {1.0, 0.0};
  double projection_tol = 1e-11;
  int max_newton = 30;
  double h_min = 1e-6;
  int quad_order = 32;
  bool stop_on_case_change = true;
};

// Euler predictor from the point at chart parameter s to s + h, then
// projection onto M_g within the chart. basis is updated to the new point.
PathSample flow_step(const SpectralTriple& t, double s, double h, const FlowChart& chart,
                     CycleBasis& basis, const FlowConfig& cfg = {});

// cfg.steps steps of size cfg.h (halved on failure down to h_min). Starts a
// new chart at t unless one is given, in which case t must lie on it at s0.
std::vector<PathSample> trace(const SpectralTriple& t, const FlowConfig& cfg,
                              const FlowChart* chart = nullptr, double s0 = 0.0,
                              const CycleBasis* basis = nullptr);

PathSample make_sample(const SpectralTriple& t, double s, const CycleBasis& basis,
                       const std::vector<long long>& lattice, int quad_order = 32);

}  // namespace whitham
