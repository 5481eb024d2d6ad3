#pragma once

#include <optional>
#include <vector>

#include "whitham/polynomial.hpp"

namespace whitham {

// ---- real structure on sections of O(k) --------------------------------

// (rho_k^* p)_i = conj(p_{k-i}).
Polynomial real_pullback(const Polynomial& p, int k);

struct RealSectionWitness {
  Polynomial pullback;
  int k = 0;
  double max_defect = 0.0;  // max_i |p_i - conj(p_{k-i})|
};

struct RealSectionCheck {
  bool is_real = false;
  RealSectionWitness witness;
};

// tol is absolute on coefficients.
RealSectionCheck is_real_section(const Polynomial& p, int k, double tol);

// (p + rho_k^* p) / 2.
Polynomial realify_section(const Polynomial& p, int k);

// Unit scalar u with u*p real in P^k, when p is real up to a phase.
std::optional<cplx> real_phase(const Polynomial& p, int k, double tol = 1e-8);

// Coordinates of P^k_R: (Re q_i, Im q_i) for i < k/2, then Re q_{k/2} if k even.
std::vector<double> real_coordinates(const Polynomial& p, int k);
Polynomial from_real_coordinates(const double* x, int k);
inline Polynomial from_real_coordinates(const std::vector<double>& x, int k) {
  return from_real_coordinates(x.data(), k);
}

// (zeta - a)(1 - conj(a) zeta), a real section of degree 2 with roots a, 1/conj(a).
Polynomial real_root_pair(cplx a);
// i e^{-i phi/2} (zeta - e^{i phi}), a real section of degree 1.
Polynomial real_unit_root(double phi);

// ---- roots ---------------------------------------------------------------

inline constexpr double kRootClusterRadius = 1e-6;
inline constexpr double kGcdClusterRadius = 1e-8;

struct Root {
  cplx value;
  int multiplicity = 1;
};

// Finite roots with multiplicities. Roots closer than cluster_radius*max(1,|z|)
// are merged and the centre refined.
std::vector<Root> roots(const Polynomial& p, double cluster_radius = kRootClusterRadius);

// Raw simultaneous iteration, no clustering; exact zero roots come first.
std::vector<cplx> raw_roots(const Polynomial& p);

std::vector<cplx> expand_roots(const std::vector<Root>& r);

// Roots of p as a section of O(p.bound()): finite roots plus count at infinity.
struct SectionRoots {
  std::vector<Root> finite;
  int at_infinity = 0;
};
SectionRoots section_roots(const Polynomial& p, double cluster_radius = kRootClusterRadius);

// ---- gcd ---------------------------------------------------------------

struct GcdReport {
  Polynomial gcd;         // monic, bound includes common roots at infinity
  bool borderline = false;
  double worst_margin = 0.0;  // smallest |log10(distance / radius)| seen
};

GcdReport approx_gcd_report(const Polynomial& p, const Polynomial& q,
                            double tol = kGcdClusterRadius);
Polynomial approx_gcd(const Polynomial& p, const Polynomial& q, double tol = kGcdClusterRadius);

// Multiset operations on root lists, matching within tol*max(1,|z|).
struct RootMatch {
  std::vector<Root> common, only_a, only_b;
  bool borderline = false;
};
RootMatch match_roots(const std::vector<Root>& a, const std::vector<Root>& b, double tol);

// ---- factor tower of a triple ---------------------------------------------

// P = F F1 F2 Pt,  b1 = F F1 G bt1,  b2 = F F2 G bt2.
// F, F1, F2, G are monic up to a unit phase chosen to make them real sections
// when the inputs are real. Degrees are nominal (roots at infinity counted).
struct FactorStructure {
  Polynomial F, F1, F2, G, P_tilde, b1_tilde, b2_tilde;
  int d_F = 0, d_1 = 0, d_2 = 0, d_G = 0;
  bool borderline = false;
  double reconstruction_residual = 0.0;
};

FactorStructure factor_structure(const Polynomial& P, const Polynomial& b1,
                                 const Polynomial& b2, double tol = kGcdClusterRadius);

}  // namespace whitham
