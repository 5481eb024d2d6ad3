#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "whitham/curve.hpp"
#include "whitham/error.hpp"

using namespace whitham;

namespace {

const double kTwoPi = 2 * std::numbers::pi;

Polynomial genus_p(std::vector<cplx> alphas, double scale = 1.0) {
  Polynomial P = Polynomial::constant(scale);
  for (cplx a : alphas) P = P * real_root_pair(a);
  return P;
}

}  // namespace

TEST_CASE("build_curve examples") {
  auto c0 = build_curve(Polynomial({-0.5, 1.25, -0.5}));
  CHECK(c0.genus == 0);
  REQUIRE(c0.branch_pairs.size() == 1);
  CHECK(std::abs(c0.branch_pairs[0].inner - 0.5) < 1e-14);
  CHECK(std::abs(c0.branch_pairs[0].outer - 2.0) < 1e-13);

  auto ci = build_curve(real_root_pair(cplx(0, 0.5)));
  CHECK(std::abs(ci.branch_pairs[0].outer - cplx(0, 2)) < 1e-13);

  auto c1 = build_curve(genus_p({0.3, cplx(0, 0.4)}));
  CHECK(c1.genus == 1);
  CHECK(c1.branch_pairs.size() == 2);

  Polynomial circle = real_unit_root(std::numbers::pi / 4) * real_unit_root(1.0);
  CHECK_THROWS_AS(build_curve(circle), Error);
  CHECK_THROWS_AS(build_curve(real_root_pair(0.5) * real_root_pair(0.5)), Error);
  CHECK_THROWS_AS(build_curve(Polynomial({-0.5, 1.0, 0.3})), Error);
}

TEST_CASE("conformal curve pairs zero with infinity") {
  Polynomial P = (Polynomial::monomial(1) * real_root_pair(cplx(0.2, 0.3))).with_bound(4);
  auto c = build_curve(P);
  CHECK(c.genus == 1);
  CHECK(c.branched_at_zero);
  CHECK(c.branch_points.size() == 3);
}

TEST_CASE("residue helpers") {
  Polynomial P({-0.5, 1.25, -0.5});
  Polynomial b({1.0, -1.25, -1.25, 1.0});
  CHECK(std::abs(residue_condition(P, b)) < 1e-15);
  Differential d{build_curve(P), b};
  CHECK(std::abs(residue_at_zero(d)) < 1e-15);
  Differential d1{build_curve(P), Polynomial({1.0})};
  CHECK(std::abs(residue_at_zero(d1) - (-0.5 * 1.25 / -0.5)) < 1e-15);
  Differential d0{build_curve(P), Polynomial({0.0, 0.0, 1.0})};
  CHECK(residue_at_zero(d0) == cplx(0.0));
  Polynomial Pc({0.0, 2.0, 0.5});
  CHECK(std::abs(residue_condition(Pc, Polynomial({1.0})) - 2.0) < 1e-15);
  CHECK(residue_condition(Pc, Polynomial()) == cplx(0.0));
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(16, x, w);
  double s = 0.0;
  for (int i = 0; i < 16; ++i) s += w[i] * std::pow(x[i], 30);
  CHECK(std::abs(s - 2.0 / 31.0) < 1e-15);
}

TEST_CASE("one-cut curve: A-cycle of dzeta/eta is 2 pi i up to sign") {
  oracle::Rng rng(31);
  for (int t = 0; t < 10; ++t) {
    cplx a = rng.annulus(0.2, 0.7), b = rng.annulus(1.4, 3.0);
    Polynomial P = Polynomial::from_roots(std::vector<cplx>{a, b}, rng.complex() + 2.0);
    auto c = general_curve(P);
    PathOnCurve loop;
    loop.start = std::polar(1.0, rng.uniform(-3, 3));
    loop.closed = true;
    loop.pieces = {PathPiece::lasso(0, c.branch_points[0]), PathPiece::lasso(1, c.branch_points[1])};
    Differential d{c, Polynomial::monomial(2)};
    auto r = integrate(d, loop);
    // Residue at infinity of 1/sqrt(lc (z-a)(z-b)) is 1/sqrt(lc).
    double expect = kTwoPi / std::abs(std::sqrt(c.leading));
    CHECK(std::abs(std::abs(r.value) - expect) < 1e-10 * expect);
    cplx scaled = r.value * std::sqrt(c.leading);
    CHECK(std::abs(scaled.real()) < 1e-10 * kTwoPi);
    CHECK(std::abs(std::abs(scaled.imag()) - kTwoPi) < 1e-10 * kTwoPi);
    CHECK(r.end_sheet_flip == 1);
  }
}

TEST_CASE("contour enclosing nothing integrates to zero") {
  auto c = build_curve(genus_p({0.3, cplx(0, 0.4)}));
  Differential d{c, Polynomial({1.0, 0.5, -0.2, 0.3, 0.1})};
  PathOnCurve p;
  p.start = 1.0;
  p.closed = true;
  cplx cen(4.0, 4.0);
  p.pieces = {PathPiece::segment(1.0, cen - 0.5),
              PathPiece::arc(cen, 0.5, std::numbers::pi, 3 * std::numbers::pi),
              PathPiece::segment(cen - 0.5, 1.0)};
  auto r = integrate(d, p);
  CHECK(std::abs(r.value) < 1e-13 * r.magnitude);
  CHECK(r.end_sheet_flip == 1);
}

TEST_CASE("sheet bookkeeping and sheet antisymmetry") {
  auto c = build_curve(genus_p({0.3, cplx(-0.2, 0.4)}));
  auto B = homology_basis(c);
  Differential d{c, Polynomial({0.3, -0.2, 1.0, 0.4, 0.2})};
  PathOnCurve one;
  one.start = B.base_point;
  one.pieces = {PathPiece::lasso(B.chain[0], c.branch_points[B.chain[0]])};
  CHECK(integrate(d, one).end_sheet_flip == -1);
  CHECK(integrate(d, B.a_cycles[0]).end_sheet_flip == 1);
  PathOnCurve neg = B.a_cycles[0];
  neg.start_sheet = -1;
  auto r1 = integrate(d, B.a_cycles[0]), r2 = integrate(d, neg);
  CHECK(std::abs(r1.value + r2.value) < 1e-14 * r1.magnitude);
  CHECK(integrate(d, B.gamma_plus).end_sheet_flip == -1);
}

TEST_CASE("homology basis shapes") {
  auto c0 = build_curve(genus_p({0.4}));
  auto B0 = homology_basis(c0);
  CHECK(B0.a_cycles.empty());
  CHECK(B0.b_cycles.empty());
  auto B1 = homology_basis(build_curve(genus_p({0.3, cplx(0, 0.4)})));
  CHECK(B1.a_cycles.size() == 1);
  CHECK(B1.b_cycles.size() == 1);
  auto c2 = build_curve(genus_p({0.5, cplx(-0.3, 0.5), cplx(0.1, -0.6)}));
  auto B2 = homology_basis(c2);
  CHECK(B2.a_cycles.size() == 2);
  CHECK(B2.b_cycles.size() == 2);
  CHECK(B2.clearance > 0.05);
}

TEST_CASE("quadrature self-convergence on basis cycles") {
  oracle::Rng rng(32);
  for (int t = 0; t < 10; ++t) {
    int g = rng.integer(0, 3);
    std::vector<cplx> al;
    for (int i = 0; i <= g; ++i) al.push_back(rng.annulus(0.15, 0.85));
    auto c = build_curve(genus_p(al));
    auto B = homology_basis(c);
    Differential d{c, rng.real_section(g + 3)};
    std::vector<PathOnCurve> paths = B.a_cycles;
    paths.insert(paths.end(), B.b_cycles.begin(), B.b_cycles.end());
    paths.push_back(B.gamma_plus);
    paths.push_back(B.gamma_minus);
    for (const auto& p : paths) {
      auto lo = integrate(d, p, 16, false), hi = integrate(d, p, 64, false);
      CHECK(std::abs(lo.value - hi.value) <= 1e-10 * hi.magnitude);
    }
  }
}

TEST_CASE("periods of real data over the real oval are imaginary") {
  oracle::Rng rng(33);
  for (int t = 0; t < 5; ++t) {
    auto c = build_curve(genus_p({rng.annulus(0.2, 0.8), rng.annulus(0.2, 0.8)}));
    Differential d{c, rng.real_section(4)};
    PathOnCurve oval;
    oval.start = 1.0;
    oval.closed = true;
    oval.pieces = {PathPiece::arc(0.0, 1.0, 0.0, kTwoPi)};
    auto r = integrate(d, oval);
    CHECK(std::abs(r.value.real()) < 1e-12 * r.magnitude);
    CHECK(r.end_sheet_flip == 1);
  }
}

TEST_CASE("transported basis reproduces integrals") {
  auto c = build_curve(genus_p({0.3, cplx(0, 0.4)}));
  auto B = homology_basis(c);
  auto T = transport_basis(B, c);
  Differential d{c, Polynomial({0.3, -0.2, 1.0, 0.4, 0.2})};
  CHECK(std::abs(integrate(d, B.b_cycles[0]).value - integrate(d, T.b_cycles[0]).value) < 1e-14);
  auto c2 = build_curve(genus_p({0.3 + 1e-3, cplx(0, 0.4)}));
  auto T2 = transport_basis(B, c2);
  Differential d2{c2, d.b};
  CHECK(std::abs(integrate(d2, T2.b_cycles[0]).value - integrate(d, B.b_cycles[0]).value) < 1e-1);
}

TEST_CASE("conformal curve integrals converge") {
  Polynomial P = (Polynomial::monomial(1) * real_root_pair(cplx(0.2, 0.3))).with_bound(4);
  auto c = build_curve(P);
  auto B = homology_basis(c);
  // b = zeta m satisfies the conformal residue condition.
  Differential d{c, (Polynomial::monomial(1) * Polynomial({cplx(0.3, 0.1), 0.5, cplx(0.3, -0.1)})).with_bound(4)};
  for (const auto& p : {B.a_cycles[0], B.b_cycles[0], B.gamma_plus, B.gamma_minus}) {
    auto lo = integrate(d, p, 16, false), hi = integrate(d, p, 64, false);
    CHECK(std::abs(lo.value - hi.value) <= 1e-10 * hi.magnitude);
  }
}
