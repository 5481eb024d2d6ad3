#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "whitham/error.hpp"
#include "whitham/polyring.hpp"

using namespace whitham;

namespace {

// Each element of a has a partner in b within tol (multiset match).
bool same_multiset(std::vector<cplx> a, std::vector<cplx> b, double tol) {
  if (a.size() != b.size()) return false;
  for (cplx z : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx u, cplx v) {
      return std::abs(u - z) < std::abs(v - z);
    });
    if (std::abs(*it - z) > tol * std::max(1.0, std::abs(z))) return false;
    b.erase(it);
  }
  return true;
}

}  // namespace

TEST_CASE("real pullback examples") {
  CHECK(relative_distance(real_pullback(Polynomial({1.0, 0.0, 1.0}), 2), Polynomial({1.0, 0.0, 1.0})) == 0.0);
  CHECK(relative_distance(real_pullback(Polynomial({0.0, 1.0}), 1), Polynomial({1.0})) == 0.0);
  CHECK(relative_distance(real_pullback(Polynomial({cplx(0, 1)}), 0), Polynomial({cplx(0, -1)})) == 0.0);
  CHECK_THROWS_AS(real_pullback(Polynomial({1.0, 2.0, 3.0}), 1), Error);
}

TEST_CASE("is_real_section examples") {
  CHECK(is_real_section(Polynomial({1.0, 0.0, 1.0}), 2, 1e-12).is_real);
  CHECK_FALSE(is_real_section(Polynomial({0.0, cplx(0, 1)}), 2, 1e-12).is_real);
  CHECK(is_real_section(Polynomial({-0.5, 1.25, -0.5}), 2, 1e-12).is_real);
}

TEST_CASE("pullback is an involution and characterises real sections") {
  oracle::Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    int k = rng.integer(0, 9);
    Polynomial p = rng.poly(rng.integer(0, k));
    CHECK(relative_distance(real_pullback(real_pullback(p, k), k), p) < 1e-15);
    Polynomial r = rng.real_section(k);
    CHECK(is_real_section(r, k, 1e-14).is_real);
    CHECK(relative_distance(real_pullback(r, k), r) < 1e-15);
  }
}

TEST_CASE("derivative identity on real sections") {
  oracle::Rng rng(12);
  Polynomial zeta = Polynomial::monomial(1);
  for (int t = 0; t < 30; ++t) {
    int k = rng.integer(1, 9);
    Polynomial f = rng.real_section(k);
    Polynomial lhs = real_pullback(zeta * f.derivative(), k);
    Polynomial rhs = f * double(k) - zeta * f.derivative();
    CHECK(relative_distance(lhs, rhs) < 1e-14);
  }
}

TEST_CASE("real coordinates round trip") {
  oracle::Rng rng(13);
  for (int k = 0; k < 8; ++k) {
    Polynomial r = rng.real_section(k);
    auto x = real_coordinates(r, k);
    CHECK(x.size() == std::size_t(k + 1));
    CHECK(relative_distance(from_real_coordinates(x, k), r) < 1e-15);
  }
  CHECK(is_real_section(real_root_pair(cplx(0.3, 0.2)), 2, 1e-15).is_real);
  CHECK(is_real_section(real_unit_root(0.7), 1, 1e-15).is_real);
  CHECK(std::abs(real_unit_root(0.7)(std::polar(1.0, 0.7))) < 1e-15);
}

TEST_CASE("roots examples") {
  auto r = roots(Polynomial({-1.0, 0.0, 1.0}));
  REQUIRE(r.size() == 2);
  CHECK(same_multiset(expand_roots(r), {1.0, -1.0}, 1e-14));

  Polynomial p = Polynomial::from_roots(std::vector<cplx>{0.5, 0.5, -2.0});
  auto q = roots(p);
  REQUIRE(q.size() == 2);
  auto ref = oracle::companion_roots(p);
  for (const Root& x : q) {
    if (x.multiplicity == 2) {
      CHECK(std::abs(x.value - 0.5) < 1e-12);
      int near = 0;
      for (cplx z : ref) near += std::abs(z - x.value) < 1e-6;
      CHECK(near == 2);
    } else {
      CHECK(x.multiplicity == 1);
      CHECK(std::abs(x.value + 2.0) < 1e-13);
    }
  }

  auto z3 = roots(Polynomial::monomial(3));
  REQUIRE(z3.size() == 1);
  CHECK(z3[0].value == 0.0);
  CHECK(z3[0].multiplicity == 3);
  CHECK_THROWS_AS(roots(Polynomial()), Error);
}

TEST_CASE("roots agree with companion eigenvalues") {
  oracle::Rng rng(14);
  for (int t = 0; t < 200; ++t) {
    Polynomial p = rng.poly_from_roots(rng.integer(1, 12), 0.05, 20.0);
    auto r = expand_roots(roots(p));
    CHECK(same_multiset(r, oracle::companion_roots(p), 1e-8));
  }
}

TEST_CASE("roots of real sections come in conjugate-inverse pairs") {
  oracle::Rng rng(15);
  for (int t = 0; t < 50; ++t) {
    int k = rng.integer(2, 10);
    Polynomial p = rng.real_section(k);
    auto r = expand_roots(roots(p));
    std::vector<cplx> img;
    for (cplx z : r) img.push_back(1.0 / std::conj(z));
    // Roots lost at infinity appear as roots at 0 of the image and vice versa.
    if (p.degree() == k) CHECK(same_multiset(r, img, 1e-7));
  }
}

TEST_CASE("approx_gcd examples") {
  Polynomial g1 = approx_gcd(Polynomial({-1.0, 0.0, 1.0}), Polynomial({-1.0, 1.0}));
  CHECK(relative_distance(g1, Polynomial({-1.0, 1.0})) < 1e-14);
  Polynomial a = Polynomial::from_roots(std::vector<cplx>{0.5, 2.0});
  Polynomial b = Polynomial::from_roots(std::vector<cplx>{0.5, -1.0});
  CHECK(relative_distance(approx_gcd(a, b), Polynomial({-0.5, 1.0})) < 1e-14);
  Polynomial c = approx_gcd(Polynomial({-2.0, 1.0}), Polynomial({3.0, 1.0}));
  CHECK(c.degree() == 0);
  CHECK(std::abs(c[0] - 1.0) < 1e-15);
  CHECK_THROWS_AS(approx_gcd(Polynomial(), Polynomial()), Error);
}

TEST_CASE("approx_gcd flags borderline clusters") {
  Polynomial a = Polynomial::from_roots(std::vector<cplx>{0.5, 2.0});
  Polynomial b = Polynomial::from_roots(std::vector<cplx>{0.5 + 3e-8, -1.0});
  auto rep = approx_gcd_report(a, b);
  CHECK(rep.borderline);
  CHECK(rep.gcd.degree() == 0);
}

TEST_CASE("factor structure on the linear-factor example") {
  auto L = [](std::vector<cplx> r) { return Polynomial::from_roots(r); };
  Polynomial P = L({2.0, 5.0});
  Polynomial b1 = L({2.0, 7.0, 11.0});
  Polynomial b2 = L({2.0, 5.0, 7.0});
  FactorStructure fs = factor_structure(P, b1, b2);
  CHECK(relative_distance(fs.F, L({2.0})) < 1e-12);
  CHECK(fs.F1.degree() == 0);
  CHECK(relative_distance(fs.F2, L({5.0})) < 1e-12);
  CHECK(relative_distance(fs.G, L({7.0})) < 1e-12);
  CHECK(fs.P_tilde.degree() == 0);
  CHECK(relative_distance(fs.b1_tilde, L({11.0})) < 1e-12);
  CHECK(fs.b2_tilde.degree() == 0);
  CHECK(fs.reconstruction_residual < 1e-12);
}

TEST_CASE("factor structure of coprime and conformal shapes") {
  oracle::Rng rng(16);
  Polynomial P = rng.real_section_paired(4);
  Polynomial b1 = rng.real_section_paired(4);
  Polynomial b2 = rng.real_section_paired(4);
  FactorStructure fs = factor_structure(P, b1, b2);
  CHECK(fs.d_F + fs.d_1 + fs.d_2 + fs.d_G == 0);
  CHECK(fs.reconstruction_residual < 1e-12);

  // Conformal shape: a root at 0 pairs with one at infinity.
  Polynomial zeta = Polynomial::monomial(1);
  Polynomial L = rng.real_section_paired(2);
  Polynomial m1 = rng.real_section_paired(2), m2 = rng.real_section_paired(2);
  Polynomial Pc = (zeta * L).with_bound(4), c1 = (zeta * m1).with_bound(4), c2 = (zeta * m2).with_bound(4);
  FactorStructure fc = factor_structure(Pc, c1, c2);
  CHECK(fc.d_F == 2);
  CHECK(fc.F.degree() == 1);
  CHECK(std::abs(fc.F[0]) < 1e-14);
  CHECK(fc.d_G == 0);
  CHECK(fc.reconstruction_residual < 1e-12);
  CHECK(is_real_section(fc.F, 2, 1e-14).is_real);
  CHECK(is_real_section(fc.P_tilde, fc.P_tilde.bound(), 1e-12).is_real);
}

TEST_CASE("factor structure with a shared real root pair") {
  oracle::Rng rng(17);
  Polynomial G = real_root_pair(cplx(0.3, -0.4));
  Polynomial P = rng.real_section_paired(4);
  Polynomial b1 = (G * rng.real_section_paired(3)).with_bound(5);
  Polynomial b2 = (G * rng.real_section_paired(3)).with_bound(5);
  FactorStructure fs = factor_structure(P, b1, b2);
  CHECK(fs.d_G == 2);
  CHECK(fs.d_F == 0);
  CHECK(is_real_section(fs.G, 2, 1e-12).is_real);
  CHECK(is_real_section(fs.b1_tilde, 3, 1e-10).is_real);
  CHECK(fs.reconstruction_residual < 1e-12);
}
