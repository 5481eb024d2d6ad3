#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "whitham/deformation.hpp"
#include "whitham/error.hpp"
#include "whitham/oracle.hpp"

using namespace whitham;

namespace {

Eigen::VectorXd flat(const TangentVector& v, int g) { return coordinates(v.as_triple(g)); }

DeformationParams combine(double a, const DeformationParams& p, double b, const DeformationParams& q) {
  int bound = std::max(p.Qt.bound(), q.Qt.bound());
  return {(p.Qt * a + q.Qt * b).with_bound(bound), a * p.r + b * q.r};
}

}  // namespace

TEST_CASE("frozen points carry the expected labels") {
  struct Expect {
    const char* file;
    Case label;
    int d_G;
  };
  for (const Expect& e : {Expect{"good_g0.json", Case::A, 0}, Expect{"g0_conformal.json", Case::E, 0},
                          Expect{"g1_generic.json", Case::A, 0}, Expect{"g1_circle.json", Case::B, 1},
                          Expect{"g1_conformal.json", Case::E, 0}, Expect{"g2_generic.json", Case::A, 0},
                          Expect{"g2_common_pair.json", Case::B, 2}}) {
    CAPTURE(e.file);
    CaseLabel l = classify(load(e.file));
    CHECK(l.label == e.label);
    CHECK(l.evidence.d_G == e.d_G);
    CHECK(l.deformable());
    CHECK_FALSE(l.borderline);
  }
  CHECK(classify(load("g1_circle.json")).g_linear());
  CHECK_FALSE(classify(load("g2_common_pair.json")).g_linear());
}

TEST_CASE("non-deformable cases are rejected") {
  SpectralTriple a = load("g1_generic.json");
  SpectralTriple d(a.g, a.P, a.b1, a.b1 * 2.0);
  CHECK(classify(d).label == Case::D);
  CHECK_THROWS_AS(tangent_basis(d), Error);
  try {
    tangent(d, DeformationParams{Polynomial::constant(1.0).with_bound(2), 0.0});
    FAIL("case (d) produced a tangent");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotDeformable);
  }
  SpectralTriple e0 = load("g0_conformal.json");
  SpectralTriple f(e0.g, e0.P, e0.b1, e0.b1 * -3.0);
  CHECK(classify(f).label == Case::F);
  try {
    tangent_basis(f);
    FAIL("case (f) produced a tangent basis");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotDeformable);
  }
}

TEST_CASE("interpolant leading coefficient against the stacked solve") {
  oracle::Rng rng(51);
  for (int t = 0; t < 20; ++t) {
    Polynomial A = rng.poly_from_roots(rng.integer(1, 4)), B = rng.poly_from_roots(rng.integer(1, 5));
    Polynomial C = rng.poly(rng.integer(0, 6));
    int n = B.degree();
    auto [X, Y] = oracle::stacked_bezout(A, B, C, n - 1, std::max(A.degree(), C.degree() - n) + n);
    cplx R = interpolant_leading(A, B, C);
    CHECK(std::abs(R - X[n - 1]) <= 1e-8 * std::max(1.0, std::abs(R)));
  }
}

TEST_CASE("R vanishes on the kernel basis") {
  for (const char* name : {"good_g0.json", "g1_generic.json", "g2_generic.json"}) {
    CAPTURE(name);
    SpectralTriple t = load(name);
    RKernel k = r_kernel(t);
    for (const Polynomial& Q : k.basis) {
      CHECK(is_real_section(Q, 2, 1e-14).is_real);
      CHECK(std::abs(Q.norm() - 1.0) < 1e-12);
      CHECK(std::abs(r_value(t, Q)) <= 1e-10 * k.singular_values[0]);
    }
    // Real rank one: the reality relation confines R to a real line.
    CHECK(k.singular_values[0] > 0.0);
    CHECK(k.singular_values[1] <= 1e-8 * k.singular_values[0]);
  }
}

TEST_CASE("R reality relation on random case-(a) data") {
  SuiteResult r = r_reality_suite(9, 40, 5);
  CHECK_MESSAGE(r.pass(), r.detail);
  SuiteResult c = r_confluent_suite(9, 5);
  CHECK_MESSAGE(c.pass(), c.detail);
}

TEST_CASE("tangent vectors are linear in the parameters") {
  for (const auto& name : frozen_points()) {
    CAPTURE(name);
    SpectralTriple t = load(name);
    CaseLabel label = classify(t);
    auto p = parameter_basis(t, label);
    Eigen::VectorXd v0 = flat(tangent(t, label, p[0]), t.g), v1 = flat(tangent(t, label, p[1]), t.g);
    Eigen::VectorXd v = flat(tangent(t, label, combine(0.7, p[0], -1.3, p[1])), t.g);
    CHECK((v - 0.7 * v0 + 1.3 * v1).norm() <= 1e-9 * (v0.norm() + v1.norm()));
  }
}

TEST_CASE("tangent residual blocks are small") {
  for (const auto& name : frozen_points()) {
    CAPTURE(name);
    TangentBasis tb = tangent_basis(load(name));
    CHECK(tb.gram_determinant > 1e-3);
    for (const TangentVector& v : tb.vectors) {
      CHECK(v.residuals.max() <= 1e-9);
      CHECK_FALSE(v.ill_conditioned);
    }
  }
}

TEST_CASE("conformal tangents have Q_0 = 0") {
  for (const char* name : {"g0_conformal.json", "g1_conformal.json"}) {
    CAPTURE(name);
    SpectralTriple t = load(name);
    TangentBasis tb = tangent_basis(t);
    REQUIRE(tb.label.label == Case::E);
    for (const TangentVector& v : tb.vectors) {
      CHECK(std::abs(v.Q[0]) <= 1e-10 * std::max(1.0, v.Q.norm()));
      CHECK(std::abs(residue_tangent(t.P, t.b1, v.P_dot, v.b1_dot)) <= 1e-9 * (v.P_dot.norm() + v.b1_dot.norm()));
      CHECK(std::abs(residue_tangent(t.P, t.b2, v.P_dot, v.b2_dot)) <= 1e-9 * (v.P_dot.norm() + v.b2_dot.norm()));
    }
    CHECK_THROWS_AS(conformal_type(t), Error);
  }
}

TEST_CASE("recover_chat inverts solve_empdi") {
  Polynomial z2m1({-1.0, 0.0, 1.0});
  for (const auto& name : frozen_points()) {
    CAPTURE(name);
    SpectralTriple t = load(name);
    TangentBasis tb = tangent_basis(t);
    for (const TangentVector& v : tb.vectors) {
      auto chat = recover_chat(t, v);
      CHECK(relative_distance(chat[0], z2m1 * v.c1) <= 1e-8);
      CHECK(relative_distance(chat[1], z2m1 * v.c2) <= 1e-8);
    }
  }
}

TEST_CASE("homogeneous operator is injective for nonsingular P") {
  oracle::Rng rng(52);
  for (int t = 0; t < 10; ++t) {
    int g = rng.integer(0, 5);
    CHECK(homogeneous_min_singular(rng.real_section_paired(2 * g + 2), g) > 1e-10);
  }
}

TEST_CASE("conformal type rate agrees with the derivative of b2_0 / b1_0") {
  for (const char* name : {"good_g0.json", "g1_generic.json", "g1_circle.json", "g2_common_pair.json"}) {
    CAPTURE(name);
    SpectralTriple t = load(name);
    cplx tau = conformal_type(t);
    for (const TangentVector& v : tangent_basis(t).vectors) {
      cplx direct = (v.b2_dot[0] * t.b1[0] - t.b2[0] * v.b1_dot[0]) / (t.b1[0] * t.b1[0]);
      CHECK(std::abs(conformal_type_rate(t, v) - direct) <= 1e-9 * std::max(std::abs(tau), std::abs(direct)));
    }
  }
}

TEST_CASE("empdi right-hand side and residue tangent by hand") {
  Polynomial P({2.0, 1.0}), c({1.0});
  // c^ = zeta^2 - 1: 2P(c^ - zeta c^') + P' zeta c^ = 2P(-1 - zeta^2) + zeta^3 - zeta.
  Polynomial expect = Polynomial({2.0, 1.0}) * Polynomial({-2.0, 0.0, -2.0}) + Polynomial({0.0, -1.0, 0.0, 1.0});
  CHECK(relative_distance(empdi_rhs(P, c), expect) < 1e-15);
  CHECK(residue_tangent(Polynomial({1.0, 2.0}), Polynomial({3.0, 4.0}), Polynomial({5.0, 6.0}),
                        Polynomial({7.0, 8.0})) == cplx(6.0 * 3 + 2 * 7 - 2 * 5 * 4 - 2 * 1 * 8));
}
