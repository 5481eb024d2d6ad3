#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "whitham/polyring.hpp"

namespace whitham {

// Rows d^m/dzeta^m (1, zeta, ..., zeta^n) at each root, m < multiplicity.
// The total multiplicity must be n + 1.
Eigen::MatrixXcd confluent_vandermonde(const std::vector<Root>& nodes, int n);

// Greedy Leja ordering: start at the largest root, then maximise the product
// of distances to the points already chosen.
std::vector<Root> leja_order(std::vector<Root> r);

struct BezoutOptions {
  double gcd_tol = kGcdClusterRadius;
  double divisibility_tol = 1e-8;
  double condition_cap = 1e12;
};

struct BezoutSolution {
  Polynomial X, Y;
  Polynomial D;               // monic gcd(A, B)
  double residual = 0.0;      // ||AX - BY - C|| / (||A||||X|| + ||B||||Y|| + ||C||)
  double condition = 1.0;     // of the scaled confluent system
  bool ill_conditioned = false;
};

// Unique solution of A X - B Y = C with deg X < deg(B/D).
BezoutSolution minimal_solution(const Polynomial& A, const Polynomial& B, const Polynomial& C,
                                const BezoutOptions& opt = {});

// Average a solution with its image under the real structure; A, B, C must be
// real sections of nominal degrees a, b, c and deg X <= c - a.
BezoutSolution realify(const Polynomial& A, const Polynomial& B, const Polynomial& C, int a,
                       int b, int c, const BezoutSolution& sol);

// All real solutions: base + U (hom_X, hom_Y), U real of degree param_degree.
struct SolutionSpace {
  BezoutSolution base;
  Polynomial hom_X, hom_Y;
  int param_degree = 0;
  int x_degree = 0, y_degree = 0;
  std::pair<Polynomial, Polynomial> member(const Polynomial& U) const;
};

SolutionSpace solution_space(const Polynomial& A, const Polynomial& B, const Polynomial& C,
                             int a, int b, int c, int d, const BezoutOptions& opt = {});

// Relative residual of A X - B Y = C.
double bezout_residual(const Polynomial& A, const Polynomial& B, const Polynomial& C,
                       const Polynomial& X, const Polynomial& Y);

}  // namespace whitham
