#pragma once

#include <Eigen/Dense>

namespace harmonica {

/// Nodes and weights of an n-point Gauss rule.
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss-Jacobi rule on [-1, 1] for the weight (1 - t)^a (1 + t)^b, a, b > -1,
/// computed by Golub-Welsch from the three-term recurrence.
QuadratureRule gauss_jacobi(int n, double a, double b);

/// Gauss-Legendre rule on [lo, hi].
QuadratureRule gauss_legendre(int n, double lo, double hi);

/// Gauss-Jacobi rule on [0, 1] for the weight x^p (1 - x)^q.
QuadratureRule gauss_jacobi_unit(int n, double p, double q);

}  // namespace harmonica
