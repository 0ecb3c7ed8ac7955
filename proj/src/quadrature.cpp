#include "harmonica/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace harmonica {

QuadratureRule gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be positive");
  if (!(a > -1.0) || !(b > -1.0)) throw std::invalid_argument("gauss_jacobi: a, b must exceed -1");

  const double ab = a + b;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    diag[k] = (k == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    // k = 1 is written with the (k + a + b) factor cancelled; it vanishes in
    // the denominator when a + b = -1.
    const double beta = (k == 1) ? 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))
                                 : 4.0 * k * (k + a) * (k + b) * (k + ab) /
                                       (s * s * (s + 1.0) * (s - 1.0));
    off[k - 1] = std::sqrt(beta);
  }

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  jacobi.diagonal() = diag;
  if (n > 1) {
    jacobi.diagonal(1) = off;
    jacobi.diagonal(-1) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);

  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
  QuadratureRule rule;
  rule.nodes = eig.eigenvalues();
  rule.weights = mu0 * eig.eigenvectors().row(0).transpose().array().square();
  return rule;
}

QuadratureRule gauss_legendre(int n, double lo, double hi) {
  QuadratureRule r = gauss_jacobi(n, 0.0, 0.0);
  const double half = 0.5 * (hi - lo);
  r.nodes = (r.nodes.array() + 1.0) * half + lo;
  r.weights *= half;
  return r;
}

QuadratureRule gauss_jacobi_unit(int n, double p, double q) {
  // x = (1 + t) / 2: x^p (1 - x)^q dx = 2^{-(p + q + 1)} (1 + t)^p (1 - t)^q dt.
  QuadratureRule r = gauss_jacobi(n, q, p);
  r.nodes = 0.5 * (r.nodes.array() + 1.0);
  r.weights *= std::pow(2.0, -(p + q + 1.0));
  return r;
}

}  // namespace harmonica
