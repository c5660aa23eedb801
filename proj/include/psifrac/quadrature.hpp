#pragma once

// Internal quadrature rules: Gauss-Jacobi via Golub-Welsch, Gauss-Legendre,
// and a double-exponential (tanh-sinh) rule for endpoint singularities.

#include <functional>

#include <Eigen/Core>

namespace psifrac::quad {

struct Rule {
  Eigen::VectorXd x;  // nodes on [-1, 1]
  Eigen::VectorXd w;
};

// Weight (1-x)^alpha (1+x)^beta on [-1, 1], alpha, beta > -1.
// Cached per thread.
const Rule& gauss_jacobi(int n, double alpha, double beta);
inline const Rule& gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

// Integrand sees (u, u - a, b - u) with the two distances computed without
// cancellation, so weak endpoint singularities can be written exactly.
using EndpointFn = std::function<double(double u, double from_a, double to_b)>;

struct Estimate {
  double value = 0;
  double error = 0;
  int evaluations = 0;
  int level = 0;  // tanh-sinh level reached
};

// Adaptive in the step h = 2^-level; fixed_level >= 0 pins the level (a
// deterministic rule, as needed when finite-differencing the result).
Estimate tanh_sinh(const EndpointFn& f, double a, double b, double atol, double rtol, int max_level = 8,
                   int fixed_level = -1);

// Composite Gauss-Legendre over [a, b] with error from an n+8 comparison.
Estimate legendre(const std::function<double(double)>& f, double a, double b, int n);

}  // namespace psifrac::quad
