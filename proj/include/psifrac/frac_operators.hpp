#pragma once

#include <optional>

#include <Eigen/Core>

#include "psifrac/psi_kernel.hpp"

namespace psifrac {

struct FracOrder {
  double mu = 0.5;
  std::optional<double> nu;  // Hilfer type, present only for Hilfer
  int m = 1;                 // floor(mu) + 1

  static FracOrder of(double mu);
  static FracOrder hilfer(double mu, double nu);
  void validate() const;
};

struct QuadratureSpec {
  int nodes = 24;   // Gauss nodes per panel
  int panels = 2;   // geometric panels toward the singular endpoint
  double atol = 1e-13;
  double rtol = 1e-11;
  void validate() const;
};

struct OperatorValue {
  double value = 0;
  double error = 0;
};

// Operators in the substituted variable u = Psi(t): classical
// Riemann-Liouville calculus on [A, X] applied to g = f o Psi^{-1}.
namespace classical {

OperatorValue integral(double mu, const RealFunction& g, double A, double X, const QuadratureSpec& q = {});
OperatorValue rl_derivative(double mu, const RealFunction& g, double A, double X, const QuadratureSpec& q = {});
OperatorValue caputo_derivative(double mu, const RealFunction& g, double A, double X, const QuadratureSpec& q = {});
OperatorValue hilfer_derivative(double mu, double nu, const RealFunction& g, double A, double X,
                                const QuadratureSpec& q = {});

}  // namespace classical

OperatorValue psi_integral_eval(const PsiFunction& psi, const FracOrder& order, const RealFunction& f, double a,
                                double t, const QuadratureSpec& q = {});
OperatorValue psi_rl_derivative_eval(const PsiFunction& psi, const FracOrder& order, const RealFunction& f, double a,
                                     double t, const QuadratureSpec& q = {});
OperatorValue psi_caputo_derivative_eval(const PsiFunction& psi, const FracOrder& order, const RealFunction& f,
                                         double a, double t, const QuadratureSpec& q = {});
OperatorValue psi_hilfer_derivative_eval(const PsiFunction& psi, const FracOrder& order, const RealFunction& f,
                                         double a, double t, const QuadratureSpec& q = {});

inline double psi_integral(const PsiFunction& psi, const FracOrder& order, const RealFunction& f, double a, double t,
                           const QuadratureSpec& q = {}) {
  return psi_integral_eval(psi, order, f, a, t, q).value;
}
inline double psi_rl_derivative(const PsiFunction& psi, const FracOrder& order, const RealFunction& f, double a,
                                double t, const QuadratureSpec& q = {}) {
  return psi_rl_derivative_eval(psi, order, f, a, t, q).value;
}
inline double psi_caputo_derivative(const PsiFunction& psi, const FracOrder& order, const RealFunction& f, double a,
                                    double t, const QuadratureSpec& q = {}) {
  return psi_caputo_derivative_eval(psi, order, f, a, t, q).value;
}
inline double psi_hilfer_derivative(const PsiFunction& psi, const FracOrder& order, const RealFunction& f, double a,
                                    double t, const QuadratureSpec& q = {}) {
  return psi_hilfer_derivative_eval(psi, order, f, a, t, q).value;
}

enum class OperatorKind { Integral, RiemannLiouville, Caputo, Hilfer };

// Grid evaluation of any of the four operators.
Eigen::VectorXd apply_operator(OperatorKind kind, const PsiFunction& psi, const FracOrder& order,
                               const RealFunction& f, double a, const Eigen::VectorXd& ts,
                               const QuadratureSpec& q = {});

// The operator applied pointwise, as a RealFunction of t (base point a).
RealFunction operator_function(OperatorKind kind, const PsiFunction& psi, const FracOrder& order,
                               const RealFunction& f, double a, const QuadratureSpec& q = {});

}  // namespace psifrac
