#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psifrac/contour.hpp"
#include "psifrac/frac_operators.hpp"
#include "psifrac/psi_kernel.hpp"

namespace psifrac {

struct TransformImage {
  ComplexFn F;
  double abscissa = 0;  // F analytic for Re(s) > abscissa
  std::string label;
  cplx operator()(cplx s) const { return F(s); }
};

// |f(t)| <= M exp(c Psi(t)) for t > T
struct ExponentialOrder {
  double c = 0;
  double M = 1;
  double T = 0;
};

struct ContourSpec {
  int nodes = 32;
  double shift = 0.5;  // distance kept right of the image abscissa
};

struct ComplexValue {
  cplx value;
  double error = 0;
};

struct InverseValue {
  double value = 0;
  double error = 0;         // change against a 16-node finer contour
  double imag_residue = 0;  // imaginary part of the contour sum
};

// Classical Laplace transform of g on [0, inf), truncated by the growth bound.
ComplexValue laplace_u(const RealFn& g, cplx s, const ExponentialOrder& order, const QuadratureSpec& q = {});

ComplexValue glt_forward_eval(const PsiFunction& psi, const RealFunction& f, cplx s, const ExponentialOrder& order,
                              const QuadratureSpec& q = {});
inline cplx glt_forward(const PsiFunction& psi, const RealFunction& f, cplx s, const ExponentialOrder& order,
                        const QuadratureSpec& q = {}) {
  return glt_forward_eval(psi, f, s, order, q).value;
}

InverseValue glt_inverse_eval(const PsiFunction& psi, const TransformImage& image, double t,
                              const ContourSpec& contour = {});
inline double glt_inverse(const PsiFunction& psi, const TransformImage& image, double t,
                          const ContourSpec& contour = {}) {
  return glt_inverse_eval(psi, image, t, contour).value;
}

// Classical convolution (F * G)(X) = int_0^X F(X - u) G(u) du.
OperatorValue convolve_u(const RealFn& F, const RealFn& G, double X, const QuadratureSpec& q = {});

OperatorValue psi_convolve_eval(const PsiFunction& psi, const RealFunction& f, const RealFunction& g, double t,
                                const QuadratureSpec& q = {});
inline double psi_convolve(const PsiFunction& psi, const RealFunction& f, const RealFunction& g, double t,
                           const QuadratureSpec& q = {}) {
  return psi_convolve_eval(psi, f, g, t, q).value;
}

// Parameters for reference_image. Operator kinds read `base` and `initial`:
//   rl-derivative-of:     initial[i] = (I^{m-i-mu} f)(0)
//   caputo-derivative-of: initial[i] = (D^i f)(0)
//   hilfer-derivative-of: initial[i] = (I^{(1-nu)(m-mu)-i} f)(0), nu = type
struct ImageParams {
  double mu = 1;
  double nu = 1;
  double gamma = 1;
  double lambda = 0;
  double a = 0;
  double type = 0;  // Hilfer type
  std::optional<TransformImage> base;
  std::vector<double> initial;
};

// kinds: power, exp, ml2, ml3, rl-integral-of, rl-derivative-of,
// caputo-derivative-of, hilfer-derivative-of
TransformImage reference_image(std::string_view kind, const ImageParams& p);

// The time-domain functions behind the closed-form table entries, as
// functions of t through Psi (power, exp, ml2, ml3).
RealFunction reference_function(std::string_view kind, const ImageParams& p, const PsiFunction& psi);

ExponentialOrder estimate_exponential_order(const PsiFunction& psi, const RealFunction& f, double horizon);

}  // namespace psifrac
