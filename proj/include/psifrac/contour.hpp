#pragma once

#include <complex>
#include <functional>

namespace psifrac {

using cplx = std::complex<double>;
using ComplexFn = std::function<cplx(cplx)>;

// Prabhakar function E^gamma_{mu,nu}(z) for real z by inverting
// s^{mu*gamma-nu} / (s^mu - z)^gamma at t = 1 on an optimal parabolic
// contour (Garrappa's OPC scheme). Poles are added back as residues when
// gamma == 1; for gamma != 1 the contour passes right of every pole.
// Returns NaN when no admissible contour exists.
double ml_contour(double mu, double nu, double gamma, double z);

struct TalbotResult {
  double value = 0;
  double imag = 0;  // imaginary residue of the full symmetric sum
  bool finite = true;
};

// Fixed-Talbot inversion of F at x > 0 with M nodes. F must be analytic for
// Re(s) > shift; the contour is built for the shifted image F(s + shift).
TalbotResult talbot_invert(const ComplexFn& F, double x, int M, double shift);

}  // namespace psifrac
