#pragma once

// Test-only arbitrary precision reference for the special functions.
// Independent of the library: MPFR arithmetic, plain term-by-term sums with
// working precision sized to the cancellation.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <string>

namespace oracle {

using mp = boost::multiprecision::mpfr_float;

inline unsigned digits_for(double log_growth) {
  return 60u + static_cast<unsigned>(std::max(0.0, log_growth) / std::log(10.0) * 1.1);
}

inline mp rgamma_mp(const mp& x) {
  if (x <= 0 && x == floor(x)) return mp(0);
  return 1 / tgamma(x);
}

// kind: 0 = ML/Prabhakar (gamma), 1 = Wright
inline double series_mp(int kind, double mu_d, double nu_d, double gamma_d, double z_d, double log_growth) {
  mp::default_precision(digits_for(log_growth));
  mp mu(mu_d), nu(nu_d), gamma(gamma_d), z(z_d);
  mp sum = 0, c = 1;
  mp tol = pow(mp(10), -int(mp::default_precision()) + 20);
  int quiet = 0;
  for (int j = 0; j < 2000000; ++j) {
    mp x = mu * j + nu;
    mp term = c * rgamma_mp(x);
    sum += term;
    bool tail = (mu > 0 && x > 3) || (mu < 0 && x < -3) || mu == 0;
    if (tail && abs(term) <= tol * abs(sum) && j > 5) {
      if (++quiet > 20) break;
    } else {
      quiet = 0;
    }
    if (kind == 0)
      c *= z * (gamma + j) / (j + 1);
    else
      c *= z / (j + 1);
    if (z == 0) break;
  }
  double out = static_cast<double>(sum);
  mp::default_precision(50);
  return out;
}

inline double ml3(double mu, double nu, double gamma, double z) {
  return series_mp(0, mu, nu, gamma, z, std::pow(std::fabs(z), 1 / mu) + 5 * gamma);
}

inline double ml2(double mu, double nu, double z) { return ml3(mu, nu, 1.0, z); }

inline double wright(double z, double mu, double nu) {
  double g = std::pow(std::fabs(z), 1 / (1 + mu)) * 2;
  return series_mp(1, mu, nu, 1.0, z, g);
}

// Asymptotic expansion of E_{mu,nu}(z) for large negative z and 0 < mu < 1,
// summed to its smallest term. Used where the series is out of reach.
inline double ml2_asymptotic(double mu_d, double nu_d, double z_d) {
  mp::default_precision(60);
  mp mu(mu_d), nu(nu_d), z(z_d), sum = 0, best = 1e300;
  for (int k = 1; k < 400; ++k) {
    // envelope |z|^-k Gamma(1 - nu + mu k) tracks |term| and is smooth in k
    mp env = pow(abs(z), -k) * tgamma(1 - nu + mu * k);
    if (env > best && k > 3) break;
    best = env;
    sum += -pow(z, -k) * rgamma_mp(nu - mu * k);
  }
  return static_cast<double>(sum);
}

}  // namespace oracle
