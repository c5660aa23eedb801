#pragma once

#include <string>

#include <Eigen/Core>

namespace psifrac {

struct MlParams {
  double mu = 1;
  double nu = 1;
  double gamma = 1;
};

struct WrightParams {
  double mu = 0;
  double nu = 1;
};

// Value with an error estimate and the scheme that produced it
// ("series", "series-f128", "contour").
struct SpecialValue {
  double value = 0;
  double error = 0;
  std::string method;
};

inline constexpr double kSpecialAtol = 1e-12;
inline constexpr double kSpecialRtol = 1e-12;
// |z| bound of the documented accuracy contract (for mu >= 0.3)
inline constexpr double kSupportedAbsZ = 50.0;

// 1/Gamma(x), zero at the poles of Gamma.
double rgamma(double x);

// atol > 0 accepts any result whose error estimate is below it, for callers
// that only need one term of a larger sum to absolute accuracy.
SpecialValue ml3_eval(double mu, double nu, double gamma, double z, double atol = 0);
// Series only. For z < 0 the terms peak near exp((1+mu) (|z| |mu|^-mu)^{1/(1+mu)})
// before cancelling; once that exceeds what quad precision absorbs the call
// raises AccuracyLoss (mu = -0.75: |z| up to about 4.5).
SpecialValue wright_eval(double z, double mu, double nu);

inline double ml3(double mu, double nu, double gamma, double z) { return ml3_eval(mu, nu, gamma, z).value; }
inline double ml3(const MlParams& p, double z) { return ml3(p.mu, p.nu, p.gamma, z); }
inline double ml2(double mu, double nu, double z) { return ml3(mu, nu, 1.0, z); }
inline double ml1(double mu, double z) { return ml2(mu, 1.0, z); }
inline double wright(double z, double mu, double nu) { return wright_eval(z, mu, nu).value; }
inline double wright(const WrightParams& p, double z) { return wright(z, p.mu, p.nu); }

template <class Derived>
Eigen::ArrayXd ml2(double mu, double nu, const Eigen::ArrayBase<Derived>& z) {
  return z.derived().unaryExpr([=](double v) { return ml2(mu, nu, v); }).eval();
}

template <class Derived>
Eigen::ArrayXd ml3(double mu, double nu, double gamma, const Eigen::ArrayBase<Derived>& z) {
  return z.derived().unaryExpr([=](double v) { return ml3(mu, nu, gamma, v); }).eval();
}

template <class Derived>
Eigen::ArrayXd wright(const Eigen::ArrayBase<Derived>& z, double mu, double nu) {
  return z.derived().unaryExpr([=](double v) { return wright(v, mu, nu); }).eval();
}

}  // namespace psifrac
