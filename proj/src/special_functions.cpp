#include "psifrac/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "psifrac/contour.hpp"
#include "psifrac/detail/series.hpp"
#include "psifrac/errors.hpp"

namespace psifrac {

namespace {

using detail::SeriesFamily;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double contract(double value) { return std::max(kSpecialAtol, kSpecialRtol * std::fabs(value)); }

// Rough log of sum |terms|; large values mean heavy cancellation for z < 0.
double log_growth(SeriesFamily fam, double mu, double z) {
  double a = std::fabs(z);
  if (a == 0) return 0;
  if (fam == SeriesFamily::Wright) {
    if (mu <= -1) return HUGE_VAL;
    // Stirling peak of |z|^j / (j! |Gamma(mu j + nu)|)
    return (1 + mu) * std::pow(a * std::pow(std::fabs(mu), -mu), 1 / (1 + mu));
  }
  return std::pow(a, 1 / mu);
}

int term_budget(SeriesFamily fam, double mu, double gamma, double z) {
  double a = std::fabs(z);
  double lg = log_growth(fam, mu, z);
  double slope = fam == SeriesFamily::Wright ? 1 + mu : mu;
  double est = 3 * (lg + std::log1p(a)) / std::max(slope, 1e-3) + 4 * std::max(gamma, 1.0) + 400;
  return static_cast<int>(std::min(est, 400000.0));
}

SpecialValue evaluate(SeriesFamily fam, double mu, double nu, double gamma, double z, double atol) {
  const int budget = term_budget(fam, mu, gamma, z);
  const double growth = log_growth(fam, mu, z);
  // Cancellation beyond what quad precision can absorb: skip the series.
  const bool hopeless = fam != SeriesFamily::Wright && z < 0 && growth > 30.0;

  if (!hopeless) {
    auto d = detail::sum_series<double>(fam, mu, nu, gamma, z, budget);
    if (d.converged && !d.overflow && std::isfinite(d.sum) &&
        (d.error <= std::max(2e-13 * std::fabs(d.sum), atol) || d.error <= 1e-300))
      return {d.sum, d.error, "series"};
    if (d.overflow && z > 0)
      fail(ErrorCode::AccuracyLoss, "result overflows double at z=" + fmt(z));

    auto q = detail::sum_series<__float128>(fam, mu, nu, gamma, z, budget);
    if (q.converged && !q.overflow) {
      double v = static_cast<double>(q.sum);
      double e = static_cast<double>(q.error) + std::fabs(v) * 1.2e-16;
      if (!std::isfinite(v)) fail(ErrorCode::AccuracyLoss, "result overflows double at z=" + fmt(z));
      if (e <= std::max(contract(v), atol)) return {v, e, "series-f128"};
    }
  }

  if (fam != SeriesFamily::Wright && mu < 2) {
    double v = ml_contour(mu, nu, gamma, z);
    if (std::isfinite(v)) return {v, 1e-14 * std::max(1.0, std::fabs(v)), "contour"};
  }
  fail(ErrorCode::AccuracyLoss, "no convergent scheme for z=" + fmt(z) + " mu=" + fmt(mu) + " nu=" + fmt(nu));
}

}  // namespace

double rgamma(double x) { return detail::rgamma_direct(x); }

SpecialValue ml3_eval(double mu, double nu, double gamma, double z, double atol) {
  require(mu > 0 && std::isfinite(mu), ErrorCode::InvalidParameter, "Mittag-Leffler order mu must be > 0");
  require(gamma > 0 && std::isfinite(gamma), ErrorCode::InvalidParameter, "Prabhakar gamma must be > 0");
  require(std::isfinite(nu) && std::isfinite(z), ErrorCode::InvalidParameter, "non-finite argument");
  const auto fam = gamma == 1.0 ? SeriesFamily::MittagLeffler : SeriesFamily::Prabhakar;
  return evaluate(fam, mu, nu, gamma, z, atol);
}

SpecialValue wright_eval(double z, double mu, double nu) {
  require(mu > -1 && std::isfinite(mu), ErrorCode::InvalidParameter, "Wright parameter mu must be > -1");
  require(std::isfinite(nu) && std::isfinite(z), ErrorCode::InvalidParameter, "non-finite argument");
  return evaluate(SeriesFamily::Wright, mu, nu, 1.0, z, 0.0);
}

}  // namespace psifrac
