#include "psifrac/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "psifrac/errors.hpp"
#include "psifrac/quadrature.hpp"
#include "psifrac/special_functions.hpp"

namespace psifrac {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_eligible(const PsiFunction& psi) {
  require(psi.transform_eligible(), ErrorCode::TransformIneligible,
          "Psi '" + psi.label + "' does not satisfy Psi(0) = 0 on [0, b]");
}

}  // namespace

ComplexValue laplace_u(const RealFn& g, cplx s, const ExponentialOrder& order, const QuadratureSpec& q) {
  q.validate();
  const double sigma = s.real() - order.c;
  require(sigma > 0, ErrorCode::AbscissaViolation,
          "Re(s) = " + num(s.real()) + " must exceed the growth rate c = " + num(order.c));
  // tail  M e^{-sigma U} / sigma <= atol
  const double U = std::max(order.T, std::log(std::max(order.M, 1e-300) / (q.atol * sigma)) / sigma);
  const double w = std::min(1.0, 4.0 / std::abs(s));
  ComplexValue out;
  if (U <= 0) return out;

  const double first = std::min(U, w);
  auto re = quad::tanh_sinh([&](double u, double, double) { return (std::exp(-s * u) * g(u)).real(); }, 0, first,
                            q.atol / 4, q.rtol / 4);
  auto im = quad::tanh_sinh([&](double u, double, double) { return (std::exp(-s * u) * g(u)).imag(); }, 0, first,
                            q.atol / 4, q.rtol / 4);
  cplx total(re.value, im.value);
  double err = re.error + im.error;
  const int n = std::max(q.nodes, 16);
  for (double lo = first; lo < U; lo += w) {
    const double hi = std::min(U, lo + w);
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    auto panel = [&](int nn) {
      const auto& r = quad::gauss_legendre(nn);
      cplx acc = 0;
      for (int i = 0; i < r.x.size(); ++i) {
        const double u = c + h * r.x(i);
        acc += r.w(i) * std::exp(-s * u) * g(u);
      }
      return h * acc;
    };
    const cplx a = panel(n), b = panel(n + 8);
    total += b;
    err += std::abs(b - a);
  }
  out.value = total;
  out.error = err;
  if (!(err <= q.atol * 10 + q.rtol * std::abs(total)) || !std::isfinite(total.real()) ||
      !std::isfinite(total.imag()))
    fail(ErrorCode::ToleranceNotMet, "forward transform: estimated error " + num(err));
  return out;
}

ComplexValue glt_forward_eval(const PsiFunction& psi, const RealFunction& f, cplx s, const ExponentialOrder& order,
                              const QuadratureSpec& q) {
  require_eligible(psi);
  auto g = conjugate_out(psi, f);
  ExponentialOrder o = order;
  o.T = std::isfinite(order.T) && order.T > 0 ? psi.psi(std::min(order.T, psi.domain.hi)) : 0.0;
  return laplace_u(g.f, s, o, q);
}

InverseValue glt_inverse_eval(const PsiFunction& psi, const TransformImage& image, double t,
                              const ContourSpec& contour) {
  require(std::isfinite(image.abscissa), ErrorCode::AbscissaViolation, "image abscissa must be finite");
  require(contour.nodes >= 4, ErrorCode::InvalidParameter, "contour needs at least 4 nodes");
  require(psi.domain.contains(t), ErrorCode::DomainMismatch, "t outside the Psi domain");
  require_eligible(psi);
  const double x = psi.psi(t);
  require(x > 0, ErrorCode::DomainMismatch, "inversion needs Psi(t) > 0");
  // the sum carries a factor e^{shift x}; keep shift x bounded for large x
  const double shift = image.abscissa + contour.shift / std::max(1.0, x);
  auto coarse = talbot_invert(image.F, x, contour.nodes, shift);
  auto fine = talbot_invert(image.F, x, contour.nodes + 16, shift);
  InverseValue out;
  out.value = coarse.value;
  out.imag_residue = coarse.imag;
  out.error = std::fabs(fine.value - coarse.value);
  if (!coarse.finite || !fine.finite)
    fail(ErrorCode::ContourFailure, "contour sum overflowed at Psi(t) = " + num(x));
  // absolute floor: a real image summed symmetrically leaves only rounding
  if (std::fabs(out.imag_residue) > 1e-6 * std::fabs(out.value) + 1e-12)
    fail(ErrorCode::ContourFailure, "imaginary residue " + num(out.imag_residue) + " exceeds the real-value bound");
  if (!(out.error <= 1e-6 * std::max(1.0, std::fabs(out.value))))
    fail(ErrorCode::ContourFailure, "contour refinement changed the value by " + num(out.error));
  return out;
}

OperatorValue convolve_u(const RealFn& F, const RealFn& G, double X, const QuadratureSpec& q) {
  q.validate();
  OperatorValue out;
  if (X <= 0) return out;
  auto est = quad::tanh_sinh([&](double u, double, double to_b) { return F(to_b) * G(u); }, 0, X, q.atol / 2,
                             q.rtol / 2, 10);
  out.value = est.value;
  out.error = est.error;
  if (!(out.error <= q.atol + q.rtol * std::fabs(out.value)) || !std::isfinite(out.value))
    fail(ErrorCode::ToleranceNotMet, "convolution: estimated error " + num(out.error));
  return out;
}

OperatorValue psi_convolve_eval(const PsiFunction& psi, const RealFunction& f, const RealFunction& g, double t,
                                const QuadratureSpec& q) {
  require_eligible(psi);
  require(t >= 0 && psi.domain.contains(t), ErrorCode::DomainMismatch, "t outside the Psi domain");
  auto F = conjugate_out(psi, f);
  auto G = conjugate_out(psi, g);
  return convolve_u(F.f, G.f, psi.psi(t), q);
}

TransformImage reference_image(std::string_view kind, const ImageParams& p) {
  TransformImage img;
  const double mu = p.mu, nu = p.nu, gam = p.gamma, lam = p.lambda;
  auto need_base = [&]() -> const TransformImage& {
    require(p.base.has_value(), ErrorCode::InvalidParameter, std::string(kind) + " needs a base image");
    return *p.base;
  };
  if (kind == "power") {
    require(mu > -1, ErrorCode::InvalidParameter, "power image needs mu > -1");
    const double g = std::tgamma(mu + 1);
    img.F = [g, mu](cplx s) { return g / std::pow(s, mu + 1); };
    img.abscissa = 0;
    img.label = "Gamma(mu+1)/s^(mu+1)";
  } else if (kind == "exp") {
    const double a = p.a;
    img.F = [a](cplx s) { return 1.0 / (s - a); };
    img.abscissa = a;
    img.label = "1/(s-a)";
  } else if (kind == "ml2") {
    require(mu > 0, ErrorCode::InvalidParameter, "ml2 image needs mu > 0");
    img.F = [mu, lam](cplx s) { return std::pow(s, mu - 1) / (std::pow(s, mu) - lam); };
    img.abscissa = std::pow(std::fabs(lam), 1 / mu);
    img.label = "s^(mu-1)/(s^mu-lambda)";
  } else if (kind == "ml3") {
    require(mu > 0 && gam > 0, ErrorCode::InvalidParameter, "ml3 image needs mu > 0, gamma > 0");
    img.F = [mu, nu, gam, lam](cplx s) { return std::pow(s, mu * gam - nu) / std::pow(std::pow(s, mu) - lam, gam); };
    img.abscissa = std::pow(std::fabs(lam), 1 / mu);
    img.label = "s^(mu*gamma-nu)/(s^mu-lambda)^gamma";
  } else if (kind == "rl-integral-of") {
    const auto base = need_base();
    require(mu > 0, ErrorCode::InvalidParameter, "integral order must be > 0");
    img.F = [base, mu](cplx s) { return std::pow(s, -mu) * base.F(s); };
    img.abscissa = base.abscissa;
    img.label = "s^-mu F";
  } else if (kind == "rl-derivative-of" || kind == "caputo-derivative-of" || kind == "hilfer-derivative-of") {
    const auto base = need_base();
    require(mu > 0, ErrorCode::InvalidParameter, "derivative order must be > 0");
    const int m = static_cast<int>(std::floor(mu)) + 1;
    require(static_cast<int>(p.initial.size()) == m, ErrorCode::InvalidParameter,
            std::string(kind) + " needs m = floor(mu)+1 initial values");
    std::vector<double> pw(m);
    if (kind == "rl-derivative-of") {
      for (int i = 0; i < m; ++i) pw[i] = m - i - 1;
    } else if (kind == "caputo-derivative-of") {
      for (int i = 0; i < m; ++i) pw[i] = mu - i - 1;
    } else {
      require(p.type >= 0 && p.type <= 1, ErrorCode::InvalidParameter, "Hilfer type must lie in [0, 1]");
      for (int i = 0; i < m; ++i) pw[i] = m * (1 - p.type) + mu * p.type - i - 1;
    }
    const auto init = p.initial;
    img.F = [base, mu, pw, init](cplx s) {
      cplx v = std::pow(s, mu) * base.F(s);
      for (size_t i = 0; i < init.size(); ++i)
        if (init[i] != 0) v -= std::pow(s, pw[i]) * init[i];
      return v;
    };
    img.abscissa = base.abscissa;
    img.label = std::string(kind);
  } else {
    fail(ErrorCode::UnknownKind, "unknown image kind '" + std::string(kind) + "'");
  }
  return img;
}

RealFunction reference_function(std::string_view kind, const ImageParams& p, const PsiFunction& psi) {
  const double mu = p.mu, nu = p.nu, gam = p.gamma, lam = p.lambda, a = p.a;
  auto P = psi.psi;
  if (kind == "power") return make_function([P, mu](double t) { return std::pow(P(t), mu); }, "Psi^mu");
  if (kind == "exp") return make_function([P, a](double t) { return std::exp(a * P(t)); }, "exp(a Psi)");
  if (kind == "ml2")
    return make_function([P, mu, lam](double t) { return ml2(mu, 1.0, lam * std::pow(P(t), mu)); },
                         "E_mu(lambda Psi^mu)");
  if (kind == "ml3")
    return make_function(
        [P, mu, nu, gam, lam](double t) {
          const double x = P(t);
          return std::pow(x, nu - 1) * ml3(mu, nu, gam, lam * std::pow(x, mu));
        },
        "Psi^(nu-1) E^gamma_mu,nu(lambda Psi^mu)");
  fail(ErrorCode::UnknownKind, "no time-domain reference for '" + std::string(kind) + "'");
}

ExponentialOrder estimate_exponential_order(const PsiFunction& psi, const RealFunction& f, double horizon) {
  require(horizon > 0 && std::isfinite(horizon), ErrorCode::InvalidParameter, "horizon must be > 0");
  const int n = 64;
  std::vector<double> x(n), y(n);
  double running = 0;
  const double t0 = std::max(horizon * 1e-2, psi.domain.lo);
  for (int k = 0; k < n; ++k) {
    const double t = t0 * std::pow(horizon / t0, static_cast<double>(k) / (n - 1));
    x[k] = psi.psi(t);
    const double v = std::fabs(f(t));
    require(std::isfinite(v), ErrorCode::UnboundedGrowth, "f is not finite at t=" + num(t));
    running = std::max(running, v);
    y[k] = std::log(std::max(running, 1e-300));
  }
  auto slope = [&](int from, int to) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int cnt = to - from;
    for (int k = from; k < to; ++k) {
      sx += x[k];
      sy += y[k];
      sxx += x[k] * x[k];
      sxy += x[k] * y[k];
    }
    const double den = cnt * sxx - sx * sx;
    return den > 0 ? (cnt * sxy - sx * sy) / den : 0.0;
  };
  const double fit = slope(n / 2, n);
  const double lower = slope(n / 2, 3 * n / 4), upper = slope(3 * n / 4, n);
  if (upper > 2 * std::fabs(lower) + 1)
    fail(ErrorCode::UnboundedGrowth, "log|f| grows faster than linearly in Psi (slopes " + num(lower) + ", " +
                                         num(upper) + ")");
  ExponentialOrder out;
  out.c = std::max(fit, 0.0) + 0.01;
  out.T = t0;
  double M = 0;
  for (int k = 0; k < n; ++k) M = std::max(M, std::exp(y[k] - out.c * x[k]));
  out.M = std::max(M, 1e-300);
  return out;
}

}  // namespace psifrac
