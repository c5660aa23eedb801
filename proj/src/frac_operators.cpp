#include "psifrac/frac_operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "psifrac/errors.hpp"
#include "psifrac/quadrature.hpp"
#include "psifrac/special_functions.hpp"

namespace psifrac {

FracOrder FracOrder::of(double mu) {
  FracOrder o;
  o.mu = mu;
  o.m = static_cast<int>(std::floor(mu)) + 1;
  o.validate();
  return o;
}

FracOrder FracOrder::hilfer(double mu, double nu) {
  require(mu < 1, ErrorCode::InvalidParameter, "Hilfer orders are supported for 0 < mu < 1");
  FracOrder o = of(mu);
  o.nu = nu;
  o.validate();
  return o;
}

void FracOrder::validate() const {
  require(mu > 0 && std::isfinite(mu), ErrorCode::InvalidParameter, "order mu must be > 0");
  require(m == static_cast<int>(std::floor(mu)) + 1, ErrorCode::InvalidParameter, "m must equal floor(mu) + 1");
  if (nu) require(*nu >= 0 && *nu <= 1, ErrorCode::InvalidParameter, "Hilfer type nu must lie in [0, 1]");
}

void QuadratureSpec::validate() const {
  require(nodes >= 2, ErrorCode::InvalidParameter, "quadrature needs at least 2 nodes");
  require(panels >= 1, ErrorCode::InvalidParameter, "quadrature needs at least 1 panel");
  require(atol > 0 && rtol > 0, ErrorCode::InvalidParameter, "tolerances must be positive");
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Frozen choices so that repeated evaluations are smooth in X.
struct Plan {
  int ts_level = -1;
  int nodes = 0;
};

constexpr int kMaxNodes = 128;

// int_A^X (X-u)^{mu-1} g(u) du, without the 1/Gamma(mu) factor.
OperatorValue kernel_integral(double mu, const RealFn& g, double A, double X, const QuadratureSpec& q, Plan* plan) {
  OperatorValue out;
  const double L = X - A;
  if (L <= 0) return out;
  const int P = q.panels;
  const double b1 = X - L / 2;
  int nodes = plan && plan->nodes > 0 ? plan->nodes : q.nodes;

  // left panel: endpoint behaviour of g at A is unknown, use tanh-sinh
  const double gap = X - b1;
  auto left = [&](double u, double, double to_b) { return std::pow(gap + to_b, mu - 1) * g(u); };
  const double target = q.atol / 4;
  auto ts = quad::tanh_sinh(left, A, b1, target, q.rtol / 4, 10, plan ? plan->ts_level : -1);

  for (;;) {
    double value = ts.value, error = ts.error;
    for (int k = 1; k < P; ++k) {
      const double lo = X - L * std::ldexp(1.0, -k), hi = X - L * std::ldexp(1.0, -(k + 1));
      auto est = quad::legendre([&](double u) { return std::pow(X - u, mu - 1) * g(u); }, lo, hi, nodes);
      value += est.value;
      error += est.error;
    }
    // last panel against the Jacobi weight (X-u)^{mu-1}
    const double lo = X - L * std::ldexp(1.0, -P);
    const double h = (X - lo) / 2, c = lo + h;
    auto jac = [&](int n) {
      const auto& r = quad::gauss_jacobi(n, mu - 1, 0.0);
      double s = 0;
      for (int i = 0; i < r.x.size(); ++i) s += r.w(i) * g(c + h * r.x(i));
      return std::pow(h, mu) * s;
    };
    const double j_lo = jac(nodes), j_hi = jac(nodes + 8);
    value += j_hi;
    error += std::fabs(j_hi - j_lo);

    out.value = value;
    out.error = error;
    const bool fixed = plan && plan->nodes > 0;
    if (fixed || error <= q.atol + q.rtol * std::fabs(value) || nodes * 2 > kMaxNodes) break;
    nodes *= 2;
  }
  if (plan && plan->nodes <= 0) {
    plan->nodes = nodes;
    plan->ts_level = ts.level;
  }
  return out;
}

void check_interval(const RealFunction& g, double A, double X) {
  require(std::isfinite(A) && std::isfinite(X), ErrorCode::DomainMismatch, "operators need a finite base point");
  require(A <= X, ErrorCode::DomainMismatch, "base point must not exceed the evaluation point");
  require(A >= g.domain.lo && X <= g.domain.hi, ErrorCode::DomainMismatch,
          "interval [" + num(A) + ", " + num(X) + "] outside the function domain");
}

OperatorValue scaled_integral(double mu, const RealFn& g, double A, double X, const QuadratureSpec& q, Plan* plan) {
  auto raw = kernel_integral(mu, g, A, X, q, plan);
  const double s = rgamma(mu);
  return {raw.value * s, raw.error * std::fabs(s)};
}

void check_tolerance(const OperatorValue& v, const QuadratureSpec& q, const char* what) {
  if (!(v.error <= q.atol + q.rtol * std::fabs(v.value)) || !std::isfinite(v.value))
    fail(ErrorCode::ToleranceNotMet, std::string(what) + ": estimated error " + num(v.error) + " for value " +
                                         num(v.value));
}

// Derivative of order m (1 or 2) of h at X, central Richardson differences in
// l = log(X - A); behaves well both far from and close to the base point.
OperatorValue log_fd(const std::function<double(double)>& h, double A, double X, int m) {
  const double x = X - A;
  const double delta0 = 1e-3 * std::max(1.0, std::fabs(X));
  const double eta0 = std::min(0.1, delta0 / x);
  const double h0 = h(X);
  double d1[3], d2[3];
  for (int k = 0; k < 3; ++k) {
    const double e = eta0 * std::ldexp(1.0, -k);
    const double hp = h(A + x * std::exp(e)), hm = h(A + x * std::exp(-e));
    d1[k] = (hp - hm) / (2 * e);
    d2[k] = (hp - 2 * h0 + hm) / (e * e);
  }
  auto rich = [](const double* d, double& err) {
    const double r0 = (4 * d[1] - d[0]) / 3, r1 = (4 * d[2] - d[1]) / 3;
    const double r = (16 * r1 - r0) / 15;
    err = std::fabs(r - r1);
    return r;
  };
  double e1, e2;
  const double D1 = rich(d1, e1);
  if (m == 1) return {D1 / x, e1 / x};
  const double D2 = rich(d2, e2);
  return {(D2 - D1) / (x * x), (e1 + e2) / (x * x)};
}

void check_smooth(const OperatorValue& v, const char* what) {
  if (!std::isfinite(v.value) || v.error > 1e-6 * std::max(1.0, std::fabs(v.value)))
    fail(ErrorCode::NeedsSmoothness, std::string(what) + ": finite differences disagree by " + num(v.error));
}

// g^{(k)} at the base point, taken just inside when Psi' is singular there.
// A genuine singularity (g ~ u^-p) shows up as two nudges disagreeing.
std::optional<double> endpoint_derivative(const RealFunction& g, int k, double A, double L) {
  const double v = g.derivative(k, A);
  if (std::isfinite(v)) return v;
  const double near = g.derivative(k, A + 1e-12 * L), far = g.derivative(k, A + 1e-10 * L);
  if (!std::isfinite(near) || !std::isfinite(far)) return std::nullopt;
  if (std::fabs(near - far) > 1e-6 * std::max(1.0, std::fabs(near))) return std::nullopt;
  return near;
}

void require_derivative_order(double mu) {
  require(mu > 0 && mu < 2, ErrorCode::InvalidParameter, "derivatives are supported for 0 < mu < 2");
}

OperatorValue rl_numeric(double mu, int m, const RealFunction& g, double A, double X, const QuadratureSpec& q) {
  Plan plan;
  const double beta = m - mu;
  auto center = scaled_integral(beta, g.f, A, X, q, &plan);
  check_tolerance(center, q, "RL inner integral");
  auto h = [&](double Xp) { return scaled_integral(beta, g.f, A, Xp, q, &plan).value; };
  auto d = log_fd(h, A, X, m);
  check_smooth(d, "RL derivative");
  return d;
}

// g'(A) from one-sided second-order differences, Richardson over four halvings
OperatorValue endpoint_slope(const RealFunction& g, double A, double L, double gA) {
  const double d0 = 0.02 * std::min(1.0, L);
  double r[4];
  for (int k = 0; k < 4; ++k) {
    const double d = d0 * std::ldexp(1.0, -k);
    r[k] = (-3 * gA + 4 * g.f(A + d) - g.f(A + 2 * d)) / (2 * d);
  }
  // error terms d^2, d^3, d^4
  double prev = 0;
  for (int p = 2; p <= 4; ++p) {
    const double f = std::ldexp(1.0, p);
    for (int k = 0; k + p - 1 < 4; ++k) r[k] = (f * r[k + 1] - r[k]) / (f - 1);
    if (p == 3) prev = r[1];
  }
  return {r[0], std::fabs(r[0] - prev)};
}

// g^{(m)} by differences, for integrands of the Caputo operator
RealFn numeric_derivative(const RealFunction& g, double A, int m) {
  auto gf = g.f;
  return [gf, A, m](double u) {
    if (u <= A) return 0.0;
    return log_fd(gf, A, u, m).value;
  };
}

}  // namespace

namespace classical {

OperatorValue integral(double mu, const RealFunction& g, double A, double X, const QuadratureSpec& q) {
  q.validate();
  require(mu > 0 && std::isfinite(mu), ErrorCode::InvalidParameter, "order mu must be > 0");
  check_interval(g, A, X);
  auto v = scaled_integral(mu, g.f, A, X, q, nullptr);
  check_tolerance(v, q, "fractional integral");
  return v;
}

OperatorValue rl_derivative(double mu, const RealFunction& g, double A, double X, const QuadratureSpec& q) {
  q.validate();
  require_derivative_order(mu);
  check_interval(g, A, X);
  require(X > A, ErrorCode::DomainMismatch, "derivative needs t > a");
  const int m = static_cast<int>(std::floor(mu)) + 1;
  const double L = X - A;
  if (g.known_derivatives() >= m) {
    std::vector<double> ends;
    for (int k = 0; k < m; ++k) {
      auto v = endpoint_derivative(g, k, A, L);
      if (!v) break;
      ends.push_back(*v);
    }
    if (static_cast<int>(ends.size()) == m) {
      OperatorValue out;
      if (m - mu > 0) {
        out = scaled_integral(m - mu, g.derivatives[m - 1], A, X, q, nullptr);
        check_tolerance(out, q, "RL derivative");
      }
      for (int k = 0; k < m; ++k) out.value += ends[k] * std::pow(L, k - mu) * rgamma(k - mu + 1);
      return out;
    }
  }
  return rl_numeric(mu, m, g, A, X, q);
}

OperatorValue caputo_derivative(double mu, const RealFunction& g, double A, double X, const QuadratureSpec& q) {
  q.validate();
  require_derivative_order(mu);
  check_interval(g, A, X);
  require(X > A, ErrorCode::DomainMismatch, "derivative needs t > a");
  const int m = static_cast<int>(std::floor(mu)) + 1;
  if (g.known_derivatives() >= m) {
    auto out = scaled_integral(m - mu, g.derivatives[m - 1], A, X, q, nullptr);
    check_tolerance(out, q, "Caputo derivative");
    return out;
  }
  if (m == 1) {
    auto out = scaled_integral(1 - mu, numeric_derivative(g, A, 1), A, X, q, nullptr);
    // differencing noise dominates the quadrature estimate
    out.error += 1e-8 * std::max(1.0, std::fabs(out.value));
    return out;
  }
  // Second differences next to A drown in rounding, so take the RL derivative
  // and remove the Taylor part at A instead.
  const double L = X - A;
  auto g0 = endpoint_derivative(g, 0, A, L);
  if (!g0) fail(ErrorCode::NeedsSmoothness, "Caputo derivative: f is singular at the base point");
  auto slope = endpoint_slope(g, A, L, *g0);
  check_smooth(slope, "Caputo derivative at the base point");
  auto out = rl_numeric(mu, 2, g, A, X, q);
  out.value -= *g0 * std::pow(L, -mu) * rgamma(1 - mu) + slope.value * std::pow(L, 1 - mu) * rgamma(2 - mu);
  out.error += slope.error * std::pow(L, 1 - mu) * std::fabs(rgamma(2 - mu));
  return out;
}

OperatorValue hilfer_derivative(double mu, double nu, const RealFunction& g, double A, double X,
                                const QuadratureSpec& q) {
  q.validate();
  require(mu > 0 && mu < 1, ErrorCode::InvalidParameter, "Hilfer derivative needs 0 < mu < 1");
  require(nu >= 0 && nu <= 1, ErrorCode::InvalidParameter, "Hilfer type nu must lie in [0, 1]");
  check_interval(g, A, X);
  require(X > A, ErrorCode::DomainMismatch, "derivative needs t > a");
  if (nu == 1) return caputo_derivative(mu, g, A, X, q);
  if (g.known_derivatives() >= 1 && endpoint_derivative(g, 0, A, X - A)) {
    // C^1 data: the composition collapses to the RL derivative
    return rl_derivative(mu, g, A, X, q);
  }
  const double alpha = nu * (1 - mu), beta = (1 - nu) * (1 - mu);
  if (alpha == 0) return rl_derivative(mu, g, A, X, q);
  // I^alpha d/du I^beta g, pointwise derivative of the inner integral
  auto gf = g.f;
  double fd_err = 0;
  RealFn inner_derivative = [&, gf](double u) {
    if (u <= A) return 0.0;
    Plan plan;
    scaled_integral(beta, gf, A, u, q, &plan);
    auto h = [&](double Xp) { return scaled_integral(beta, gf, A, Xp, q, &plan).value; };
    auto d = log_fd(h, A, u, 1);
    // next to A the differences only see rounding of h, and the kernel
    // weight there is negligible
    if (u - A > 1e-3 * (X - A)) fd_err = std::max(fd_err, d.error / std::max(1.0, std::fabs(d.value)));
    return d.value;
  };
  QuadratureSpec outer = q;
  outer.atol = std::max(q.atol, 1e-10);
  outer.rtol = std::max(q.rtol, 1e-8);
  auto out = scaled_integral(alpha, inner_derivative, A, X, outer, nullptr);
  out.error += fd_err * std::max(1.0, std::fabs(out.value));
  check_smooth(out, "Hilfer composition");
  return out;
}

}  // namespace classical

namespace {

struct Substituted {
  RealFunction g;
  double A, X;
};

Substituted substitute(const PsiFunction& psi, const RealFunction& f, double a, double t) {
  require(psi.domain.contains(a) && psi.domain.contains(t), ErrorCode::DomainMismatch,
          "points a=" + num(a) + ", t=" + num(t) + " outside the Psi domain");
  require(a <= t, ErrorCode::DomainMismatch, "need a <= t");
  return {conjugate_out(psi, f), psi.psi(a), psi.psi(t)};
}

}  // namespace

OperatorValue psi_integral_eval(const PsiFunction& psi, const FracOrder& order, const RealFunction& f, double a,
                                double t, const QuadratureSpec& q) {
  order.validate();
  auto s = substitute(psi, f, a, t);
  return classical::integral(order.mu, s.g, s.A, s.X, q);
}

OperatorValue psi_rl_derivative_eval(const PsiFunction& psi, const FracOrder& order, const RealFunction& f, double a,
                                     double t, const QuadratureSpec& q) {
  order.validate();
  auto s = substitute(psi, f, a, t);
  return classical::rl_derivative(order.mu, s.g, s.A, s.X, q);
}

OperatorValue psi_caputo_derivative_eval(const PsiFunction& psi, const FracOrder& order, const RealFunction& f,
                                         double a, double t, const QuadratureSpec& q) {
  order.validate();
  auto s = substitute(psi, f, a, t);
  return classical::caputo_derivative(order.mu, s.g, s.A, s.X, q);
}

OperatorValue psi_hilfer_derivative_eval(const PsiFunction& psi, const FracOrder& order, const RealFunction& f,
                                         double a, double t, const QuadratureSpec& q) {
  order.validate();
  require(order.nu.has_value(), ErrorCode::InvalidParameter, "Hilfer derivative needs a type nu");
  auto s = substitute(psi, f, a, t);
  return classical::hilfer_derivative(order.mu, *order.nu, s.g, s.A, s.X, q);
}

namespace {

OperatorValue dispatch(OperatorKind kind, const PsiFunction& psi, const FracOrder& order, const RealFunction& f,
                       double a, double t, const QuadratureSpec& q) {
  switch (kind) {
    case OperatorKind::Integral: return psi_integral_eval(psi, order, f, a, t, q);
    case OperatorKind::RiemannLiouville: return psi_rl_derivative_eval(psi, order, f, a, t, q);
    case OperatorKind::Caputo: return psi_caputo_derivative_eval(psi, order, f, a, t, q);
    case OperatorKind::Hilfer: return psi_hilfer_derivative_eval(psi, order, f, a, t, q);
  }
  fail(ErrorCode::UnknownKind, "unknown operator kind");
}

}  // namespace

Eigen::VectorXd apply_operator(OperatorKind kind, const PsiFunction& psi, const FracOrder& order,
                               const RealFunction& f, double a, const Eigen::VectorXd& ts, const QuadratureSpec& q) {
  Eigen::VectorXd out(ts.size());
  for (Eigen::Index i = 0; i < ts.size(); ++i) out(i) = dispatch(kind, psi, order, f, a, ts(i), q).value;
  return out;
}

RealFunction operator_function(OperatorKind kind, const PsiFunction& psi, const FracOrder& order,
                               const RealFunction& f, double a, const QuadratureSpec& q) {
  RealFunction out;
  out.label = "op(" + f.label + ")";
  out.domain = Interval{a, psi.domain.hi, false};
  out.f = [=](double t) {
    if (t <= a) return kind == OperatorKind::Integral ? 0.0 : std::nan("");
    return dispatch(kind, psi, order, f, a, t, q).value;
  };
  return out;
}

}  // namespace psifrac
