#include "psifrac/quadrature.hpp"

#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include <Eigen/Eigenvalues>

#include "psifrac/errors.hpp"

namespace psifrac::quad {

namespace {

Rule golub_welsch(int n, double a, double b) {
  // monic Jacobi recurrence p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}
  Eigen::VectorXd diag(n), off(std::max(n - 1, 0));
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    const double d = 2.0 * k + ab;
    if (k == 0)
      diag(k) = (b - a) / (ab + 2);
    else
      diag(k) = (b * b - a * a) / (d * (d + 2));
  }
  for (int k = 1; k < n; ++k) {
    double bk;
    if (k == 1) {
      bk = 4 * (1 + a) * (1 + b) / ((2 + ab) * (2 + ab) * (3 + ab));
    } else {
      const double d = 2.0 * k + ab;
      bk = 4.0 * k * (k + a) * (k + b) * (k + ab) / (d * d * (d + 1) * (d - 1));
    }
    off(k - 1) = std::sqrt(bk);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  const double mu0 = std::exp((ab + 1) * std::log(2.0) + std::lgamma(a + 1) + std::lgamma(b + 1) - std::lgamma(ab + 2));
  Rule r;
  r.x = es.eigenvalues();
  r.w = mu0 * es.eigenvectors().row(0).array().square().matrix().transpose();
  return r;
}

// Abscissae and weights of the unit-step double-exponential map, stored as
// v = (pi/2) sinh(t) so distances to the ends stay accurate.
struct TsNode {
  double v, w;
};

const std::vector<TsNode>& ts_table(int level) {
  thread_local std::map<int, std::vector<TsNode>> cache;
  auto it = cache.find(level);
  if (it != cache.end()) return it->second;
  std::vector<TsNode> nodes;
  const double h = std::ldexp(1.0, -level);
  const double tmax = 5.4;
  // only the points new at this level (odd multiples of h), except level 0
  for (int k = (level == 0 ? 0 : 1); k * h <= tmax; k += (level == 0 ? 1 : 2)) {
    const double t = k * h;
    const double v = M_PI / 2 * std::sinh(t);
    const double c = std::cosh(v);
    nodes.push_back({v, M_PI / 2 * std::cosh(t) / (c * c)});
  }
  return cache.emplace(level, std::move(nodes)).first->second;
}

}  // namespace

const Rule& gauss_jacobi(int n, double alpha, double beta) {
  require(n >= 1 && alpha > -1 && beta > -1, ErrorCode::InvalidParameter, "bad Gauss-Jacobi parameters");
  thread_local std::map<std::tuple<int, double, double>, Rule> cache;
  auto key = std::make_tuple(n, alpha, beta);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  return cache.emplace(key, golub_welsch(n, alpha, beta)).first->second;
}

Estimate tanh_sinh(const EndpointFn& f, double a, double b, double atol, double rtol, int max_level,
                   int fixed_level) {
  Estimate out;
  if (b <= a) return out;
  const double L = b - a, half = L / 2, mid = a + half;
  auto sample = [&](double v) {
    // 1 + tanh v = 2/(1 + e^{-2v}), 1 - tanh v = 2/(1 + e^{2v})
    const double from_a = L / (1 + std::exp(-2 * v));
    const double to_b = L / (1 + std::exp(2 * v));
    const double u = v < 0 ? a + from_a : b - to_b;
    ++out.evaluations;
    if (from_a <= 0 || to_b <= 0) return 0.0;
    const double y = f(std::min(std::max(u, a), b), from_a, to_b);
    // Nodes within 1e-100 of an end carry weights below 1e-100; an endpoint
    // singularity that overflows there contributes nothing.
    if (!std::isfinite(y) && std::min(from_a, to_b) < 1e-100 * L) return 0.0;
    return y;
  };
  double sum = 0;
  double prev = 0;
  const int first = fixed_level >= 0 ? fixed_level : 0;
  const int last = fixed_level >= 0 ? fixed_level : max_level;
  for (int level = 0; level <= last; ++level) {
    const auto& nodes = ts_table(level);
    for (const auto& nd : nodes) {
      if (nd.v == 0) {
        sum += nd.w * f(mid, half, half);
        ++out.evaluations;
        continue;
      }
      sum += nd.w * (sample(nd.v) + sample(-nd.v));
    }
    const double est = half * sum * std::ldexp(1.0, -level);
    if (level >= first) {
      out.value = est;
      out.level = level;
      out.error = level > 0 ? std::fabs(est - prev) : std::fabs(est);
      if (fixed_level < 0 && level >= 3 && out.error <= std::max(atol, rtol * std::fabs(est))) return out;
    }
    prev = est;
  }
  return out;
}

Estimate legendre(const std::function<double(double)>& f, double a, double b, int n) {
  Estimate out;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  auto apply = [&](const Rule& r) {
    double s = 0;
    for (int i = 0; i < r.x.size(); ++i) s += r.w(i) * f(c + h * r.x(i));
    out.evaluations += static_cast<int>(r.x.size());
    return h * s;
  };
  const double lo = apply(gauss_legendre(n));
  out.value = apply(gauss_legendre(n + 8));
  out.error = std::fabs(out.value - lo);
  return out;
}

}  // namespace psifrac::quad
