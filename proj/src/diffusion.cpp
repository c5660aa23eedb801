#include <algorithm>
#include <cmath>

#include "psifrac/errors.hpp"
#include "psifrac/quadrature.hpp"
#include "psifrac/solvers.hpp"
#include "psifrac/special_functions.hpp"
#include "solver_detail.hpp"

namespace psifrac {

namespace {

// Scaled distance beyond which the kernel is below e^-30 of its peak. The
// Wright function with mu = -lambda decays like exp(-B r^{1/(1-lambda)}),
// B = (1 - lambda) lambda^{lambda/(1-lambda)}, and its series cannot be
// summed much further out anyway.
double kernel_reach(double mu) {
  const double lam = mu / 2;
  const double B = (1 - lam) * std::pow(lam, lam / (1 - lam));
  return std::pow(30 / B, 1 - lam);
}

void check_green_args(double mu, double kappa) {
  require(mu > 0 && mu <= 1, ErrorCode::InvalidParameter, "diffusion order must lie in (0, 1]");
  require(kappa > 0, ErrorCode::InvalidParameter, "kappa must be positive");
}

double green_scaled(double mu, double kappa, double x, double X) {
  const double s = std::sqrt(kappa) * std::pow(X, mu / 2);
  const double r = std::fabs(x) / s;
  if (r > kernel_reach(mu)) return 0;
  return std::pow(X, mu / 2 - 1) / (2 * std::sqrt(kappa)) * wright(-r, -mu / 2, mu / 2);
}

// W(-r; -mu/2, mu/2) on [0, reach], tabulated once per solve: piecewise
// Chebyshev interpolation, barycentric form.
class RadialTable {
 public:
  RadialTable(double mu, double reach) : reach_(reach), h_(reach / kPanels) {
    for (int k = 0; k <= kDeg; ++k) nodes_[k] = std::cos(M_PI * k / kDeg);
    values_.resize(kPanels * (kDeg + 1));
    for (int p = 0; p < kPanels; ++p)
      for (int k = 0; k <= kDeg; ++k) {
        const double r = h_ * (p + 0.5 * (1 - nodes_[k]));
        values_[p * (kDeg + 1) + k] = wright(-r, -mu / 2, mu / 2);
      }
  }

  double operator()(double r) const {
    if (r >= reach_) return 0;
    const int p = std::min(kPanels - 1, static_cast<int>(r / h_));
    const double s = 1 - 2 * (r - p * h_) / h_;  // maps the panel onto [-1, 1], s = nodes_[k] at the samples
    const double* v = &values_[p * (kDeg + 1)];
    double num = 0, den = 0;
    for (int k = 0; k <= kDeg; ++k) {
      const double d = s - nodes_[k];
      if (d == 0) return v[k];
      double w = (k % 2 ? -1.0 : 1.0) / d;
      if (k == 0 || k == kDeg) w *= 0.5;
      num += w * v[k];
      den += w;
    }
    return num / den;
  }

 private:
  static constexpr int kPanels = 48;
  static constexpr int kDeg = 20;
  double reach_, h_;
  double nodes_[kDeg + 1];
  std::vector<double> values_;
};

}  // namespace

double diffusion_green(const PsiFunction& psi, double mu, double kappa, double x, double t) {
  check_green_args(mu, kappa);
  require(psi.domain.contains(t), ErrorCode::DomainMismatch, "t outside the Psi domain");
  const double X = psi.psi(t);
  require(X > 0, ErrorCode::InvalidParameter, "Green's function needs Psi(t) > 0");
  return green_scaled(mu, kappa, x, X);
}

SolutionTable diffusion_solve(const FdeProblem& p, const Eigen::VectorXd& xs, double t, double atol) {
  p.validate();
  require(p.kind == ProblemKind::Diffusion, ErrorCode::InvalidProblem, "problem kind does not match the solver");
  require(p.psi.domain.contains(t), ErrorCode::InvalidProblem, "t outside the Psi domain");
  const double X = p.psi.psi(t);
  require(X > 0, ErrorCode::InvalidProblem, "diffusion_solve needs Psi(t) > 0");
  require(xs.size() > 0, ErrorCode::InvalidProblem, "empty x grid");
  for (Eigen::Index i = 1; i < xs.size(); ++i)
    require(xs[i] > xs[i - 1], ErrorCode::InvalidProblem, "x grid must be strictly increasing");

  const double mu = p.orders[0].mu, kappa = p.kappa, L = p.half_width;

  // profile mass just outside the window
  {
    double outside = 0;
    for (int side : {-1, 1}) {
      for (int k = 0; k < 16; ++k) {
        const double a = side * (L + L * k / 16), b = side * (L + L * (k + 1) / 16);
        outside += quad::legendre([&](double x) { return std::fabs(p.profile(x)); }, std::min(a, b), std::max(a, b), 16)
                       .value;
      }
    }
    require(outside <= atol, ErrorCode::WindowTooSmall,
            "profile mass " + detail::num(outside) + " outside [-L, L] exceeds " + detail::num(atol));
  }

  const double scale = std::sqrt(kappa) * std::pow(X, mu / 2);
  const double reach = kernel_reach(mu) * scale;
  const double width = 0.25 * scale;
  const double amp = std::pow(X, mu / 2 - 1) / (2 * std::sqrt(kappa));
  const RadialTable table(mu, kernel_reach(mu));

  SolutionTable out;
  out.grid = xs;
  out.values.resize(xs.size());
  out.errors.resize(xs.size());
  out.method = "green-convolution";
  out.meta = detail::problem_meta(p);
  out.meta["t"] = detail::num(t);

  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double lo = std::max(-L, x - reach), hi = std::min(L, x + reach);
    double value = 0, err = 0;
    if (lo < hi) {
      std::vector<double> cuts{lo, hi};
      if (x > lo && x < hi) cuts.push_back(x);
      for (double b : p.profile_breakpoints)
        if (b > lo && b < hi) cuts.push_back(b);
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      auto integrand = [&](double eta) { return amp * table(std::fabs(x - eta) / scale) * p.profile(eta); };
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double a = cuts[c], b = cuts[c + 1];
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
        for (int k = 0; k < panels; ++k) {
          auto est = quad::legendre(integrand, a + (b - a) * k / panels, a + (b - a) * (k + 1) / panels, 24);
          value += est.value;
          err += est.error;
        }
      }
    }
    out.values[i] = value;
    out.errors[i] = err;
  }
  return out;
}

BoundReport check_regularity_bound(const FdeProblem& p, const SolutionTable& sol, const ExponentialOrder& g_order) {
  BoundReport rep;
  const double lam = p.coefficients.empty() ? 0.0 : p.coefficients[0];
  const double mu = p.orders.empty() ? 1.0 : p.orders[0].mu;
  rep.exponent = std::pow(std::fabs(lam), 1 / mu) + g_order.c;
  const Eigen::Index n = sol.grid.size();
  rep.ratios.resize(n);
  if (n == 0) return rep;
  Eigen::VectorXd X(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X[i] = p.psi.psi(sol.grid[i]);
    rep.ratios[i] = std::fabs(sol.values[i]) * std::exp(-rep.exponent * X[i]);
  }
  rep.max_ratio = rep.ratios.maxCoeff();

  // least squares of ratio against Psi(t) over the last decade of t
  const double t_end = sol.grid[n - 1];
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < n; ++i)
    if (sol.grid[i] >= t_end / 10) idx.push_back(i);
  const auto m = static_cast<double>(idx.size());
  if (idx.size() < 3 || !rep.ratios.allFinite()) return rep;
  double mx = 0, my = 0;
  for (auto i : idx) {
    mx += X[i];
    my += rep.ratios[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (auto i : idx) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (rep.ratios[i] - my);
  }
  if (sxx <= 0) return rep;
  rep.slope = sxy / sxx;
  double sse = 0;
  for (auto i : idx) {
    const double r = rep.ratios[i] - my - rep.slope * (X[i] - mx);
    sse += r * r;
  }
  rep.slope_stderr = std::sqrt(sse / (m - 2) / sxx);
  rep.pass = rep.slope <= 2 * rep.slope_stderr;
  return rep;
}

}  // namespace psifrac
