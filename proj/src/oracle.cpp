// Independent reference: the Cauchy problems rewritten as second-kind
// Volterra equations in X = Psi(t),
//
//   y(X) + sum_r kappa_r (I^{alpha_r} y)(X) = sum_q c_q X^{p_q-1}/Gamma(p_q) + sigma (I^beta g)(X),
//
// then solved by product trapezoid integration on a uniform X grid. Power
// terms with p < 3 are peeled off analytically by Picard iteration so the
// discretised remainder is at least C^2 at the origin.

#include <algorithm>
#include <cmath>
#include <map>

#include "psifrac/errors.hpp"
#include "psifrac/solvers.hpp"
#include "psifrac/special_functions.hpp"
#include "solver_detail.hpp"

namespace psifrac {

namespace {

struct Kernel {
  double alpha;
  double kappa;
};

struct PowerTerm {
  double coef;
  double p;  // coef * X^{p-1} / Gamma(p)
};

struct VolterraForm {
  std::vector<Kernel> kernels;
  std::vector<PowerTerm> sources;
  double sigma = 0;  // forcing weight
  double beta = 1;   // forcing integral order
};

VolterraForm volterra_form(const FdeProblem& p) {
  VolterraForm v;
  switch (p.kind) {
    case ProblemKind::RlIvp:
    case ProblemKind::CaputoIvp: {
      const double mu = p.orders[0].mu;
      v.kernels = {{mu, -p.coefficients[0]}};
      v.sources = {{p.initial_data[0], p.kind == ProblemKind::RlIvp ? mu : 1.0}};
      v.sigma = 1;
      v.beta = mu;
      break;
    }
    case ProblemKind::Hilfer2:
    case ProblemKind::Hilfer3: {
      // I^{mu_n} applied to the equation; I^{mu_n} D^{mu_j,nu_j} y =
      // I^{mu_n - mu_j} y - b_j X^{mu_n + eps_j - 1} / Gamma(mu_n + eps_j)
      const std::size_t n = p.orders.size();
      const double lead = p.coefficients[n - 1];
      const double mun = p.orders[n - 1].mu;
      for (std::size_t j = 0; j + 1 < n; ++j)
        v.kernels.push_back({mun - p.orders[j].mu, p.coefficients[j] / lead});
      v.kernels.push_back({mun, p.coefficients[n] / lead});
      for (std::size_t j = 0; j < n; ++j)
        v.sources.push_back(
            {p.coefficients[j] * p.initial_data[j] / lead, mun + detail::hilfer_eps(p.orders[j])});
      v.sigma = 1 / lead;
      v.beta = mun;
      break;
    }
    case ProblemKind::Diffusion:
      fail(ErrorCode::InvalidProblem, "the Volterra oracle does not handle diffusion");
  }
  // I^0 y = y: fold equal-order terms into the leading coefficient
  double lead = 1;
  std::vector<Kernel> kept;
  for (const auto& k : v.kernels) {
    if (k.alpha <= 1e-14)
      lead += k.kappa;
    else if (k.kappa != 0)
      kept.push_back(k);
  }
  require(std::fabs(lead) > 1e-14, ErrorCode::InvalidProblem, "degenerate equation: y coefficients cancel");
  for (auto& k : kept) k.kappa /= lead;
  for (auto& s : v.sources) s.coef /= lead;
  v.sigma /= lead;
  v.kernels = std::move(kept);
  return v;
}

// Forcing split into exact power terms g ~ sum c X^e plus a smooth remainder.
struct ForcingSplit {
  std::vector<std::pair<double, double>> powers;  // (c, e)
  RealFn remainder;                                 // empty when exact
};

ForcingSplit split_forcing(const Forcing& f) {
  ForcingSplit s;
  using T = Forcing::Type;
  switch (f.type) {
    case T::Zero: return s;
    case T::One: s.powers = {{1.0, 0.0}}; return s;
    case T::Power: s.powers = {{1.0, f.p}}; return s;
    case T::Exp:
    case T::Ml: {
      const double mu = f.type == T::Exp ? 1.0 : f.mu;
      const double lam = f.type == T::Exp ? f.a : f.lambda;
      for (int j = 0; mu * j < 3; ++j) s.powers.push_back({std::pow(lam, j) * rgamma(mu * j + 1), mu * j});
      break;
    }
    case T::Custom: {
      const double g0 = f.g(0);
      if (std::isfinite(g0)) s.powers = {{g0, 0.0}};
      break;
    }
  }
  auto powers = s.powers;
  auto g = f.g;
  s.remainder = [powers, g](double X) {
    double r = g(X);
    for (const auto& [c, e] : powers) r -= c * (e == 0 ? 1.0 : std::pow(X, e));
    return r;
  };
  return s;
}

// Peeled part of the solution: sum d_p X^{p-1}/Gamma(p) for p < p_cut,
// the rest of the Picard expansion is handed to the discretisation.
struct Peeled {
  std::map<double, double> kept;  // p -> d
  std::map<double, double> cut;   // p -> c, moved to the right-hand side
};

double key(double p) { return std::round(p * 1e12) / 1e12; }

Peeled peel(const std::vector<PowerTerm>& sources, const std::vector<Kernel>& kernels, double p_cut) {
  Peeled out;
  std::map<double, double> pending;
  for (const auto& s : sources)
    if (s.coef != 0) pending[key(s.p)] += s.coef;
  while (!pending.empty()) {
    auto it = pending.begin();
    const double p = it->first, c = it->second;
    pending.erase(it);
    if (c == 0) continue;
    if (p >= p_cut) {
      out.cut[p] += c;
      continue;
    }
    out.kept[p] += c;
    for (const auto& k : kernels) pending[key(p + k.alpha)] += -k.kappa * c;
    if (out.kept.size() > 4000) fail(ErrorCode::NoConvergence, "oracle: too many singular terms to peel");
  }
  return out;
}

double power_sum(const std::map<double, double>& terms, double X) {
  double s = 0;
  for (const auto& [p, d] : terms) {
    if (p == 1)
      s += d;
    else
      s += d * std::pow(X, p - 1) * rgamma(p);
  }
  return s;
}

// Product trapezoid weights for (I^alpha v)(X_n) = h^alpha/Gamma(alpha+2) sum_j a_{n,j} v_j
struct TrapezoidWeights {
  double scale;
  Eigen::VectorXd interior;  // a(d), d = n - j >= 1
  Eigen::VectorXd first;     // a_{n,0}

  TrapezoidWeights(double alpha, double h, int N) {
    scale = std::pow(h, alpha) * rgamma(alpha + 2);
    interior.resize(N + 1);
    first.resize(N + 1);
    const double a1 = alpha + 1;
    interior[0] = 1;
    for (int d = 1; d <= N; ++d)
      interior[d] = std::pow(d + 1.0, a1) - 2 * std::pow(double(d), a1) + std::pow(d - 1.0, a1);
    first[0] = 0;
    for (int n = 1; n <= N; ++n) first[n] = std::pow(n - 1.0, a1) - (n - 1 - alpha) * std::pow(double(n), alpha);
  }
};

// Remainder values on the uniform grid X_n = n h, n = 0..N.
Eigen::VectorXd solve_remainder(const VolterraForm& form, const Peeled& peeled, const ForcingSplit& fs, double Xmax,
                                int N) {
  const double h = Xmax / N;
  Eigen::VectorXd X = Eigen::VectorXd::LinSpaced(N + 1, 0, Xmax);
  Eigen::VectorXd R(N + 1);
  for (int n = 0; n <= N; ++n) R[n] = power_sum(peeled.cut, X[n]);

  if (fs.remainder && form.sigma != 0) {
    Eigen::VectorXd g(N + 1);
    for (int n = 0; n <= N; ++n) g[n] = fs.remainder(X[n]);
    TrapezoidWeights w(form.beta, h, N);
    for (int n = 1; n <= N; ++n) {
      double acc = w.first[n] * g[0] + g[n];
      for (int j = 1; j < n; ++j) acc += w.interior[n - j] * g[j];
      R[n] += form.sigma * w.scale * acc;
    }
  }

  // all kernels folded into one weight table
  Eigen::VectorXd W = Eigen::VectorXd::Zero(N + 1), W0 = Eigen::VectorXd::Zero(N + 1);
  double Wnn = 0;
  for (const auto& k : form.kernels) {
    TrapezoidWeights w(k.alpha, h, N);
    W += k.kappa * w.scale * w.interior;
    W0 += k.kappa * w.scale * w.first;
    Wnn += k.kappa * w.scale;
  }
  require(std::fabs(1 + Wnn) > 1e-14, ErrorCode::NoConvergence, "oracle: singular time step");

  Eigen::VectorXd v(N + 1);
  v[0] = R[0];
  for (int n = 1; n <= N; ++n) {
    double acc = W0[n] * v[0];
    for (int j = 1; j < n; ++j) acc += W[n - j] * v[j];
    v[n] = (R[n] - acc) / (1 + Wnn);
  }
  return v;
}

double interpolate(const Eigen::VectorXd& v, double Xmax, double X) {
  const int N = static_cast<int>(v.size()) - 1;
  const double s = X / Xmax * N;
  int i = std::clamp(static_cast<int>(std::floor(s)), 0, N - 1);
  const double w = s - i;
  return (1 - w) * v[i] + w * v[i + 1];
}

}  // namespace

SolutionTable volterra_oracle(const FdeProblem& p, const Eigen::VectorXd& grid, const OracleSpec& o) {
  p.validate();
  require(p.kind != ProblemKind::Diffusion, ErrorCode::InvalidProblem, "the Volterra oracle does not handle diffusion");
  require(o.steps >= 16, ErrorCode::InvalidParameter, "oracle needs at least 16 steps");
  require(o.atol > 0, ErrorCode::InvalidParameter, "oracle tolerance must be positive");
  const bool singular = p.kind != ProblemKind::CaputoIvp;
  detail::check_grid(p, grid, singular);

  const auto form = volterra_form(p);
  const auto fs = split_forcing(p.forcing);
  auto sources = form.sources;
  for (const auto& [c, e] : fs.powers)
    if (c != 0) sources.push_back({form.sigma * c * std::tgamma(e + 1), e + form.beta + 1});

  double p_cut = 3;
  Peeled peeled;
  try {
    peeled = peel(sources, form.kernels, p_cut);
  } catch (const Error&) {
    p_cut = 2;
    peeled = peel(sources, form.kernels, p_cut);
  }

  Eigen::VectorXd X(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) X[i] = p.psi.psi(grid[i]);
  const double Xmax = X.maxCoeff();

  auto evaluate = [&](int N) {
    Eigen::VectorXd out(grid.size());
    if (Xmax <= 0) {
      for (Eigen::Index i = 0; i < grid.size(); ++i) out[i] = power_sum(peeled.kept, X[i]);
      return out;
    }
    auto v = solve_remainder(form, peeled, fs, Xmax, N);
    for (Eigen::Index i = 0; i < grid.size(); ++i) out[i] = power_sum(peeled.kept, X[i]) + interpolate(v, Xmax, X[i]);
    return out;
  };

  int N = o.steps;
  Eigen::VectorXd prev = evaluate(N);
  while (true) {
    N *= 2;
    if (N > o.max_steps)
      fail(ErrorCode::NoConvergence, "oracle did not reach " + detail::num(o.atol) + " within " +
                                         std::to_string(o.max_steps) + " steps");
    Eigen::VectorXd cur = evaluate(N);
    const Eigen::VectorXd diff = (cur - prev).cwiseAbs();
    if (!cur.allFinite()) fail(ErrorCode::NoConvergence, "oracle produced non-finite values");
    if (diff.maxCoeff() <= o.atol) {
      SolutionTable out;
      out.grid = grid;
      out.values = cur;
      out.errors = diff;
      out.method = "volterra-oracle";
      out.meta = detail::problem_meta(p);
      out.meta["oracle_steps"] = std::to_string(N);
      out.meta["oracle_atol"] = detail::num(o.atol);
      out.meta["peeled_terms"] = std::to_string(peeled.kept.size());
      return out;
    }
    prev = std::move(cur);
  }
}

}  // namespace psifrac
