// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "acceptance/fd_reference.hpp"
#include "psifrac/errors.hpp"
#include "psifrac/frac_operators.hpp"
#include "psifrac/laplace.hpp"
#include "psifrac/solvers.hpp"
#include "psifrac/special_functions.hpp"

using namespace psifrac;

namespace {

const char* kEligible[] = {"identity", "square", "sqrt", "log1p"};

// Worst observed error against a limit; any exception counts as failure.
struct Tally {
  double worst = 0;
  bool ok = true;
  std::string note;

  void check(double err, double limit, const std::string& what) {
    if (!(err <= limit)) {
      if (ok) note = what + " err " + fmt(err);
      ok = false;
    }
    if (err > worst || std::isnan(err)) worst = err;
  }
  static std::string fmt(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2e", v);
    return b;
  }
};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

RealFunction in_x(const PsiFunction& psi, std::function<double(double)> g, std::vector<RealFn> d = {}) {
  return conjugate_in(psi, make_function(std::move(g), "g", std::move(d)));
}

// 1 ------------------------------------------------------------------------
void special(Tally& t) {
  for (int i = 0; i < 50; ++i) {
    const double z = -10 + 20.0 * i / 49;
    t.check(std::fabs(ml2(1, 1, z) - std::exp(z)) / std::exp(z), 1e-12, "exp identity");
  }
  for (double mu : {0.3, 0.6, 1.0, 1.7})
    for (double nu : {0.5, 1.0, 2.2})
      for (double z : {-30.0, -8.0, -1.0, 0.0, 0.7, 5.0})
        t.check(std::fabs(ml3(mu, nu, 1, z) - ml2(mu, nu, z)), 1e-12 * std::max(1.0, std::fabs(ml2(mu, nu, z))),
                "gamma reduction");
  for (double mu : {-0.75, -0.25, 0.5, 2.0})
    for (double nu : {0.25, 1.0, 3.5}) t.check(std::fabs(wright(0, mu, nu) - 1 / std::tgamma(nu)), 1e-13, "W(0)");
  for (int i = 0; i <= 50; ++i) {
    const double x = 0.1 * i;
    t.check(std::fabs(wright(-x, -0.5, 0.5) - std::exp(-x * x / 4) / std::sqrt(M_PI)), 1e-10, "W(-x;-1/2,1/2)");
  }
}

// 2 ------------------------------------------------------------------------
void transform_table(Tally& t) {
  const double a = 0.5, lam = 0.5;
  for (const char* k : kEligible) {
    auto psi = builtin_psi(k);
    for (double mu : {0.4, 0.7, 1.3})
      for (double s : {1.5, 3.0}) {
        const std::string tag = std::string(k) + " mu " + std::to_string(mu) + " s " + std::to_string(s);
        // X^mu is bounded by (mu / (e c))^mu e^{c X} for any c > 0
        const double c = s / 2;
        auto pw = in_x(psi, [mu](double X) { return std::pow(X, mu); });
        t.check(rel(glt_forward(psi, pw, s, {c, std::pow(mu / (M_E * c), mu), 0}), std::tgamma(mu + 1) / std::pow(s, mu + 1)),
                1e-8, "power " + tag);

        auto ex = in_x(psi, [a](double X) { return std::exp(a * X); });
        t.check(rel(glt_forward(psi, ex, s, {a, 1, 0}), 1 / (s - a)), 1e-8, "exp " + tag);

        const double rate = std::pow(lam, 1 / mu);
        auto e1 = in_x(psi, [=](double X) { return ml2(mu, 1, lam * std::pow(X, mu)); });
        t.check(rel(glt_forward(psi, e1, s, {rate, 1 / mu + 1, 0}), std::pow(s, mu - 1) / (std::pow(s, mu) - lam)),
                1e-8, "ml " + tag);

        auto e2 = in_x(psi, [=](double X) { return std::pow(X, mu - 1) * ml2(mu, mu, lam * std::pow(X, mu)); });
        const double M2 = std::pow(lam, (1 - mu) / mu) / mu + 1;
        t.check(rel(glt_forward(psi, e2, s, {rate, M2, 0}), 1 / (std::pow(s, mu) - lam)), 1e-8, "ml-kernel " + tag);
      }
  }
}

// 3 ------------------------------------------------------------------------
void roundtrip(Tally& t) {
  ImageParams pw, ex, m2, m3;
  pw.mu = 1.5;
  ex.a = -0.5;
  m2.mu = 0.7;
  m2.nu = 1.0;
  m2.lambda = -0.8;
  m3.mu = 0.8;
  m3.nu = 1.2;
  m3.gamma = 1.5;
  m3.lambda = 0.4;
  const std::pair<const char*, ImageParams> fams[] = {{"power", pw}, {"exp", ex}, {"ml2", m2}, {"ml3", m3}};
  for (const char* k : {"identity", "square"}) {
    auto psi = builtin_psi(k);
    for (const auto& [kind, p] : fams) {
      auto img = reference_image(kind, p);
      auto f = reference_function(kind, p, psi);
      for (int i = 0; i <= 19; ++i) {
        const double tt = 0.1 + 0.1 * i;
        t.check(std::fabs(glt_inverse(psi, img, tt) - f(tt)), 1e-6, std::string(kind) + " " + k);
      }
    }
  }
}

// 4 ------------------------------------------------------------------------
// The RL derivative of X^{mu-1}-type data is bounded at the base point but
// only reachable through cancellation there, and the operator refuses below
// about X = 1e-9. The transform quadrature samples that far in, so hold the
// value fixed under X = 1e-5; the change to the transform is far below 1e-6.
RealFunction clamped(const PsiFunction& psi, const RealFunction& f) {
  const double t0 = psi.inverse(1e-5);
  auto ff = f.f;
  return make_function([=](double t) { return ff(std::max(t, t0)); }, f.label);
}

void operator_transforms(Tally& t) {
  for (const char* k : {"square", "sqrt"}) {
    auto psi = builtin_psi(k);
    auto smooth = in_x(psi, [](double X) { return std::exp(-X) + X; },
                       {[](double X) { return 1 - std::exp(-X); }, [](double X) { return std::exp(-X); }});
    const double f0 = 1, f1 = 0;  // f(0), f'(0) in X
    for (double s : {1.3, 2.5}) {
      const cplx F = glt_forward(psi, smooth, s, {});
      const std::string tag = std::string(k) + " s " + std::to_string(s);

      auto I = operator_function(OperatorKind::Integral, psi, FracOrder::of(0.6), smooth, 0);
      t.check(rel(glt_forward(psi, I, s, {}), std::pow(s, -0.6) * F), 1e-6, "integral " + tag);

      auto C = operator_function(OperatorKind::Caputo, psi, FracOrder::of(0.6), smooth, 0);
      t.check(rel(glt_forward(psi, C, s, {}), std::pow(s, 0.6) * F - f0 * std::pow(s, -0.4)), 1e-6, "caputo " + tag);

      auto C2 = operator_function(OperatorKind::Caputo, psi, FracOrder::of(1.4), smooth, 0);
      t.check(rel(glt_forward(psi, C2, s, {}), std::pow(s, 1.4) * F - f0 * std::pow(s, 0.4) - f1 * std::pow(s, -0.6)),
              1e-6, "caputo 1.4 " + tag);

      // RL with a nonzero initial term: f = X^{mu-1} e^{-X}, (I^{1-mu} f)(0) = Gamma(mu), F = Gamma(mu)/(s+1)^mu
      const double mu = 0.6;
      auto sing = in_x(psi, [mu](double X) { return std::pow(X, mu - 1) * std::exp(-X); });
      auto R = operator_function(OperatorKind::RiemannLiouville, psi, FracOrder::of(mu), sing, 0);
      const double g = std::tgamma(mu);
      t.check(rel(glt_forward(psi, clamped(psi, R), s, {}), std::pow(s, mu) * g / std::pow(s + 1, mu) - g), 1e-6, "rl " + tag);

      // Hilfer (1/2, 1/2) on the smooth data, initial term (I^{1/4} f)(0+) via psi_integral.
      // Singular data would cost a nested quadrature per sample here.
      const double init = psi_integral(psi, FracOrder::of(0.25), smooth, 0, psi.inverse(1e-60));
      auto H = operator_function(OperatorKind::Hilfer, psi, FracOrder::hilfer(0.5, 0.5), smooth, 0);
      t.check(rel(glt_forward(psi, H, s, {}), std::pow(s, 0.5) * F - init * std::pow(s, -0.25)), 1e-6, "hilfer " + tag);
    }
  }
}

// 5 ------------------------------------------------------------------------
void convolution(Tally& t) {
  auto one = constant_function(1.0);
  for (const char* k : kEligible) {
    auto psi = builtin_psi(k);
    for (double T : {0.4, 1.3}) t.check(std::fabs(psi_convolve(psi, one, one, T) - psi(T)), 1e-12, "1*1");

    auto f = make_function([](double x) { return std::cos(x); }, "cos");
    auto g = make_function([](double x) { return x * x + 1; }, "g");
    auto h = make_function([](double x) { return std::exp(-x); }, "h");
    const double T = 1.1;
    t.check(std::fabs(psi_convolve(psi, f, g, T) - psi_convolve(psi, g, f, T)), 1e-8, "commutative");
    auto fg = make_function([=](double s) { return psi_convolve(psi, f, g, s); }, "f*g");
    auto gh = make_function([=](double s) { return psi_convolve(psi, g, h, s); }, "g*h");
    t.check(std::fabs(psi_convolve(psi, fg, h, T) - psi_convolve(psi, f, gh, T)), 1e-8, "associative");
    auto comb = make_function([=](double s) { return 2 * g(s) - 3 * h(s); }, "2g-3h");
    t.check(std::fabs(psi_convolve(psi, f, comb, T) - (2 * psi_convolve(psi, f, g, T) - 3 * psi_convolve(psi, f, h, T))),
            1e-8, "bilinear");

    auto a = in_x(psi, [](double X) { return std::exp(-X); });
    auto b = in_x(psi, [](double X) { return X; });
    auto ab = make_function([=](double s) { return psi_convolve(psi, a, b, s); }, "a*b");
    for (double s : {1.0, 2.5})
      t.check(rel(glt_forward(psi, ab, s, {}), glt_forward(psi, a, s, {}) * glt_forward(psi, b, s, {})), 1e-6,
              "product theorem");
  }
}

// 6 ------------------------------------------------------------------------
void conjugation(Tally& t) {
  auto g = make_function([](double x) { return std::exp(-x) + x * x; }, "g",
                         {[](double x) { return -std::exp(-x) + 2 * x; }, [](double x) { return std::exp(-x) + 2; }});
  for (const char* k : kEligible) {
    auto psi = builtin_psi(k);
    // written directly in t so nothing short-circuits through the preimage
    auto f = make_function([psi, gf = g.f](double tt) { return gf(psi(tt)); }, "g o psi");
    for (double tt : {0.3, 0.9, 1.6}) {
      const double X = psi(tt);
      t.check(std::fabs(psi_integral(psi, FracOrder::of(0.7), f, 0, tt) - classical::integral(0.7, g, 0, X).value),
              1e-6, "integral");
      t.check(std::fabs(psi_rl_derivative(psi, FracOrder::of(0.7), f, 0, tt) -
                        classical::rl_derivative(0.7, g, 0, X).value),
              1e-6, "rl");
      for (double mu : {0.7, 1.3})
        t.check(std::fabs(psi_caputo_derivative(psi, FracOrder::of(mu), f, 0, tt) -
                          classical::caputo_derivative(mu, g, 0, X).value),
                1e-6, "caputo");
      t.check(std::fabs(psi_hilfer_derivative(psi, FracOrder::hilfer(0.4, 0.3), f, 0, tt) -
                        classical::hilfer_derivative(0.4, 0.3, g, 0, X).value),
              1e-6, "hilfer");
    }
  }
}

// 7 ------------------------------------------------------------------------
void versus_oracle(Tally& t) {
  auto id = builtin_psi("identity"), sq = builtin_psi("square"), sr = builtin_psi("sqrt"), lg = builtin_psi("log1p");
  auto H = [](double m, double n) { return FracOrder::hilfer(m, n); };
  std::vector<std::pair<std::string, FdeProblem>> ps = {
      {"rl 1", FdeProblem::rl_ivp(sq, 0.7, 0.3, 1)},
      {"rl 2", FdeProblem::rl_ivp(id, 0.9, -0.5, 1, parse_forcing("one"))},
      {"rl 3", FdeProblem::rl_ivp(sr, 0.5, 1, 2, parse_forcing("exp:1"))},
      {"rl 4", FdeProblem::rl_ivp(lg, 0.6, -1, 1, parse_forcing("power:1"))},
      {"rl 5", FdeProblem::rl_ivp(id, 1.0, 0.5, 1)},
      {"rl 6", FdeProblem::rl_ivp(sq, 0.4, -2, 0.5, parse_forcing("ml:0.5:-1"))},
      {"caputo 1", FdeProblem::caputo_ivp(id, 0.6, 1, 1, parse_forcing("one"))},
      {"caputo 2", FdeProblem::caputo_ivp(sr, 0.5, -1, 2, parse_forcing("exp:1"))},
      {"caputo 3", FdeProblem::caputo_ivp(lg, 0.5, -1, 2, parse_forcing("ml:0.5:-1"))},
      {"caputo 4", FdeProblem::caputo_ivp(sq, 0.9, 0.4, -1, parse_forcing("power:1.5"))},
      {"caputo 5", FdeProblem::caputo_ivp(id, 0.3, -3, 1)},
      {"caputo 6", FdeProblem::caputo_ivp(sq, 1.0, 1, 1, parse_forcing("exp:-1"))},
      {"hilfer2 1", FdeProblem::hilfer2(id, {H(0.3, 0.5), H(0.7, 0.5)}, {1, 1, 1}, {1, 1})},
      {"hilfer2 2", FdeProblem::hilfer2(id, {H(0.3, 0.5), H(0.7, 0.5)}, {1, 1, 1}, {1, 1}, parse_forcing("one"))},
      {"hilfer2 3", FdeProblem::hilfer2(sq, {H(0.2, 0), H(0.6, 1)}, {0.5, 1, -1}, {0.3, 1})},
      {"hilfer2 4", FdeProblem::hilfer2(sr, {H(0.4, 0.2), H(0.8, 0.7)}, {-0.3, 1, 2}, {1, 0.5}, parse_forcing("exp:1"))},
      {"hilfer2 5", FdeProblem::hilfer2(lg, {H(0.5, 1), H(0.5, 0)}, {1, 2, 0.5}, {1, 1})},
      {"hilfer2 6", FdeProblem::hilfer2(id, {H(0.1, 0.5), H(0.9, 0.3)}, {2, 1, 1}, {0, 1}, parse_forcing("power:1"))},
      {"hilfer3 1", FdeProblem::hilfer3(id, {H(0.2, 0), H(0.4, 0.5), H(0.6, 1)}, {0.1, 0.1, 1, 1}, {0, 0, 1})},
      {"hilfer3 2", FdeProblem::hilfer3(id, {H(0.2, 0.3), H(0.4, 0.5), H(0.6, 0.2)}, {0.5, 0.7, 1, 1}, {1, 1, 1})},
      {"hilfer3 3", FdeProblem::hilfer3(sq, {H(0.3, 0.5), H(0.5, 0.5), H(0.7, 0.5)}, {0.2, -0.4, 1, 0.5}, {1, 0, 1})},
      {"hilfer3 4", FdeProblem::hilfer3(sr, {H(0.2, 1), H(0.3, 0), H(0.8, 0.6)}, {0.3, 0.3, 1, -1}, {0, 1, 1},
                                        parse_forcing("one"))},
      {"hilfer3 5", FdeProblem::hilfer3(lg, {H(0.1, 0.5), H(0.5, 0.5), H(0.9, 0.5)}, {1, 1, 1, 1}, {1, 1, 1})},
      {"hilfer3 6", FdeProblem::hilfer3(id, {H(0.25, 0.2), H(0.5, 0.4), H(0.75, 0.6)}, {-0.5, 0.5, 1, 0.2}, {0.5, -1, 1},
                                        parse_forcing("exp:0.5"))},
  };
  for (const auto& [name, p] : ps) {
    const bool singular = p.kind != ProblemKind::CaputoIvp;
    auto grid = make_grid(p.psi, singular ? default_t_min(p.psi) : 0.0, 1.0, 21, Spacing::Linear);
    auto cf = solve_closed_form(p, grid);
    auto orc = volterra_oracle(p, grid);
    t.check((cf.values - orc.values).cwiseAbs().maxCoeff(), 1e-3, name);
  }
  // y = E_mu(X^mu) + X^mu E_{mu,mu+1}(X^mu) for Psi = sqrt, identity, square
  for (auto* psi : {&sr, &id, &sq}) {
    auto grid = make_grid(*psi, 0, 1.5, 16, Spacing::Linear);
    auto y = solve_caputo_ivp(FdeProblem::caputo_ivp(*psi, 0.6, 1, 1, parse_forcing("one")), grid);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const double Xm = std::pow((*psi)(grid[i]), 0.6);
      t.check(std::fabs(y.values[i] - (ml2(0.6, 1, Xm) + Xm * ml2(0.6, 1.6, Xm))), 1e-10, "explicit solution " + psi->label);
    }
  }
}

// 8 ------------------------------------------------------------------------
double heat(double x, double tt) { return std::exp(-x * x / (4 * tt)) / std::sqrt(4 * M_PI * tt); }

void diffusion(Tally& t) {
  auto id = builtin_psi("identity");
  for (double x : {0.0, 0.5, 1.5, 4.0})
    for (double tt : {0.3, 1.0, 2.0}) t.check(std::fabs(diffusion_green(id, 1, 1, x, tt) - heat(x, tt)), 1e-8, "gaussian");

  Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(33, -4, 4);
  const double t0 = 0.5;
  auto gp = FdeProblem::diffusion(id, 1, 1, [=](double x) { return heat(x, t0); }, 12);
  for (double tt : {0.5, 1.5}) {
    auto u = diffusion_solve(gp, xs, tt);
    for (Eigen::Index i = 0; i < xs.size(); ++i) t.check(std::fabs(u.values[i] - heat(xs[i], tt + t0)), 1e-6, "semigroup");
  }

  auto box = [](double x) {
    const double a = std::fabs(x);
    return a < 1 - 1e-9 ? 1.0 : (a <= 1 + 1e-9 ? 0.5 : 0.0);
  };
  auto bp = FdeProblem::diffusion(id, 1, 1, box, 5, {-1, 1});
  Eigen::VectorXd wide = Eigen::VectorXd::LinSpaced(801, -20, 20);
  for (double tt : {0.5, 1.0, 2.0}) {
    auto u = diffusion_solve(bp, wide, tt);
    double m = 0;
    for (Eigen::Index i = 0; i + 1 < wide.size(); ++i) m += 0.5 * (u.values[i] + u.values[i + 1]) * (wide[i + 1] - wide[i]);
    t.check(std::fabs(m - 2), 1e-6, "mass");
  }

  auto half = FdeProblem::diffusion(id, 0.5, 1, box, 5, {-1, 1});
  auto u = diffusion_solve(half, xs, 1.0);
  acceptance::FdSetup fd;
  auto ref = acceptance::fd_volterra_reference(fd, box, 1.0, xs);
  t.check((u.values - ref).cwiseAbs().maxCoeff(), 5e-3, "fd reference mu 0.5");
}

// 9 ------------------------------------------------------------------------
void regularity(Tally& t) {
  auto id = builtin_psi("identity"), sr = builtin_psi("sqrt");
  struct Case {
    std::string name;
    FdeProblem p;
    double c;
  };
  const Case cases[] = {
      {"one", FdeProblem::caputo_ivp(id, 0.6, 1, 1, parse_forcing("one")), 1},
      {"exp:2", FdeProblem::caputo_ivp(id, 0.5, 1, 1, parse_forcing("exp:2")), 2},
      {"sqrt exp:1", FdeProblem::caputo_ivp(sr, 0.8, -1, 2, parse_forcing("exp:1")), 1},
  };
  for (const auto& cs : cases) {
    auto grid = make_grid(cs.p.psi, 0, 10, 201, Spacing::Linear);
    auto rep = check_regularity_bound(cs.p, solve_caputo_ivp(cs.p, grid), ExponentialOrder{cs.c, 1, 0});
    t.check(rep.pass ? 0.0 : rep.slope, 0.0, "trend " + cs.name);
  }
}

// 10 -----------------------------------------------------------------------
struct Run {
  int code;
  std::string out;
};

Run shell(const std::string& args) {
  const std::string cmd = std::string(PSIFRAC_BIN) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string golden(const std::string& name) {
  std::ifstream in(std::filesystem::path(GOLDEN_DIR) / name, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// numeric cells to rtol, everything else exact
double csv_distance(const std::string& a, const std::string& b) {
  std::istringstream sa(a), sb(b);
  std::string la, lb;
  double worst = 0;
  while (true) {
    const bool ga = static_cast<bool>(std::getline(sa, la)), gb = static_cast<bool>(std::getline(sb, lb));
    if (ga != gb) return HUGE_VAL;
    if (!ga) return worst;
    std::istringstream ca(la), cb(lb);
    std::string x, y;
    while (std::getline(ca, x, ',')) {
      if (!std::getline(cb, y, ',')) return HUGE_VAL;
      char* end = nullptr;
      const double vx = std::strtod(x.c_str(), &end);
      if (end == x.c_str() || *end) {
        if (x != y) return HUGE_VAL;
        continue;
      }
      worst = std::max(worst, std::fabs(vx - std::strtod(y.c_str(), nullptr)) / std::max(1.0, std::fabs(vx)));
    }
  }
}

void cli(Tally& t) {
  const std::string ml = "ml --mu 1 --nu 1 --z 1";
  const std::string solve = "solve --kind caputo --psi identity --mu 0.6 --lambda 1 --c 1 --forcing one --t-max 1";
  const std::string cmp = "compare --kind hilfer2 --mu 0.3,0.7 --nu 0.5,0.5 --a 1,1,1 --b 1,1";

  auto r = shell(ml);
  t.check(r.code == 0 && r.out == golden("ml.txt") ? 0.0 : 1.0, 0, "golden ml");
  r = shell(solve);
  t.check(r.code == 0 ? csv_distance(golden("solve_caputo.csv"), r.out) : HUGE_VAL, 1e-12, "golden solve");
  r = shell(cmp);
  t.check(r.code == 0 ? csv_distance(golden("compare_hilfer2.txt"), r.out) : HUGE_VAL, 1e-9, "golden compare");

  for (const auto& args : {solve, cmp}) t.check(shell(args).out == shell(args).out ? 0.0 : 1.0, 0, "determinism");

  t.check(shell("ml --mu -1 --z 1").code == 1 ? 0.0 : 1.0, 0, "exit validation");
  t.check(shell(cmp + " --max-terms 2").code == 2 ? 0.0 : 1.0, 0, "exit SeriesDivergence");
  t.check(shell("fracop --op integral --mu 0.5 --f power:0.5 --atol 1e-300 --rtol 1e-300").code == 2 ? 0.0 : 1.0, 0,
          "exit ToleranceNotMet");
  t.check(shell("invtransform --image exp --a 1 --t-min 800 --t-max 800 --points 1").code == 2 ? 0.0 : 1.0, 0,
          "exit ContourFailure");
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  void (*fn)(Tally&);
};

}  // namespace

int main() {
  const Criterion all[] = {
      {1, "special functions", 1, special},
      {2, "transform table", 10, transform_table},
      {3, "inversion roundtrip", 30, roundtrip},
      {4, "operator transforms", 60, operator_transforms},
      {5, "convolution", 10, convolution},
      {6, "conjugation identities", 30, conjugation},
      {7, "closed form vs oracle", 120, versus_oracle},
      {8, "diffusion", 120, diffusion},
      {9, "regularity bound", 30, regularity},
      {10, "cli", 10, cli},
  };
  int failed = 0;
  for (const auto& c : all) {
    Tally t;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.fn(t);
    } catch (const std::exception& e) {
      t.ok = false;
      t.note = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      if (t.ok) t.note = "over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget";
      t.ok = false;
    }
    std::printf("%s %2d %-24s worst %.2e  %.2fs%s%s\n", t.ok ? "PASS" : "FAIL", c.id, c.name, t.worst, secs,
                t.note.empty() ? "" : "  ", t.note.c_str());
    std::fflush(stdout);
    failed += !t.ok;
  }
  return failed;
}
