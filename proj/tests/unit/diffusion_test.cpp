#include <cmath>

#include <doctest.h>

#include "psifrac/errors.hpp"
#include "psifrac/solvers.hpp"
#include "psifrac/special_functions.hpp"

using namespace psifrac;

namespace {

// frozen from tests/oracle/freeze.cpp
constexpr double kGreenHalf = 0.10624259021477467;      // mu 0.5, kappa 1, x 1, t 1
constexpr double kGreenHalfOrigin = 0.082000487166719108;  // mu 0.5, kappa 1, x 0, t 2

double heat(double kappa, double x, double t) { return std::exp(-x * x / (4 * kappa * t)) / std::sqrt(4 * M_PI * kappa * t); }

double trapezoid_mass(const Eigen::VectorXd& xs, const Eigen::VectorXd& u) {
  double m = 0;
  for (Eigen::Index i = 0; i + 1 < xs.size(); ++i) m += 0.5 * (u[i] + u[i + 1]) * (xs[i + 1] - xs[i]);
  return m;
}

}  // namespace

TEST_CASE("green function examples") {
  auto id = builtin_psi("identity");
  CHECK(std::fabs(diffusion_green(id, 1, 1, 0.5, 1) - heat(1, 0.5, 1)) < 1e-8);
  for (double x : {0.0, 0.3, 2.0, 5.0})
    for (double t : {0.2, 1.0, 3.0}) CHECK(std::fabs(diffusion_green(id, 1, 2.5, x, t) - heat(2.5, x, t)) < 1e-8);

  for (double mu : {0.3, 0.5, 0.9})
    for (double kappa : {0.5, 2.0}) {
      const double t = 1.7;
      const double want = std::pow(t, mu / 2 - 1) * rgamma(mu / 2) / (2 * std::sqrt(kappa));
      CHECK(std::fabs(diffusion_green(id, mu, kappa, 0, t) - want) < 1e-13);
    }
  CHECK(std::fabs(diffusion_green(id, 0.5, 1, 1, 1) - kGreenHalf) < 1e-13);
  CHECK(std::fabs(diffusion_green(id, 0.5, 1, 0, 2) - kGreenHalfOrigin) < 1e-13);

  // depends on t only through Psi(t)
  auto sq = builtin_psi("square");
  CHECK(diffusion_green(sq, 0.5, 1, 1, 1.3) == diffusion_green(id, 0.5, 1, 1, 1.69));
}

TEST_CASE("green function is even and decays") {
  auto id = builtin_psi("identity");
  double prev = HUGE_VAL;
  for (int i = 0; i <= 40; ++i) {
    const double x = 0.25 * i;
    const double g = diffusion_green(id, 0.6, 1, x, 1);
    CHECK(g == diffusion_green(id, 0.6, 1, -x, 1));
    CHECK(g >= 0);
    CHECK(g <= prev);
    prev = g;
  }
}

TEST_CASE("green function rejects bad arguments") {
  auto id = builtin_psi("identity");
  CHECK_THROWS_AS(diffusion_green(id, 1.5, 1, 0, 1), Error);
  CHECK_THROWS_AS(diffusion_green(id, 0.5, 0, 0, 1), Error);
  CHECK_THROWS_AS(diffusion_green(id, 0.5, 1, 0, 0), Error);
}

TEST_CASE("zero profile") {
  auto id = builtin_psi("identity");
  auto p = FdeProblem::diffusion(id, 0.5, 1, [](double) { return 0.0; }, 5);
  auto u = diffusion_solve(p, Eigen::VectorXd::LinSpaced(11, -3, 3), 1.0);
  CHECK(u.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(u.method == "green-convolution");
}

TEST_CASE("semigroup at the classical limit") {
  auto id = builtin_psi("identity");
  const double t0 = 0.5;
  auto p = FdeProblem::diffusion(id, 1, 1, [=](double x) { return heat(1, x, t0); }, 12);
  Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(41, -4, 4);
  for (double t : {0.25, 1.0}) {
    auto u = diffusion_solve(p, xs, t);
    for (Eigen::Index i = 0; i < xs.size(); ++i) CHECK(std::fabs(u.values[i] - heat(1, xs[i], t + t0)) < 1e-6);
  }
}

TEST_CASE("mass conservation at the classical limit") {
  auto id = builtin_psi("identity");
  auto box = [](double x) { return std::fabs(x) <= 1 ? 1.0 : 0.0; };
  auto p = FdeProblem::diffusion(id, 1, 1, box, 5, {-1, 1});
  Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(801, -20, 20);
  for (double t : {0.5, 1.0, 2.0}) CHECK(std::fabs(trapezoid_mass(xs, diffusion_solve(p, xs, t).values) - 2) < 1e-6);
}

TEST_CASE("window too small") {
  auto id = builtin_psi("identity");
  auto wide = FdeProblem::diffusion(id, 1, 1, [](double x) { return std::exp(-x * x / 50); }, 5);
  try {
    diffusion_solve(wide, Eigen::VectorXd::LinSpaced(3, -1, 1), 1.0);
    FAIL("expected WindowTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowTooSmall);
  }
}
