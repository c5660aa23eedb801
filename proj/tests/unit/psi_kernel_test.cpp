#include <cmath>

#include <doctest.h>

#include "psifrac/errors.hpp"
#include "psifrac/psi_kernel.hpp"

using namespace psifrac;

namespace {

const char* kKinds[] = {"identity", "sqrt", "square", "log1p"};

PsiFunction any_psi(const std::string& kind) { return builtin_psi(kind); }

}  // namespace

TEST_CASE("builtin psi examples") {
  auto id = builtin_psi("identity");
  CHECK(id(2.5) == 2.5);
  CHECK(id.derivative(7.0) == 1.0);
  CHECK(id.inverse(3.0) == 3.0);
  CHECK(id.zero_at_origin);

  auto sq = builtin_psi("power", 2.0);
  CHECK(sq(3.0) == 9.0);
  CHECK(sq.derivative(3.0) == 6.0);
  CHECK(sq.inverse(16.0) == doctest::Approx(4.0).epsilon(1e-15));

  auto lg = builtin_psi("log1p");
  CHECK(lg(0.0) == 0.0);
  CHECK(lg.derivative(1.0) == 0.5);

  auto had = builtin_psi("shifted-log", 2.0);
  CHECK_FALSE(had.zero_at_origin);
  CHECK_FALSE(had.transform_eligible());
  CHECK(had.domain.lo == 2.0);
}

TEST_CASE("builtin psi rejects bad input") {
  CHECK_THROWS_AS(builtin_psi("cube"), Error);
  CHECK_THROWS_AS(builtin_psi("power", -1.0), Error);
  CHECK_THROWS_AS(builtin_psi("power"), Error);
  try {
    builtin_psi("nope");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownKind);
  }
}

TEST_CASE("monotonicity and positivity scan") {
  for (const char* k : kKinds) {
    auto p = any_psi(k);
    double prev = p(0.0);
    for (int i = 1; i <= 1000; ++i) {
      const double t = 5.0 * i / 1000;
      CHECK(p(t) > prev);
      CHECK(p.derivative(t) > 0);
      prev = p(t);
    }
  }
}

TEST_CASE("inverse round trip") {
  for (const char* k : kKinds) {
    auto p = any_psi(k);
    for (int i = 1; i <= 50; ++i) {
      const double t = 0.1 * i;
      CHECK(std::fabs(p.inverse(p(t)) - t) <= 1e-10 * t);
    }
  }
}

TEST_CASE("inverse by root finding when none is supplied") {
  auto p = make_psi([](double t) { return t + t * t * t; }, [](double t) { return 1 + 3 * t * t; },
                    Interval{0.0, kInfinity, false}, "cubic");
  CHECK(p.zero_at_origin);
  for (double t : {0.01, 0.5, 1.0, 3.0}) CHECK(std::fabs(p.inverse(p(t)) - t) <= 1e-12 * std::max(1.0, t));
}

TEST_CASE("make_psi rejects a decreasing function") {
  CHECK_THROWS_AS(make_psi([](double t) { return -t; }, [](double) { return -1.0; }, Interval{0.0, 10.0, false},
                           "neg"),
                  Error);
}

TEST_CASE("conjugate_in examples") {
  auto sinf = make_function([](double x) { return std::sin(x); }, "sin", {[](double x) { return std::cos(x); }});
  auto c = conjugate_in(builtin_psi("identity"), sinf);
  CHECK(c(0.7) == std::sin(0.7));

  auto u = make_function([](double x) { return x; }, "u");
  CHECK(conjugate_in(builtin_psi("square"), u)(3.0) == 9.0);

  auto ex = make_function([](double x) { return std::exp(x); }, "exp");
  CHECK(std::fabs(conjugate_in(builtin_psi("sqrt"), ex)(4.0) - std::exp(2.0)) < 1e-14);
}

TEST_CASE("conjugate_out examples") {
  auto t4 = make_function([](double t) { return t * t * t * t; }, "t^4");
  CHECK(std::fabs(conjugate_out(builtin_psi("square"), t4)(3.0) - 9.0) < 1e-12);

  auto t = make_function([](double t) { return t; }, "t");
  auto back = conjugate_out(builtin_psi("log1p"), t);
  for (double u : {0.1, 1.0, 2.5}) CHECK(std::fabs(back(u) - std::expm1(u)) < 1e-12 * std::exp(u));
}

TEST_CASE("conjugate_out inverts conjugate_in") {
  auto f = make_function([](double x) { return std::cos(x) + x * x; }, "f");
  for (const char* k : kKinds) {
    auto p = any_psi(k);
    auto rt = conjugate_out(p, conjugate_in(p, f));
    for (int i = 0; i <= 40; ++i) {
      const double u = 0.05 * i;
      CHECK(std::fabs(rt(u) - f(u)) <= 1e-10 * std::max(1.0, std::fabs(f(u))));
    }
  }
}

TEST_CASE("chain rule against finite differences") {
  auto f = make_function([](double x) { return std::sin(2 * x); }, "sin2",
                         {[](double x) { return 2 * std::cos(2 * x); }, [](double x) { return -4 * std::sin(2 * x); }});
  for (const char* k : kKinds) {
    auto p = any_psi(k);
    auto g = conjugate_in(p, f);
    REQUIRE(g.known_derivatives() >= 1);
    for (double t : {0.3, 0.9, 1.7}) {
      const double h = 1e-5;
      const double fd = (g(t + h) - g(t - h)) / (2 * h);
      CHECK(std::fabs(g.derivative(1, t) - fd) <= 1e-5 * std::max(1.0, std::fabs(fd)));
      if (g.known_derivatives() >= 2) {
        const double fd2 = (g.derivative(1, t + h) - g.derivative(1, t - h)) / (2 * h);
        CHECK(std::fabs(g.derivative(2, t) - fd2) <= 1e-5 * std::max(1.0, std::fabs(fd2)));
      }
    }
  }
}

TEST_CASE("domain mismatch") {
  auto f = make_function([](double x) { return std::log(x); }, "log", {}, Interval{1.0, kInfinity, false});
  try {
    conjugate_in(builtin_psi("identity"), f);
    FAIL("expected DomainMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainMismatch);
  }
}
