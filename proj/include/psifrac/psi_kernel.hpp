#pragma once

#include <functional>
#include <memory>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace psifrac {

using RealFn = std::function<double(double)>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = -kInfinity;
  double hi = kInfinity;
  // Psi' blows up at lo (t^p with p < 1): lo is a valid base point but
  // derivatives must not be sampled there
  bool open_lo = false;

  bool contains(double t) const { return t >= lo && t <= hi; }
  bool contains_interior(double t) const { return t > lo && t < hi; }
};

// Increasing substitution Psi with derivative and inverse. Immutable once
// built; the factory functions fill in the derived fields.
struct PsiFunction {
  RealFn psi;
  RealFn dpsi;
  RealFn d2psi;  // optional, needed only for second-order chain rules
  RealFn inv;    // optional, falls back to a bracketing root-find
  Interval domain{0.0, kInfinity, false};
  bool zero_at_origin = false;
  std::string label;
  // shared by copies; lets conjugate_out recognise its own conjugate_in
  std::shared_ptr<const int> identity;

  double operator()(double t) const { return psi(t); }
  double derivative(double t) const { return dpsi(t); }
  double inverse(double u) const;
  bool transform_eligible() const { return zero_at_origin; }

  // Monotonicity and positivity scan plus an inverse round-trip check.
  // Throws InvalidParameter.
  void validate() const;
};

// Assemble a Psi from user callables; sets zero_at_origin and validates.
PsiFunction make_psi(RealFn psi, RealFn dpsi, Interval domain, std::string label, RealFn inv = {},
                     RealFn d2psi = {});

// kinds: identity, power (t^p), sqrt, square, log1p, shifted-log (log t on
// [a, inf), parameter a > 0, default 1).
PsiFunction builtin_psi(std::string_view kind, std::optional<double> parameter = std::nullopt);

struct RealFunction {
  RealFn f;
  std::vector<RealFn> derivatives;  // f', f'', ... when known
  std::string label;
  Interval domain{};
  // set by conjugate_in: the function of Psi(t) this was built from
  std::shared_ptr<const RealFunction> preimage;
  std::shared_ptr<const int> preimage_psi;

  double operator()(double x) const { return f(x); }
  int known_derivatives() const { return static_cast<int>(derivatives.size()); }
  // k = 0 is f itself
  double derivative(int k, double x) const { return k == 0 ? f(x) : derivatives.at(k - 1)(x); }
};

RealFunction make_function(RealFn f, std::string label = {}, std::vector<RealFn> derivatives = {},
                           Interval domain = {});
RealFunction constant_function(double c);

// t -> f(Psi(t)), with up to two derivatives carried by the chain rule.
RealFunction conjugate_in(const PsiFunction& psi, const RealFunction& f);
// u -> f(Psi^{-1}(u)). Undoing conjugate_in with the same Psi returns the
// original function, so no chain rule is needed in that direction.
RealFunction conjugate_out(const PsiFunction& psi, const RealFunction& f);

// Image of the domain under Psi.
Interval psi_image(const PsiFunction& psi);

}  // namespace psifrac
