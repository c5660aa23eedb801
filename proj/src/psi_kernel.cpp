#include "psifrac/psi_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "psifrac/errors.hpp"

namespace psifrac {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Bisection to a coarse bracket, then secant steps kept inside it.
double invert_monotone(const RealFn& psi, const Interval& dom, double u) {
  double lo = dom.lo, hi;
  if (std::isfinite(dom.hi)) {
    hi = dom.hi;
  } else {
    double step = std::max(1.0, std::fabs(lo));
    hi = lo + step;
    for (int i = 0; i < 2000 && psi(hi) < u; ++i) {
      lo = hi;
      step *= 2;
      hi = lo + step;
    }
  }
  double flo = psi(lo) - u, fhi = psi(hi) - u;
  if (flo > 0 || fhi < 0) fail(ErrorCode::DomainMismatch, "value " + num(u) + " outside the range of Psi");
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-6 * std::max(1.0, std::fabs(lo)); ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = psi(mid) - u;
    if (fm == 0) return mid;
    (fm < 0 ? lo : hi) = mid;
    (fm < 0 ? flo : fhi) = fm;
  }
  for (int i = 0; i < 100; ++i) {
    double x = lo - flo * (hi - lo) / (fhi - flo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    double fx = psi(x) - u;
    if (fx == 0) return x;
    (fx < 0 ? lo : hi) = x;
    (fx < 0 ? flo : fhi) = fx;
    if (hi - lo <= 1e-12 * std::max(1.0, std::fabs(x)) || std::fabs(fx) <= 1e-15 * std::max(1.0, std::fabs(u)))
      return x;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double PsiFunction::inverse(double u) const {
  if (inv) return inv(u);
  return invert_monotone(psi, domain, u);
}

void PsiFunction::validate() const {
  require(static_cast<bool>(psi) && static_cast<bool>(dpsi), ErrorCode::InvalidParameter,
          "Psi needs psi and dpsi callables");
  require(std::isfinite(domain.lo) && domain.hi > domain.lo, ErrorCode::InvalidParameter,
          "Psi domain must be [a, b] with finite a < b");
  const double span = std::isfinite(domain.hi) ? domain.hi - domain.lo : std::max(10.0, 10 * std::fabs(domain.lo));
  const int n = 1000;
  double prev = psi(domain.lo);
  require(std::isfinite(prev), ErrorCode::InvalidParameter, "Psi not finite at the left end of its domain");
  for (int i = 1; i <= n; ++i) {
    const double t = domain.lo + span * i / n;
    const double v = psi(t);
    require(v > prev, ErrorCode::InvalidParameter, "Psi is not strictly increasing near t=" + num(t));
    const double d = dpsi(t);
    require(d > 0 && std::isfinite(d), ErrorCode::InvalidParameter, "Psi' is not positive at t=" + num(t));
    const double back = inverse(v);
    require(std::fabs(back - t) <= 1e-10 * std::max(1.0, std::fabs(t)), ErrorCode::InvalidParameter,
            "Psi inverse fails the round trip at t=" + num(t));
    prev = v;
  }
}

PsiFunction make_psi(RealFn psi, RealFn dpsi, Interval domain, std::string label, RealFn inv, RealFn d2psi) {
  PsiFunction p;
  p.psi = std::move(psi);
  p.dpsi = std::move(dpsi);
  p.d2psi = std::move(d2psi);
  p.inv = std::move(inv);
  p.domain = domain;
  p.label = std::move(label);
  p.identity = std::make_shared<const int>(0);
  p.validate();
  p.zero_at_origin = domain.lo == 0.0 && p.psi(0.0) == 0.0;
  return p;
}

PsiFunction builtin_psi(std::string_view kind, std::optional<double> parameter) {
  const Interval half_line{0.0, kInfinity, false};
  if (kind == "identity") {
    return make_psi([](double t) { return t; }, [](double) { return 1.0; }, half_line, "identity",
                    [](double u) { return u; }, [](double) { return 0.0; });
  }
  if (kind == "power" || kind == "sqrt" || kind == "square") {
    double p = kind == "sqrt" ? 0.5 : kind == "square" ? 2.0 : parameter.value_or(1.0);
    if (kind == "power") require(parameter.has_value(), ErrorCode::InvalidParameter, "power Psi needs an exponent");
    require(p > 0 && std::isfinite(p), ErrorCode::InvalidParameter, "power Psi needs p > 0");
    Interval dom = half_line;
    dom.open_lo = p < 1;
    std::string label = kind == "power" ? "power:" + num(p) : std::string(kind);
    if (p == 2.0) {
      return make_psi([](double t) { return t * t; }, [](double t) { return 2 * t; }, dom, label,
                      [](double u) { return std::sqrt(u); }, [](double) { return 2.0; });
    }
    if (p == 0.5) {
      return make_psi([](double t) { return std::sqrt(t); }, [](double t) { return 0.5 / std::sqrt(t); }, dom, label,
                      [](double u) { return u * u; }, [](double t) { return -0.25 / (t * std::sqrt(t)); });
    }
    return make_psi([p](double t) { return std::pow(t, p); }, [p](double t) { return p * std::pow(t, p - 1); }, dom,
                    label, [p](double u) { return std::pow(u, 1 / p); },
                    [p](double t) { return p * (p - 1) * std::pow(t, p - 2); });
  }
  if (kind == "log1p") {
    return make_psi([](double t) { return std::log1p(t); }, [](double t) { return 1 / (1 + t); }, half_line, "log1p",
                    [](double u) { return std::expm1(u); }, [](double t) { return -1 / ((1 + t) * (1 + t)); });
  }
  if (kind == "shifted-log") {
    double a = parameter.value_or(1.0);
    require(a > 0 && std::isfinite(a), ErrorCode::InvalidParameter, "shifted-log Psi needs a > 0");
    return make_psi([](double t) { return std::log(t); }, [](double t) { return 1 / t; },
                    Interval{a, kInfinity, false}, "shifted-log:" + num(a), [](double u) { return std::exp(u); },
                    [](double t) { return -1 / (t * t); });
  }
  fail(ErrorCode::UnknownKind, "unknown Psi kind '" + std::string(kind) + "'");
}

RealFunction make_function(RealFn f, std::string label, std::vector<RealFn> derivatives, Interval domain) {
  RealFunction out;
  out.f = std::move(f);
  out.derivatives = std::move(derivatives);
  out.label = std::move(label);
  out.domain = domain;
  return out;
}

RealFunction constant_function(double c) {
  return make_function([c](double) { return c; }, "const:" + num(c), {[](double) { return 0.0; }, [](double) { return 0.0; }});
}

Interval psi_image(const PsiFunction& psi) {
  Interval out;
  out.lo = psi.psi(psi.domain.lo);
  out.hi = std::isfinite(psi.domain.hi) ? psi.psi(psi.domain.hi) : kInfinity;
  out.open_lo = psi.domain.open_lo;
  return out;
}

RealFunction conjugate_in(const PsiFunction& psi, const RealFunction& f) {
  const Interval img = psi_image(psi);
  if (img.lo < f.domain.lo || img.hi > f.domain.hi)
    fail(ErrorCode::DomainMismatch, "f is not defined on the image of Psi (" + psi.label + ")");
  RealFunction out;
  out.label = f.label + "∘" + psi.label;
  out.domain = psi.domain;
  out.preimage = std::make_shared<const RealFunction>(f);
  out.preimage_psi = psi.identity;
  auto fn = f.f;
  auto P = psi.psi;
  out.f = [fn, P](double t) { return fn(P(t)); };
  if (f.known_derivatives() >= 1) {
    auto f1 = f.derivatives[0];
    auto D = psi.dpsi;
    out.derivatives.push_back([f1, P, D](double t) { return f1(P(t)) * D(t); });
    if (f.known_derivatives() >= 2 && psi.d2psi) {
      auto f2 = f.derivatives[1];
      auto D2 = psi.d2psi;
      out.derivatives.push_back([f1, f2, P, D, D2](double t) {
        const double d = D(t);
        return f2(P(t)) * d * d + f1(P(t)) * D2(t);
      });
    }
  }
  return out;
}

RealFunction conjugate_out(const PsiFunction& psi, const RealFunction& f) {
  if (f.preimage && psi.identity && f.preimage_psi == psi.identity) return *f.preimage;
  if (psi.domain.lo < f.domain.lo || psi.domain.hi > f.domain.hi)
    fail(ErrorCode::DomainMismatch, "f is not defined on the domain of Psi (" + psi.label + ")");
  RealFunction out;
  out.label = f.label + "∘" + psi.label + "^-1";
  out.domain = psi_image(psi);
  auto fn = f.f;
  auto self = psi;  // captured by value; callables are shared handles
  out.f = [fn, self](double u) { return fn(self.inverse(u)); };
  if (f.known_derivatives() >= 1) {
    auto f1 = f.derivatives[0];
    out.derivatives.push_back([f1, self](double u) {
      const double t = self.inverse(u);
      return f1(t) / self.dpsi(t);
    });
    if (f.known_derivatives() >= 2 && psi.d2psi) {
      auto f2 = f.derivatives[1];
      out.derivatives.push_back([f1, f2, self](double u) {
        const double t = self.inverse(u);
        const double d = self.dpsi(t);
        return (f2(t) * d - f1(t) * self.d2psi(t)) / (d * d * d);
      });
    }
  }
  return out;
}

}  // namespace psifrac
