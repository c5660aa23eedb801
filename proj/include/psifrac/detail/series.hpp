#pragma once

// Power-series kernels shared by the Mittag-Leffler, Prabhakar and Wright
// evaluators. Templated on the accumulation scalar so the same loop runs in
// double and, when cancellation eats the double result, in __float128.

#include <cmath>
#include <cfloat>
#include <limits>
#include <type_traits>
#include <vector>

#include <quadmath.h>

namespace psifrac::detail {

template <class T>
struct real_traits;

template <>
struct real_traits<double> {
  static double tgamma(double x) { return std::tgamma(x); }
  static double lgamma(double x) { return std::lgamma(x); }
  static double exp(double x) { return std::exp(x); }
  static double log(double x) { return std::log(x); }
  static double abs(double x) { return std::fabs(x); }
  static double floor(double x) { return std::floor(x); }
  static double sqrt(double x) { return std::sqrt(x); }
  static bool finite(double x) { return std::isfinite(x); }
  static constexpr double eps = DBL_EPSILON;
  static constexpr double direct_gamma = 150.0;
  static constexpr double log_huge = 600.0;
  static constexpr double tiny = 1e-300;
};

template <>
struct real_traits<__float128> {
  static __float128 tgamma(__float128 x) { return tgammaq(x); }
  static __float128 lgamma(__float128 x) { return lgammaq(x); }
  static __float128 exp(__float128 x) { return expq(x); }
  static __float128 log(__float128 x) { return logq(x); }
  static __float128 abs(__float128 x) { return fabsq(x); }
  static __float128 floor(__float128 x) { return floorq(x); }
  static __float128 sqrt(__float128 x) { return sqrtq(x); }
  static bool finite(__float128 x) { return finiteq(x) != 0; }
  static constexpr __float128 eps = __float128(1) / (__float128(1ULL << 56) * __float128(1ULL << 56));  // 2^-112
  static constexpr __float128 direct_gamma = 1500.0;
  static constexpr __float128 log_huge = 11000.0;
  static constexpr __float128 tiny = 1e-300;
};

// log|1/Gamma(x)| and its sign; sign 0 at the poles of Gamma.
template <class T>
void log_rgamma(T x, T& logabs, int& sign) {
  using R = real_traits<T>;
  if (x <= 0 && x == R::floor(x)) {
    logabs = -std::numeric_limits<double>::infinity();
    sign = 0;
    return;
  }
  logabs = -R::lgamma(x);
  if (x > 0) {
    sign = 1;
  } else {
    long long fl = static_cast<long long>(R::floor(x));
    sign = (fl % 2 == 0) ? 1 : -1;
  }
}

template <class T>
T rgamma_direct(T x) {
  using R = real_traits<T>;
  if (x <= 0 && x == R::floor(x)) return T(0);
  return T(1) / R::tgamma(x);
}

enum class SeriesFamily { MittagLeffler, Prabhakar, Wright };

template <class T>
struct SeriesResult {
  T sum = 0;
  T error = 0;  // rounding estimate + tail bound
  int terms = 0;
  bool converged = false;
  bool overflow = false;
};

// Sums c_j z^j / Gamma(mu j + nu) where c_j is 1 (ML), (gamma)_j/j!
// (Prabhakar) or 1/j! (Wright).
template <class T>
SeriesResult<T> sum_series(SeriesFamily fam, T mu, T nu, T gamma, T z, int max_terms) {
  using R = real_traits<T>;
  SeriesResult<T> out;
  if (z == 0) {
    out.sum = rgamma_direct(nu);
    out.error = R::eps * R::abs(out.sum) * 4;
    out.terms = 1;
    out.converged = true;
    return out;
  }
  if (mu == 0 && nu <= 0 && nu == R::floor(nu)) {
    out.converged = true;  // every term carries 1/Gamma(nu) = 0
    out.terms = 1;
    return out;
  }
  const T logz = R::log(R::abs(z));
  const int zsign = z < 0 ? -1 : 1;

  T c = 1;       // direct coefficient while representable
  T logc = 0;    // log|c_j|, exact only once direct is false
  double logc_d = 0;
  const T lgamma_g = fam == SeriesFamily::Prabhakar ? R::lgamma(gamma) : T(0);
  int csign = 1;
  bool direct = true;

  T sum = 0, comp = 0, abs_sum = 0, round_err = 0;  // comp: Neumaier carry
  int passes = 0;

  // log of the Gamma envelope, in double: it only feeds the tail estimate
  auto log_env = [&](double arg) {
    if (mu >= 0) return -std::lgamma(arg);
    return std::lgamma(1 - arg) - std::log(M_PI);
  };
  double env_cached = 0;
  bool have_env = false;
  const T c_max = R::exp(R::log_huge / 2), c_min = R::exp(-R::log_huge / 2);

  // tgammaq is slow. When mu q is an integer p for a small power of two q,
  // 1/Gamma at x + p follows from the value at x by the exact recurrence.
  int period = 0;
  long long shift = 0;
  if constexpr (!std::is_same_v<T, double>) {
    for (int q = 1; q <= 64 && period == 0; q *= 2) {
      const T mq = mu * T(q);
      if (mq == R::floor(mq) && R::abs(mq) <= 64) {
        period = q;
        shift = static_cast<long long>(mq);
      }
    }
  }
  std::vector<T> rg_hist(period > 0 ? period : 0);
  std::vector<T> x_hist(period > 0 ? period : 0);
  auto rgamma_at = [&](int j, T x) {
    if (period > 0 && j >= period) {
      const T xb = x_hist[j % period], rb = rg_hist[j % period];
      if (rb != 0 || shift <= 0) {
        T r = rb;
        if (shift > 0)
          for (long long i = 0; i < shift; ++i) r /= xb + T(i);
        else
          for (long long i = 1; i <= -shift; ++i) r *= xb - T(i);
        x_hist[j % period] = x;
        rg_hist[j % period] = r;
        return r;
      }
    }
    const T r = rgamma_direct(x);
    if (period > 0) {
      x_hist[j % period] = x;
      rg_hist[j % period] = r;
    }
    return r;
  };

  for (int j = 0; j <= max_terms; ++j) {
    const T x = mu * T(j) + nu;
    T term = 0;
    const bool pole = x <= 0 && x == R::floor(x);
    if (!pole) {
      if (direct && R::abs(x) < R::direct_gamma) {
        term = c * rgamma_at(j, x);
        round_err += R::abs(term) * 8 * R::eps;
      } else {
        T lr;
        int rs;
        log_rgamma(x, lr, rs);
        const T lc = direct ? R::log(R::abs(c)) : logc;
        const T lt = lc + lr;
        if (lt > R::log_huge) {
          out.overflow = true;
          return out;
        }
        term = T(csign * rs) * R::exp(lt);
        round_err += R::abs(term) * (8 + R::abs(lc) + R::abs(lr)) * R::eps;
      }
    }
    if (!R::finite(term)) {
      out.overflow = true;
      return out;
    }
    {
      const T next = sum + term;
      comp += R::abs(sum) >= R::abs(term) ? (sum - next) + term : (term - next) + sum;
      sum = next;
    }
    abs_sum += R::abs(term);

    // advance coefficient; log|c| is only tracked exactly once c itself
    // leaves the representable range
    const double logc_prev = logc_d;
    csign *= zsign;
    if (direct) {
      T step = z;
      if (fam == SeriesFamily::Prabhakar)
        step *= (gamma + T(j)) / T(j + 1);
      else if (fam == SeriesFamily::Wright)
        step /= T(j + 1);
      c *= step;
      if (!(R::abs(c) < c_max) || R::abs(c) < c_min) {
        direct = false;
        logc = R::log(R::abs(c));
        logc_d = static_cast<double>(logc);
      } else {
        const double cd = std::fabs(static_cast<double>(c));
        logc_d = cd > 0 && std::isfinite(cd) ? std::log(cd) : static_cast<double>(R::log(R::abs(c)));
      }
    } else {
      // closed form: a running sum drifts by sqrt(j) ulps over long series
      const T n = T(j + 1);
      logc = n * logz;
      if (fam == SeriesFamily::Prabhakar)
        logc += R::lgamma(gamma + n) - lgamma_g - R::lgamma(n + 1);
      else if (fam == SeriesFamily::Wright)
        logc -= R::lgamma(n + 1);
      logc_d = static_cast<double>(logc);
    }

    // Tail bound once the Gamma arguments sit in the log-convex range.
    const double xd = static_cast<double>(x);
    const double xn = static_cast<double>(mu * T(j + 1) + nu);
    const bool tail_region = (mu > 0 && xd >= 2) || (mu < 0 && 1 - xd >= 2) || mu == 0;
    if (!tail_region) {
      have_env = false;
      continue;
    }
    const double env_cur = have_env ? env_cached : log_env(xd);
    const double env_next = log_env(xn);
    env_cached = env_next;
    have_env = true;
    const double lenv_next = logc_d + env_next;
    const double lenv_cur = logc_prev + env_cur;
    double rho = std::exp(lenv_next - lenv_cur);
    if (fam == SeriesFamily::Prabhakar && gamma < 1) rho *= (j + 1) / static_cast<double>(gamma + T(j));
    if (rho >= 1) {
      passes = 0;
      continue;
    }
    const T tail = T(std::exp(lenv_next) / (1 - rho));
    const T target = R::eps * R::abs(sum);
    if (tail <= target || tail <= R::tiny) {
      if (++passes >= 3) {
        out.sum = sum + comp;
        out.terms = j + 1;
        out.error = round_err + R::sqrt(T(j + 1)) * R::eps * abs_sum + tail;
        out.converged = true;
        return out;
      }
    } else {
      passes = 0;
    }
  }
  out.sum = sum + comp;
  out.terms = max_terms + 1;
  out.error = round_err + abs_sum;
  out.converged = false;
  return out;
}

}  // namespace psifrac::detail
