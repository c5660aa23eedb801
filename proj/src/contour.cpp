#include "psifrac/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace psifrac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogEps = std::log(std::numeric_limits<double>::epsilon());

struct Param {
  double mu = 0, h = 0, N = kInf;
};

// Bounded region between two singularities.
Param optimal_rb(double t, double phi_j, double phi_j1, double pj, double qj, double log_epsilon) {
  const double fac = 1.01;
  const double f_max = std::exp(log_epsilon - kLogEps);
  double sq_j = std::sqrt(phi_j);
  const double threshold = 2 * std::sqrt((log_epsilon - kLogEps) / t);
  double sq_j1 = std::min(std::sqrt(phi_j1), threshold - sq_j);
  double bar_j = 0, bar_j1 = 0, f_bar = 1;
  bool adm = false;
  if (pj < 1e-14 && qj < 1e-14) {
    bar_j = sq_j;
    bar_j1 = sq_j1;
    adm = true;
  } else if (pj < 1e-14) {
    bar_j = sq_j;
    double f_min = sq_j > 0 ? fac * std::pow(sq_j / (sq_j1 - sq_j), qj) : fac;
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      double fq = std::pow(f_bar, -1 / qj);
      bar_j1 = (2 * sq_j1 - fq * sq_j) / (2 + fq);
      adm = true;
    }
  } else if (qj < 1e-14) {
    bar_j1 = sq_j1;
    double f_min = fac * std::pow(sq_j1 / (sq_j1 - sq_j), pj);
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      double fp = std::pow(f_bar, -1 / pj);
      bar_j = (2 * sq_j + fp * sq_j1) / (2 - fp);
      adm = true;
    }
  } else {
    double f_min = fac * std::pow((sq_j + sq_j1) / (sq_j1 - sq_j), std::max(pj, qj));
    if (f_min < f_max) {
      f_min = std::max(f_min, 1.5);
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      double fp = std::pow(f_bar, -1 / pj);
      double fq = std::pow(f_bar, -1 / qj);
      double w = -phi_j1 * t / log_epsilon;
      double den = 2 + w - (1 + w) * fp + fq;
      bar_j = ((2 + w + fq) * sq_j + fp * sq_j1) / den;
      bar_j1 = (-(1 + w) * fq * sq_j + (2 + w - (1 + w) * fp) * sq_j1) / den;
      adm = true;
    }
  }
  Param out;
  if (!adm) return out;
  log_epsilon -= std::log(f_bar);
  double w = -bar_j1 * bar_j1 * t / log_epsilon;
  out.mu = std::pow(((1 + w) * bar_j + bar_j1) / (2 + w), 2);
  out.h = -2 * M_PI / log_epsilon * (bar_j1 - bar_j) / ((1 + w) * bar_j + bar_j1);
  out.N = std::ceil(std::sqrt(1 - log_epsilon / t / out.mu) / out.h);
  return out;
}

// Unbounded region right of the last singularity.
Param optimal_ru(double t, double phi_j, double pj, double log_epsilon) {
  double sq_phi = std::sqrt(phi_j);
  double phibar = phi_j > 0 ? phi_j * 1.01 : 0.01;
  double sq_bar = std::sqrt(phibar);
  const double f_min = 1, f_max = 10, f_tar = 5;
  double N = 0, A = 0, sq_mu = 0;
  for (int iter = 0; iter < 100; ++iter) {
    double phi_t = phibar * t;
    double lr = log_epsilon / phi_t;
    N = std::ceil(phi_t / M_PI * (1 - 3 * lr / 2 + std::sqrt(1 - 2 * lr)));
    A = M_PI * N / phi_t;
    sq_mu = sq_bar * std::fabs(4 - A) / std::fabs(7 - std::sqrt(1 + 12 * A));
    double fbar = std::pow((sq_bar - sq_phi) / sq_mu, -pj);
    if (pj < 1e-14 || (f_min < fbar && fbar < f_max)) break;
    sq_bar = std::pow(f_tar, -1 / pj) * sq_mu + sq_phi;
    phibar = sq_bar * sq_bar;
  }
  Param out;
  out.mu = sq_mu * sq_mu;
  out.h = (-3 * A - 2 + 2 * std::sqrt(1 + 12 * A)) / (4 - A) / N;
  out.N = N;
  const double threshold = (log_epsilon - kLogEps) / t;
  if (out.mu > threshold) {
    double Q = std::fabs(pj) < 1e-14 ? 0 : std::pow(f_tar, -1 / pj) * std::sqrt(out.mu);
    phibar = std::pow(Q + sq_phi, 2);
    if (phibar < threshold) {
      double w = std::sqrt(kLogEps / (kLogEps - log_epsilon));
      double u = std::sqrt(-phibar * t / kLogEps);
      out.mu = threshold;
      out.N = std::ceil(w * log_epsilon / 2 / M_PI / (u * w - 1));
      out.h = std::sqrt(kLogEps / (kLogEps - log_epsilon)) / out.N;
    } else {
      out.N = kInf;
      out.h = 0;
    }
  }
  return out;
}

}  // namespace

double ml_contour(double alpha, double beta, double gama, double lambda) {
  const double t = 1.0;
  double log_epsilon = std::log(1e-15);
  const double theta = lambda < 0 ? M_PI : 0.0;
  const double alambda = std::fabs(lambda);

  // singularities s* of (s^alpha - lambda) on the principal sheet
  std::vector<cplx> s_star;
  std::vector<double> phi;
  if (alambda > 0) {
    int kmin = static_cast<int>(std::ceil(-alpha / 2 - theta / (2 * M_PI)));
    int kmax = static_cast<int>(std::floor(alpha / 2 - theta / (2 * M_PI)));
    for (int k = kmin; k <= kmax; ++k) {
      cplx s = std::pow(alambda, 1 / alpha) * std::exp(cplx(0, (theta + 2 * k * M_PI) / alpha));
      double ph = (s.real() + std::abs(s)) / 2;
      if (ph > 1e-15) {
        s_star.push_back(s);
        phi.push_back(ph);
      }
    }
  }
  std::vector<size_t> order(s_star.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return phi[a] < phi[b]; });
  std::vector<cplx> ss{cplx(0)};
  std::vector<double> ph{0.0};
  for (size_t i : order) {
    ss.push_back(s_star[i]);
    ph.push_back(phi[i]);
  }
  const size_t J1 = ss.size();
  std::vector<double> p(J1), q(J1);
  p[0] = std::max(0.0, -2 * (alpha * gama - beta + 1));
  for (size_t j = 1; j < J1; ++j) p[j] = gama;
  for (size_t j = 0; j + 1 < J1; ++j) q[j] = gama;
  q[J1 - 1] = kInf;
  ph.push_back(kInf);

  std::vector<size_t> regions;
  for (size_t j = 0; j < J1; ++j)
    if (ph[j] < (log_epsilon - kLogEps) / t && ph[j] < ph[j + 1]) regions.push_back(j);
  if (gama != 1.0) {
    // residues of higher-order poles are not available: keep only the
    // region right of every singularity
    regions.erase(std::remove_if(regions.begin(), regions.end(), [&](size_t j) { return j + 1 < J1; }),
                  regions.end());
  }
  if (regions.empty()) return std::numeric_limits<double>::quiet_NaN();

  Param best;
  size_t best_j = 0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    best = Param{};
    for (size_t j : regions) {
      Param pr = (j + 1 < J1) ? optimal_rb(t, ph[j], ph[j + 1], p[j], q[j], log_epsilon)
                              : optimal_ru(t, ph[j], p[j], log_epsilon);
      if (pr.N < best.N) {
        best = pr;
        best_j = j;
      }
    }
    if (best.N <= 200) break;
    log_epsilon += std::log(10.0);
  }
  if (!std::isfinite(best.N) || best.N > 5000) return std::numeric_limits<double>::quiet_NaN();

  const int N = static_cast<int>(best.N);
  cplx sum = 0;
  for (int k = -N; k <= N; ++k) {
    double u = best.h * k;
    cplx zc = best.mu * (cplx(0, u) + 1.0) * (cplx(0, u) + 1.0);
    cplx zd = cplx(-2 * best.mu * u, 2 * best.mu);
    cplx F = std::pow(zc, alpha * gama - beta) / std::pow(std::pow(zc, alpha) - lambda, gama) * zd;
    sum += std::exp(zc * t) * F;
  }
  cplx integral = best.h * sum / (2 * M_PI * cplx(0, 1));

  cplx residues = 0;
  for (size_t j = best_j + 1; j < J1; ++j) {
    // simple poles only (gamma == 1)
    residues += (1 / alpha) * std::pow(ss[j], 1 - beta) * std::exp(t * ss[j]);
  }
  return (integral + residues).real();
}

TalbotResult talbot_invert(const ComplexFn& F, double x, int M, double shift) {
  TalbotResult out;
  const double r = 2.0 * M / (5.0 * x);
  cplx acc = 0.5 * F(cplx(r + shift, 0)) * std::exp(r * x);
  for (int k = 1; k < M; ++k) {
    double th = k * M_PI / M;
    double cot = std::cos(th) / std::sin(th);
    cplx s = r * th * cplx(cot, 1);
    double sigma = th + (th * cot - 1) * cot;
    cplx term = std::exp(x * s) * F(s + shift) * cplx(1, sigma);
    // the symmetric partner: s(-theta) = conj(s)
    cplx s_c = std::conj(s);
    cplx term_c = std::exp(x * s_c) * F(s_c + shift) * cplx(1, -sigma);
    acc += 0.5 * (term + term_c);
  }
  cplx total = (r / M) * acc * std::exp(shift * x);
  out.value = total.real();
  out.imag = total.imag();
  out.finite = std::isfinite(out.value) && std::isfinite(out.imag);
  return out;
}

}  // namespace psifrac
