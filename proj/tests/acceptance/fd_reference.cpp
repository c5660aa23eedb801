#include "acceptance/fd_reference.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace acceptance {

namespace {

// Product-integration weights of (1/Gamma(mu)) int_0^{t_n} (t_n - s)^{mu-1} w(s) ds
// for w piecewise linear on the mesh; row n holds the weights of w_0..w_n.
std::vector<std::vector<double>> hat_weights(const std::vector<double>& t, double mu) {
  const std::size_t N = t.size() - 1;
  const double g = std::tgamma(mu);
  std::vector<std::vector<double>> rows(N + 1);
  for (std::size_t n = 1; n <= N; ++n) {
    auto& w = rows[n];
    w.assign(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double h = t[j + 1] - t[j];
      const double A = t[n] - t[j], B = t[n] - t[j + 1];
      double left, right;
      if (h / A > 1e-3) {
        const double I0 = (std::pow(A, mu) - std::pow(B, mu)) / mu;
        const double I1 = (std::pow(A, mu + 1) - std::pow(B, mu + 1)) / (mu + 1);
        left = (I1 - B * I0) / h;
        right = (A * I0 - I1) / h;
      } else {
        // far from t_n the closed form cancels; expand about the midpoint
        const double m = t[n] - 0.5 * (t[j] + t[j + 1]);
        const double k = std::pow(m, mu - 1), dk = (mu - 1) * std::pow(m, mu - 2);
        left = 0.5 * h * k + h * h / 12 * dk;
        right = 0.5 * h * k - h * h / 12 * dk;
      }
      w[j] += left / g;
      w[j + 1] += right / g;
    }
  }
  return rows;
}

}  // namespace

Eigen::VectorXd fd_volterra_reference(const FdSetup& s, const std::function<double(double)>& f, double t,
                                      const Eigen::VectorXd& xs) {
  if (s.mu < 0.5 || s.mu > 1) throw std::invalid_argument("fd reference needs 0.5 <= mu <= 1");
  const int M = static_cast<int>(std::lround(2 * s.L / s.h)) - 1;  // interior nodes
  const double h = 2 * s.L / (M + 1);
  auto node = [&](int i) { return -s.L + (i + 1) * h; };

  // sine coefficients of f and the FD Laplacian eigenvalues
  Eigen::VectorXd fk(M), lam(M);
  for (int k = 0; k < M; ++k) {
    double acc = 0;
    for (int i = 0; i < M; ++i) acc += f(node(i)) * std::sin(M_PI * (i + 1) * (k + 1) / (M + 1));
    fk[k] = 2.0 / (M + 1) * acc;
    const double sn = std::sin(M_PI * (k + 1) / (2.0 * (M + 1)));
    lam[k] = -s.kappa * 4 / (h * h) * sn * sn;
  }

  // v_k = f_k t^{mu-1}/Gamma(mu) + w_k with w_k = lam f_k t^{2mu-1}/Gamma(2mu) + lam I^mu w_k
  std::vector<double> tt(s.steps + 1);
  for (int n = 0; n <= s.steps; ++n) tt[n] = t * std::pow(static_cast<double>(n) / s.steps, s.grading);
  const auto wts = hat_weights(tt, s.mu);
  const double r2 = 1 / std::tgamma(2 * s.mu);
  Eigen::MatrixXd W(s.steps + 1, M);
  // w(0) is finite only at mu = 0.5; otherwise the t^{2mu-1} term vanishes there
  W.row(0).setZero();
  if (s.mu == 0.5) W.row(0) = (lam.array() * fk.array() * r2).matrix().transpose();
  for (int n = 1; n <= s.steps; ++n) {
    const auto& a = wts[n];
    Eigen::Map<const Eigen::VectorXd> an(a.data(), n);
    Eigen::RowVectorXd hist = an.transpose() * W.topRows(n);
    const double gn = std::pow(tt[n], 2 * s.mu - 1) * r2;
    for (int k = 0; k < M; ++k)
      W(n, k) = (lam[k] * fk[k] * gn + lam[k] * hist[k]) / (1 - lam[k] * a[n]);
  }
  Eigen::VectorXd vk = fk * std::pow(t, s.mu - 1) / std::tgamma(s.mu) + W.row(s.steps).transpose();

  Eigen::VectorXd out(xs.size());
  for (Eigen::Index q = 0; q < xs.size(); ++q) {
    const double pos = (xs[q] + s.L) / h - 1;
    const int i = static_cast<int>(std::lround(pos));
    if (std::fabs(pos - i) > 1e-9 || i < 0 || i >= M) throw std::invalid_argument("x not on the fd grid");
    double acc = 0;
    for (int k = 0; k < M; ++k) acc += vk[k] * std::sin(M_PI * (i + 1) * (k + 1) / (M + 1));
    out[q] = acc;
  }
  return out;
}

}  // namespace acceptance
