#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "psifrac/frac_operators.hpp"
#include "psifrac/laplace.hpp"
#include "psifrac/psi_kernel.hpp"

namespace psifrac {

enum class ProblemKind { RlIvp, CaputoIvp, Hilfer2, Hilfer3, Diffusion };

std::string_view to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view text);

// Forcing term, written as a function of X = Psi(t). Catalogue entries:
// zero, one, power:p (X^p), exp:a (e^{aX}), ml:mu:lambda (E_mu(lambda X^mu)).
struct Forcing {
  enum class Type { Zero, One, Power, Exp, Ml, Custom };
  Type type = Type::Zero;
  double p = 0, a = 0, mu = 1, lambda = 0;
  RealFn g;  // X -> forcing value
  std::string label = "zero";

  double operator()(double X) const { return g(X); }
  bool is_zero() const { return type == Type::Zero; }
};

Forcing parse_forcing(std::string_view spec);
// f given as a function of t; converted through Psi
Forcing custom_forcing(const PsiFunction& psi, const RealFunction& f);

struct FdeProblem {
  ProblemKind kind = ProblemKind::CaputoIvp;
  PsiFunction psi;
  std::vector<FracOrder> orders;
  std::vector<double> coefficients;  // lambda, or a_1..a_{n+1}
  std::vector<double> initial_data;  // c, or b_1..b_n
  Forcing forcing;

  // diffusion only
  double kappa = 1;
  RealFn profile;
  double half_width = 10;
  std::vector<double> profile_breakpoints;

  void validate() const;

  static FdeProblem rl_ivp(PsiFunction psi, double mu, double lambda, double c, Forcing f = {});
  static FdeProblem caputo_ivp(PsiFunction psi, double mu, double lambda, double c, Forcing f = {});
  // orders as (mu_j, nu_j); coefficients a_1..a_3; data b_1, b_2
  static FdeProblem hilfer2(PsiFunction psi, std::vector<FracOrder> orders, std::vector<double> a,
                            std::vector<double> b, Forcing f = {});
  static FdeProblem hilfer3(PsiFunction psi, std::vector<FracOrder> orders, std::vector<double> a,
                            std::vector<double> b, Forcing f = {});
  static FdeProblem diffusion(PsiFunction psi, double mu, double kappa, RealFn profile, double half_width,
                              std::vector<double> breakpoints = {});
};

struct SolutionTable {
  Eigen::VectorXd grid;  // t values, or x values for diffusion
  Eigen::VectorXd values;
  Eigen::VectorXd errors;
  std::string method;  // closed-form, volterra-oracle, green-convolution
  std::map<std::string, std::string> meta;
};

struct SeriesSpec {
  double atol = 1e-12;
  int max_terms = 200;
};

enum class Hilfer3Variant { Prabhakar, AsPrinted };
std::string_view to_string(Hilfer3Variant v);

enum class Spacing { Linear, Log, PsiUniform };
Spacing parse_spacing(std::string_view text);
Eigen::VectorXd make_grid(const PsiFunction& psi, double t_min, double t_max, int points, Spacing spacing);
// First grid point used for problems singular at the origin.
double default_t_min(const PsiFunction& psi);

SolutionTable solve_rl_ivp(const FdeProblem& p, const Eigen::VectorXd& grid, const QuadratureSpec& q = {});
SolutionTable solve_caputo_ivp(const FdeProblem& p, const Eigen::VectorXd& grid, const QuadratureSpec& q = {});
SolutionTable solve_hilfer2(const FdeProblem& p, const Eigen::VectorXd& grid, const SeriesSpec& s = {},
                            const QuadratureSpec& q = {});
SolutionTable solve_hilfer3(const FdeProblem& p, const Eigen::VectorXd& grid, const SeriesSpec& s = {},
                            Hilfer3Variant variant = Hilfer3Variant::Prabhakar, const QuadratureSpec& q = {});
// Dispatch on p.kind (not diffusion).
SolutionTable solve_closed_form(const FdeProblem& p, const Eigen::VectorXd& grid, const SeriesSpec& s = {},
                                Hilfer3Variant variant = Hilfer3Variant::Prabhakar);

struct OracleSpec {
  int steps = 64;          // initial step count, doubled until converged
  int max_steps = 16384;
  double atol = 1e-6;      // successive-doubling agreement
};

SolutionTable volterra_oracle(const FdeProblem& p, const Eigen::VectorXd& grid, const OracleSpec& o = {});

double diffusion_green(const PsiFunction& psi, double mu, double kappa, double x, double t);
SolutionTable diffusion_solve(const FdeProblem& p, const Eigen::VectorXd& xs, double t, double atol = 1e-10);

struct BoundReport {
  double exponent = 0;   // |lambda|^{1/mu} + c
  double max_ratio = 0;
  double slope = 0;      // least squares over the final decade
  double slope_stderr = 0;
  bool pass = false;
  Eigen::VectorXd ratios;
};

BoundReport check_regularity_bound(const FdeProblem& p, const SolutionTable& sol, const ExponentialOrder& g_order);

}  // namespace psifrac
