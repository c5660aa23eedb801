#include "psifrac/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "psifrac/errors.hpp"
#include "psifrac/frac_operators.hpp"
#include "psifrac/laplace.hpp"
#include "psifrac/psi_kernel.hpp"
#include "psifrac/solvers.hpp"
#include "psifrac/special_functions.hpp"

namespace psifrac::cli {

namespace {

const std::map<std::string, std::string>& default_values() {
  static const std::map<std::string, std::string> d = {
      {"command", ""},
      {"psi.kind", "identity"},
      {"psi.param", ""},
      {"special.mu", "1"},
      {"special.nu", "1"},
      {"special.gamma", "1"},
      {"special.z", ""},
      {"special.z_min", "-1"},
      {"special.z_max", "1"},
      {"special.points", "11"},
      {"operator.kind", "integral"},
      {"operator.mu", "0.5"},
      {"operator.nu", "0.5"},
      {"operator.base", ""},
      {"operator.f", "one"},
      {"transform.f", "one"},
      {"transform.s", "1"},
      {"transform.growth", ""},
      {"transform.image", "power"},
      {"transform.mu", "1"},
      {"transform.nu", "1"},
      {"transform.gamma", "1"},
      {"transform.lambda", "0"},
      {"transform.a", "0"},
      {"transform.nodes", "32"},
      {"transform.shift", "0.5"},
      {"convolve.f", "one"},
      {"convolve.g", "one"},
      {"problem.kind", "caputo"},
      {"problem.mu", "0.5"},
      {"problem.nu", ""},
      {"problem.lambda", "0"},
      {"problem.c", "1"},
      {"problem.a", ""},
      {"problem.b", ""},
      {"problem.forcing", "zero"},
      {"problem.variant", "prabhakar"},
      {"series.atol", "1e-12"},
      {"series.max_terms", "200"},
      {"oracle.steps", "64"},
      {"oracle.max_steps", "16384"},
      {"oracle.atol", "1e-6"},
      {"compare.tolerance", "1e-3"},
      {"diffusion.mu", "1"},
      {"diffusion.kappa", "1"},
      {"diffusion.profile", "gauss:1"},
      {"diffusion.half_width", "10"},
      {"diffusion.t", "1"},
      {"diffusion.x_min", "-5"},
      {"diffusion.x_max", "5"},
      {"diffusion.points", "41"},
      {"regularity.horizon", "10"},
      {"regularity.points", "201"},
      {"regularity.growth", ""},
      {"grid.t_min", ""},
      {"grid.t_max", "1"},
      {"grid.points", "11"},
      {"grid.spacing", "linear"},
      {"tol.atol", "1e-13"},
      {"tol.rtol", "1e-11"},
      {"output.csv", ""},
      {"output.plot", ""},
  };
  return d;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_number(const std::string& text, const std::string& key) {
  double v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto res = std::from_chars(first, last, v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != last || !std::isfinite(v))
    fail(ErrorCode::InvalidParameter, key + ": '" + text + "' is not a finite number");
  return v;
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---- RunConfig ----

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [key, _] : default_values()) k.push_back(key);
    return k;
  }();
  return keys;
}

RunConfig RunConfig::defaults() {
  RunConfig c;
  c.values_ = default_values();
  return c;
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    require(eq != std::string::npos, ErrorCode::InvalidParameter,
            "config line " + std::to_string(lineno) + ": expected 'key = value'");
    c.set(trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)));
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), ErrorCode::InvalidParameter, "cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::serialise() const {
  std::string s;
  for (const auto& [k, v] : values_) s += k + " = " + v + "\n";
  return s;
}

void RunConfig::set(const std::string& key, std::string value) {
  require(default_values().count(key) > 0, ErrorCode::InvalidParameter, "unknown config key '" + key + "'");
  values_[key] = std::move(value);
}

void RunConfig::merge(const RunConfig& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

bool RunConfig::has(const std::string& key) const {
  auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  require(it != values_.end(), ErrorCode::InvalidParameter, "missing config key '" + key + "'");
  return it->second;
}

double RunConfig::number(const std::string& key) const { return to_number(get(key), key); }

int RunConfig::integer(const std::string& key) const {
  const double v = number(key);
  require(v == std::floor(v) && std::fabs(v) < 1e9, ErrorCode::InvalidParameter, key + " must be an integer");
  return static_cast<int>(v);
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  const auto& s = get(key);
  std::size_t start = 0;
  while (start <= s.size()) {
    auto pos = s.find(',', start);
    if (pos == std::string::npos) pos = s.size();
    out.push_back(to_number(trim(std::string_view(s).substr(start, pos - start)), key));
    start = pos + 1;
  }
  return out;
}

// ---- commands ----

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fixed17(r[i]);
    os << "\n";
  }
}

// Line chart of the first column against the second, standalone SVG.
void write_svg(const std::string& path, const Table& t) {
  std::ofstream f(path);
  require(f.good(), ErrorCode::InvalidParameter, "cannot write plot file " + path);
  const double W = 640, H = 400, m = 50;
  double x0 = HUGE_VAL, x1 = -HUGE_VAL, y0 = HUGE_VAL, y1 = -HUGE_VAL;
  for (const auto& r : t.rows) {
    if (r.size() < 2 || !std::isfinite(r[0]) || !std::isfinite(r[1])) continue;
    x0 = std::min(x0, r[0]);
    x1 = std::max(x1, r[0]);
    y0 = std::min(y0, r[1]);
    y1 = std::max(y1, r[1]);
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  auto px = [&](double x) { return m + (x - x0) / (x1 - x0) * (W - 2 * m); };
  auto py = [&](double y) { return H - m - (y - y0) / (y1 - y0) * (H - 2 * m); };
  char buf[128];
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  f << "<rect x=\"50\" y=\"50\" width=\"540\" height=\"300\" fill=\"none\" stroke=\"#444\"/>\n";
  f << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  for (const auto& r : t.rows) {
    if (r.size() < 2 || !std::isfinite(r[0]) || !std::isfinite(r[1])) continue;
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(r[0]), py(r[1]));
    f << buf;
  }
  f << "\"/>\n";
  auto label = [&](double x, double y, const char* anchor, double v) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"%s\">%.6g</text>\n", x,
                  y, anchor, v);
    f << buf;
  };
  label(m, H - m + 16, "middle", x0);
  label(W - m, H - m + 16, "middle", x1);
  label(m - 4, H - m, "end", y0);
  label(m - 4, m + 4, "end", y1);
  if (t.header.size() >= 2)
    f << "<text x=\"320\" y=\"30\" font-size=\"13\" text-anchor=\"middle\">" << t.header[1] << " vs " << t.header[0]
      << "</text>\n";
  f << "</svg>\n";
}

void emit(const RunConfig& cfg, const Table& t, std::ostream& out) {
  if (cfg.has("output.csv")) {
    std::ofstream f(cfg.get("output.csv"));
    require(f.good(), ErrorCode::InvalidParameter, "cannot write " + cfg.get("output.csv"));
    write_csv(f, t);
  } else {
    write_csv(out, t);
  }
  if (cfg.has("output.plot")) write_svg(cfg.get("output.plot"), t);
}

PsiFunction psi_from(const RunConfig& cfg) {
  std::optional<double> param;
  if (cfg.has("psi.param")) param = cfg.number("psi.param");
  return builtin_psi(cfg.get("psi.kind"), param);
}

QuadratureSpec quad_from(const RunConfig& cfg) {
  QuadratureSpec q;
  q.atol = cfg.number("tol.atol");
  q.rtol = cfg.number("tol.rtol");
  q.validate();
  return q;
}

// Catalogue functions of X = Psi(t) with their X-derivatives where known,
// lifted to functions of t.
// Known growth of a catalogue entry in X; nullopt means estimate it.
// X^p <= (p / (e c))^p e^{c X} for any c > 0, so polynomials take c = s_min / 2.
std::optional<ExponentialOrder> catalogue_order(const std::string& spec, double s_min) {
  const Forcing h = parse_forcing(spec);
  using T = Forcing::Type;
  switch (h.type) {
    case T::Zero:
    case T::One:
      return ExponentialOrder{0, 1, 0};
    case T::Power: {
      if (h.p == 0) return ExponentialOrder{0, 1, 0};
      const double c = s_min / 2;
      if (!(c > 0)) return std::nullopt;
      return ExponentialOrder{c, std::pow(h.p / (M_E * c), h.p), 0};
    }
    case T::Exp:
      return ExponentialOrder{std::max(h.a, 0.0), 1, 0};
    case T::Ml:
      // E_mu(lambda X^mu) <= 1/mu e^{lambda^{1/mu} X} + 1 for lambda > 0, mu <= 1
      if (h.mu > 1) return std::nullopt;
      if (h.lambda <= 0) return ExponentialOrder{0, 1, 0};
      return ExponentialOrder{std::pow(h.lambda, 1 / h.mu), 1 / h.mu + 1, 0};
    default:
      return std::nullopt;
  }
}

RealFunction catalogue_function(const PsiFunction& psi, const std::string& spec) {
  const Forcing h = parse_forcing(spec);
  std::vector<RealFn> d;
  using T = Forcing::Type;
  switch (h.type) {
    case T::Zero:
    case T::One:
      d = {[](double) { return 0.0; }, [](double) { return 0.0; }};
      break;
    case T::Power: {
      const double p = h.p;
      d = {[p](double X) { return p == 0 ? 0.0 : p * std::pow(X, p - 1); },
           [p](double X) { return p == 0 || p == 1 ? 0.0 : p * (p - 1) * std::pow(X, p - 2); }};
      break;
    }
    case T::Exp: {
      const double a = h.a;
      d = {[a](double X) { return a * std::exp(a * X); }, [a](double X) { return a * a * std::exp(a * X); }};
      break;
    }
    default:
      break;
  }
  return conjugate_in(psi, make_function(h.g, spec, d));
}

Eigen::VectorXd t_grid(const RunConfig& cfg, const PsiFunction& psi, double fallback_min) {
  const double t_min = cfg.has("grid.t_min") ? cfg.number("grid.t_min") : fallback_min;
  return make_grid(psi, t_min, cfg.number("grid.t_max"), cfg.integer("grid.points"),
                   parse_spacing(cfg.get("grid.spacing")));
}

FdeProblem problem_from(const RunConfig& cfg) {
  auto psi = psi_from(cfg);
  const auto kind = parse_problem_kind(cfg.get("problem.kind"));
  const auto forcing = parse_forcing(cfg.get("problem.forcing"));
  auto mus = cfg.numbers("problem.mu");
  switch (kind) {
    case ProblemKind::RlIvp:
    case ProblemKind::CaputoIvp: {
      require(mus.size() == 1, ErrorCode::InvalidParameter, "rl/caputo problems take one order");
      const double lam = cfg.number("problem.lambda"), c = cfg.number("problem.c");
      return kind == ProblemKind::RlIvp ? FdeProblem::rl_ivp(psi, mus[0], lam, c, forcing)
                                        : FdeProblem::caputo_ivp(psi, mus[0], lam, c, forcing);
    }
    case ProblemKind::Hilfer2:
    case ProblemKind::Hilfer3: {
      const auto nus = cfg.numbers("problem.nu");
      require(mus.size() == nus.size(), ErrorCode::InvalidParameter, "problem.mu and problem.nu differ in length");
      std::vector<FracOrder> orders;
      for (std::size_t j = 0; j < mus.size(); ++j) orders.push_back(FracOrder::hilfer(mus[j], nus[j]));
      const auto a = cfg.numbers("problem.a"), b = cfg.numbers("problem.b");
      return kind == ProblemKind::Hilfer2 ? FdeProblem::hilfer2(psi, orders, a, b, forcing)
                                          : FdeProblem::hilfer3(psi, orders, a, b, forcing);
    }
    case ProblemKind::Diffusion: break;
  }
  fail(ErrorCode::InvalidParameter, "use the diffuse command for diffusion problems");
}

Hilfer3Variant variant_from(const RunConfig& cfg) {
  const auto& v = cfg.get("problem.variant");
  if (v == "prabhakar") return Hilfer3Variant::Prabhakar;
  if (v == "as-printed") return Hilfer3Variant::AsPrinted;
  fail(ErrorCode::UnknownKind, "unknown hilfer3 variant '" + v + "'");
}

SeriesSpec series_from(const RunConfig& cfg) {
  SeriesSpec s;
  s.atol = cfg.number("series.atol");
  s.max_terms = cfg.integer("series.max_terms");
  require(s.atol > 0 && s.max_terms > 0, ErrorCode::InvalidParameter, "series settings must be positive");
  return s;
}

double problem_t_min(const FdeProblem& p) {
  return p.kind == ProblemKind::CaputoIvp ? 0.0 : default_t_min(p.psi);
}

Table solution_table(const SolutionTable& s) {
  Table t{{"t", "value", "est_error"}, {}};
  for (Eigen::Index i = 0; i < s.grid.size(); ++i) t.rows.push_back({s.grid[i], s.values[i], s.errors[i]});
  return t;
}

// LinSpaced(1, a, b) would give b
Eigen::VectorXd span(double a, double b, int n) {
  if (n == 1) return Eigen::VectorXd::Constant(1, a);
  return Eigen::VectorXd::LinSpaced(n, a, b);
}

int cmd_special(const RunConfig& cfg, std::ostream& out, bool is_wright) {
  const double mu = cfg.number("special.mu"), nu = cfg.number("special.nu"), gam = cfg.number("special.gamma");
  auto eval = [&](double z) { return is_wright ? wright_eval(z, mu, nu) : ml3_eval(mu, nu, gam, z); };
  if (cfg.has("special.z")) {
    const double z = cfg.number("special.z");
    const auto v = eval(z);
    out << shortest(v.value) << "\n";
    if (cfg.has("output.csv") || cfg.has("output.plot")) emit(cfg, Table{{"z", "value", "est_error"}, {{z, v.value, v.error}}}, out);
    return 0;
  }
  const int n = cfg.integer("special.points");
  require(n >= 1, ErrorCode::InvalidParameter, "special.points must be positive");
  const Eigen::VectorXd zs = span(cfg.number("special.z_min"), cfg.number("special.z_max"), n);
  Table t{{"z", "value", "est_error"}, {}};
  for (double z : zs) {
    const auto v = eval(z);
    t.rows.push_back({z, v.value, v.error});
  }
  emit(cfg, t, out);
  return 0;
}

int cmd_fracop(const RunConfig& cfg, std::ostream& out) {
  const auto psi = psi_from(cfg);
  const auto& op = cfg.get("operator.kind");
  const double mu = cfg.number("operator.mu");
  const FracOrder order = op == "hilfer" ? FracOrder::hilfer(mu, cfg.number("operator.nu")) : FracOrder::of(mu);
  const double base = cfg.has("operator.base") ? cfg.number("operator.base")
                                               : (std::isfinite(psi.domain.lo) ? psi.domain.lo : 0.0);
  const auto f = catalogue_function(psi, cfg.get("operator.f"));
  const auto q = quad_from(cfg);
  const double t_max = cfg.number("grid.t_max");
  const int points = cfg.integer("grid.points");
  const auto grid = t_grid(cfg, psi, base + (t_max - base) / std::max(points, 1));
  Table t{{"t", "value", "est_error"}, {}};
  for (double ti : grid) {
    OperatorValue v;
    if (op == "integral")
      v = psi_integral_eval(psi, order, f, base, ti, q);
    else if (op == "rl")
      v = psi_rl_derivative_eval(psi, order, f, base, ti, q);
    else if (op == "caputo")
      v = psi_caputo_derivative_eval(psi, order, f, base, ti, q);
    else if (op == "hilfer")
      v = psi_hilfer_derivative_eval(psi, order, f, base, ti, q);
    else
      fail(ErrorCode::UnknownKind, "unknown operator '" + op + "' (integral, rl, caputo, hilfer)");
    t.rows.push_back({ti, v.value, v.error});
  }
  emit(cfg, t, out);
  return 0;
}

int cmd_transform(const RunConfig& cfg, std::ostream& out) {
  const auto psi = psi_from(cfg);
  const auto f = catalogue_function(psi, cfg.get("transform.f"));
  const auto ss = cfg.numbers("transform.s");
  const double s_min = ss.empty() ? 0.0 : *std::min_element(ss.begin(), ss.end());
  ExponentialOrder order;
  if (cfg.has("transform.growth"))
    order.c = cfg.number("transform.growth");
  else if (auto known = catalogue_order(cfg.get("transform.f"), s_min))
    order = *known;
  else
    order = estimate_exponential_order(psi, f, 10);
  const auto q = quad_from(cfg);
  Table t{{"s", "value_re", "value_im", "est_error"}, {}};
  for (double s : ss) {
    const auto v = glt_forward_eval(psi, f, s, order, q);
    t.rows.push_back({s, v.value.real(), v.value.imag(), v.error});
  }
  emit(cfg, t, out);
  return 0;
}

int cmd_invtransform(const RunConfig& cfg, std::ostream& out) {
  const auto psi = psi_from(cfg);
  ImageParams p;
  p.mu = cfg.number("transform.mu");
  p.nu = cfg.number("transform.nu");
  p.gamma = cfg.number("transform.gamma");
  p.lambda = cfg.number("transform.lambda");
  p.a = cfg.number("transform.a");
  const auto image = reference_image(cfg.get("transform.image"), p);
  ContourSpec contour;
  contour.nodes = cfg.integer("transform.nodes");
  contour.shift = cfg.number("transform.shift");
  const double t_max = cfg.number("grid.t_max");
  const auto grid = t_grid(cfg, psi, t_max / std::max(cfg.integer("grid.points"), 1));
  Table t{{"t", "value", "est_error"}, {}};
  for (double ti : grid) {
    const auto v = glt_inverse_eval(psi, image, ti, contour);
    t.rows.push_back({ti, v.value, v.error});
  }
  emit(cfg, t, out);
  return 0;
}

int cmd_convolve(const RunConfig& cfg, std::ostream& out) {
  const auto psi = psi_from(cfg);
  const auto f = catalogue_function(psi, cfg.get("convolve.f"));
  const auto g = catalogue_function(psi, cfg.get("convolve.g"));
  const auto q = quad_from(cfg);
  const auto grid = t_grid(cfg, psi, 0.0);
  Table t{{"t", "value", "est_error"}, {}};
  for (double ti : grid) {
    const auto v = psi_convolve_eval(psi, f, g, ti, q);
    t.rows.push_back({ti, v.value, v.error});
  }
  emit(cfg, t, out);
  return 0;
}

OracleSpec oracle_from(const RunConfig& cfg) {
  OracleSpec o;
  o.steps = cfg.integer("oracle.steps");
  o.max_steps = cfg.integer("oracle.max_steps");
  o.atol = cfg.number("oracle.atol");
  return o;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, bool oracle) {
  const auto p = problem_from(cfg);
  const auto grid = t_grid(cfg, p.psi, problem_t_min(p));
  const auto sol = oracle ? volterra_oracle(p, grid, oracle_from(cfg))
                          : solve_closed_form(p, grid, series_from(cfg), variant_from(cfg));
  emit(cfg, solution_table(sol), out);
  return 0;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto p = problem_from(cfg);
  const auto grid = t_grid(cfg, p.psi, problem_t_min(p));
  const auto cf = solve_closed_form(p, grid, series_from(cfg), variant_from(cfg));
  const auto orc = volterra_oracle(p, grid, oracle_from(cfg));
  const Eigen::VectorXd diff = (cf.values - orc.values).cwiseAbs();
  const double dev = diff.maxCoeff();
  Table t{{"t", "closed_form", "oracle", "abs_diff"}, {}};
  for (Eigen::Index i = 0; i < grid.size(); ++i) t.rows.push_back({grid[i], cf.values[i], orc.values[i], diff[i]});
  if (cfg.has("output.csv") || cfg.has("output.plot")) emit(cfg, t, out);
  out << "max_abs_deviation," << fixed17(dev) << "\n";
  const double tol = cfg.number("compare.tolerance");
  if (dev > tol) {
    err << "psifrac: deviation " << fixed17(dev) << " exceeds tolerance " << fixed17(tol) << "\n";
    return 2;
  }
  return 0;
}

// Profiles: gauss:sigma (unit mass), box:h (1 on |x| <= h), zero.
void profile_from(const std::string& spec, RealFn& f, std::vector<double>& breaks) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (name == "zero" && arg.empty()) {
    f = [](double) { return 0.0; };
  } else if (name == "gauss") {
    const double s = to_number(arg, "diffusion.profile");
    require(s > 0, ErrorCode::InvalidParameter, "gauss width must be positive");
    f = [s](double x) { return std::exp(-x * x / (2 * s * s)) / (s * std::sqrt(2 * M_PI)); };
  } else if (name == "box") {
    const double h = to_number(arg, "diffusion.profile");
    require(h > 0, ErrorCode::InvalidParameter, "box half width must be positive");
    f = [h](double x) { return std::fabs(x) <= h ? 1.0 : 0.0; };
    breaks = {-h, h};
  } else {
    fail(ErrorCode::UnknownKind, "unknown profile '" + spec + "' (zero, gauss:s, box:h)");
  }
}

int cmd_diffuse(const RunConfig& cfg, std::ostream& out) {
  const auto psi = psi_from(cfg);
  RealFn prof;
  std::vector<double> breaks;
  profile_from(cfg.get("diffusion.profile"), prof, breaks);
  const auto p = FdeProblem::diffusion(psi, cfg.number("diffusion.mu"), cfg.number("diffusion.kappa"), prof,
                                       cfg.number("diffusion.half_width"), breaks);
  const int n = cfg.integer("diffusion.points");
  require(n >= 1, ErrorCode::InvalidParameter, "diffusion.points must be positive");
  const Eigen::VectorXd xs = span(cfg.number("diffusion.x_min"), cfg.number("diffusion.x_max"), n);
  const auto sol = diffusion_solve(p, xs, cfg.number("diffusion.t"), std::max(cfg.number("tol.atol"), 1e-10));
  Table t{{"x", "value", "est_error"}, {}};
  for (Eigen::Index i = 0; i < xs.size(); ++i) t.rows.push_back({xs[i], sol.values[i], sol.errors[i]});
  emit(cfg, t, out);
  return 0;
}

int cmd_regularity(const RunConfig& cfg, std::ostream& out) {
  const auto p = problem_from(cfg);
  require(p.kind == ProblemKind::CaputoIvp, ErrorCode::InvalidParameter, "regularity checks caputo problems");
  const double horizon = cfg.number("regularity.horizon");
  const double t_min = cfg.has("grid.t_min") ? cfg.number("grid.t_min") : 0.0;
  const auto grid =
      make_grid(p.psi, t_min, horizon, cfg.integer("regularity.points"), parse_spacing(cfg.get("grid.spacing")));
  ExponentialOrder order;
  if (cfg.has("regularity.growth")) {
    order.c = cfg.number("regularity.growth");
  } else if (auto known = catalogue_order(cfg.get("problem.forcing"), 2.0)) {
    // the bound needs c > 0; bounded and polynomial forcing take c = 1
    order = *known;
    if (order.c <= 0) order.c = 1;
  } else if (!p.forcing.is_zero()) {
    const auto g = p.forcing.g;
    const auto psi = p.psi;
    order = estimate_exponential_order(p.psi, make_function([g, psi](double t) { return g(psi.psi(t)); }), horizon);
  }
  const auto sol = solve_caputo_ivp(p, grid);
  const auto rep = check_regularity_bound(p, sol, order);
  Table t{{"t", "ratio", "est_error"}, {}};
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    t.rows.push_back({grid[i], rep.ratios[i], sol.errors[i] * std::exp(-rep.exponent * p.psi.psi(grid[i]))});
  if (cfg.has("output.csv") || cfg.has("output.plot")) emit(cfg, t, out);
  out << "exponent," << fixed17(rep.exponent) << "\n";
  out << "max_ratio," << fixed17(rep.max_ratio) << "\n";
  out << "slope," << fixed17(rep.slope) << "\n";
  out << "slope_stderr," << fixed17(rep.slope_stderr) << "\n";
  out << "pass," << (rep.pass ? 1 : 0) << "\n";
  return rep.pass ? 0 : 2;
}

// Flag to config-key bindings for one subcommand.
struct Binding {
  std::string flag;
  std::string key;
  std::string help;
};

const std::vector<Binding> kPsiFlags = {
    {"--psi", "psi.kind", "identity, power, sqrt, square, log1p, shifted-log"},
    {"--psi-param", "psi.param", "parameter of power / shifted-log"},
};
const std::vector<Binding> kGridFlags = {
    {"--t-min", "grid.t_min", "first grid point"},
    {"--t-max", "grid.t_max", "last grid point"},
    {"--points", "grid.points", "number of grid points"},
    {"--spacing", "grid.spacing", "linear, log, psi-uniform"},
};
const std::vector<Binding> kProblemFlags = {
    {"--kind", "problem.kind", "rl, caputo, hilfer2, hilfer3"},
    {"--mu", "problem.mu", "order(s), comma separated for hilfer"},
    {"--nu", "problem.nu", "hilfer types, comma separated"},
    {"--lambda", "problem.lambda", "rl/caputo coefficient"},
    {"--c", "problem.c", "rl/caputo initial value"},
    {"--a", "problem.a", "hilfer coefficients a_1..a_n+1"},
    {"--b", "problem.b", "hilfer initial values b_1..b_n"},
    {"--forcing", "problem.forcing", "zero, one, power:p, exp:a, ml:mu:lambda (functions of Psi(t))"},
    {"--variant", "problem.variant", "hilfer3 formula: prabhakar, as-printed"},
    {"--series-atol", "series.atol", "series truncation tolerance"},
    {"--max-terms", "series.max_terms", "series term cap"},
};
const std::vector<Binding> kOracleFlags = {
    {"--steps", "oracle.steps", "initial oracle step count"},
    {"--max-steps", "oracle.max_steps", "oracle step cap"},
    {"--oracle-atol", "oracle.atol", "oracle self-convergence tolerance"},
};

std::vector<Binding> join(std::initializer_list<std::vector<Binding>> parts) {
  std::vector<Binding> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::map<std::string, std::vector<Binding>> command_bindings() {
  std::map<std::string, std::vector<Binding>> m;
  const std::vector<Binding> special = {
      {"--mu", "special.mu", "mu"},         {"--nu", "special.nu", "nu"},
      {"--z", "special.z", "single argument"}, {"--z-min", "special.z_min", "range start"},
      {"--z-max", "special.z_max", "range end"}, {"--points", "special.points", "range points"},
  };
  auto ml = special;
  ml.push_back({"--gamma", "special.gamma", "Prabhakar gamma"});
  m["ml"] = ml;
  m["wright"] = special;
  m["fracop"] = join({kPsiFlags, kGridFlags,
                      {{"--op", "operator.kind", "integral, rl, caputo, hilfer"},
                       {"--mu", "operator.mu", "order"},
                       {"--nu", "operator.nu", "hilfer type"},
                       {"--base", "operator.base", "lower limit a"},
                       {"--f", "operator.f", "function of Psi(t): one, power:p, exp:a, ml:mu:lambda"}}});
  m["transform"] = join({kPsiFlags,
                         {{"--f", "transform.f", "function of Psi(t)"},
                          {"--s", "transform.s", "comma separated real s values"},
                          {"--growth", "transform.growth", "exponential order c (estimated if absent)"}}});
  m["invtransform"] = join({kPsiFlags, kGridFlags,
                            {{"--image", "transform.image", "power, exp, ml2, ml3"},
                             {"--mu", "transform.mu", "mu"},
                             {"--nu", "transform.nu", "nu"},
                             {"--gamma", "transform.gamma", "gamma"},
                             {"--lambda", "transform.lambda", "lambda"},
                             {"--a", "transform.a", "exp rate"},
                             {"--nodes", "transform.nodes", "contour nodes"},
                             {"--shift", "transform.shift", "contour shift right of the abscissa"}}});
  m["convolve"] = join({kPsiFlags, kGridFlags,
                        {{"--f", "convolve.f", "function of Psi(t)"}, {"--g", "convolve.g", "function of Psi(t)"}}});
  m["solve"] = join({kPsiFlags, kGridFlags, kProblemFlags});
  m["oracle"] = join({kPsiFlags, kGridFlags, kProblemFlags, kOracleFlags});
  m["compare"] = join(
      {kPsiFlags, kGridFlags, kProblemFlags, kOracleFlags, {{"--tolerance", "compare.tolerance", "allowed deviation"}}});
  m["diffuse"] = join({kPsiFlags,
                       {{"--mu", "diffusion.mu", "order in (0, 1]"},
                        {"--kappa", "diffusion.kappa", "diffusivity"},
                        {"--profile", "diffusion.profile", "zero, gauss:s, box:h"},
                        {"--half-width", "diffusion.half_width", "window half width L"},
                        {"--t", "diffusion.t", "time"},
                        {"--x-min", "diffusion.x_min", "first x"},
                        {"--x-max", "diffusion.x_max", "last x"},
                        {"--points", "diffusion.points", "number of x points"}}});
  m["regularity"] = join({kPsiFlags, kProblemFlags,
                          {{"--t-min", "grid.t_min", "first grid point"},
                           {"--spacing", "grid.spacing", "linear, log, psi-uniform"},
                           {"--horizon", "regularity.horizon", "last grid point"},
                           {"--points", "regularity.points", "number of grid points"},
                           {"--growth", "regularity.growth", "forcing exponential order (estimated if absent)"}}});
  for (auto& [_, b] : m) {
    b.push_back({"--atol", "tol.atol", "absolute tolerance"});
    b.push_back({"--rtol", "tol.rtol", "relative tolerance"});
    b.push_back({"--output,-o", "output.csv", "CSV output path (default stdout)"});
    b.push_back({"--plot", "output.plot", "SVG plot path"});
  }
  return m;
}

const std::map<std::string, std::string> kSummaries = {
    {"ml", "Mittag-Leffler function E_{mu,nu}^gamma(z)"},
    {"wright", "Wright function W(z; mu, nu)"},
    {"fracop", "fractional integral or derivative with respect to Psi on a grid"},
    {"transform", "generalised Laplace transform at real s"},
    {"invtransform", "numerical inverse of a reference image on a grid"},
    {"convolve", "Psi-convolution of two catalogue functions"},
    {"solve", "closed-form solution of an initial value problem"},
    {"oracle", "product-integration reference solution of the same problem"},
    {"compare", "closed form against the reference, max deviation"},
    {"diffuse", "time-fractional diffusion profile u(x, t)"},
    {"regularity", "exponential-order bound check on a long horizon"},
};

int dispatch(const std::string& cmd, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cmd == "ml") return cmd_special(cfg, out, false);
  if (cmd == "wright") return cmd_special(cfg, out, true);
  if (cmd == "fracop") return cmd_fracop(cfg, out);
  if (cmd == "transform") return cmd_transform(cfg, out);
  if (cmd == "invtransform") return cmd_invtransform(cfg, out);
  if (cmd == "convolve") return cmd_convolve(cfg, out);
  if (cmd == "solve") return cmd_solve(cfg, out, false);
  if (cmd == "oracle") return cmd_solve(cfg, out, true);
  if (cmd == "compare") return cmd_compare(cfg, out, err);
  if (cmd == "diffuse") return cmd_diffuse(cfg, out);
  if (cmd == "regularity") return cmd_regularity(cfg, out);
  fail(ErrorCode::UnknownKind, "unknown command " + cmd);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractional calculus with respect to a function: special functions, operators, transforms, solvers"};
  app.name("psifrac");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every command");

  const auto bindings = command_bindings();
  std::map<std::string, std::map<std::string, std::string>> buffers;
  std::map<std::string, std::string> config_path;
  std::map<std::string, bool> dump;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [cmd, binds] : bindings) {
    auto* sub = app.add_subcommand(cmd, kSummaries.at(cmd));
    subs[cmd] = sub;
    for (const auto& b : binds) sub->add_option(b.flag, buffers[cmd][b.key], b.help);
    sub->add_option("--config", config_path[cmd], "config file (default ./psifrac.conf if present)");
    sub->add_flag("--dump-config", dump[cmd], "print the effective configuration and exit");
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "psifrac: " << e.what() << "\n";
    return 1;
  }

  std::string cmd;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) cmd = name;

  try {
    RunConfig cfg = RunConfig::defaults();
    if (!config_path[cmd].empty()) {
      cfg.merge(RunConfig::load(config_path[cmd]));
    } else if (std::ifstream("psifrac.conf").good()) {
      cfg.merge(RunConfig::load("psifrac.conf"));
    }
    if (const char* env = std::getenv("PSIFRAC_ATOL"); env && *env) {
      to_number(env, "PSIFRAC_ATOL");
      cfg.set("tol.atol", env);
    }
    for (const auto& b : bindings.at(cmd)) {
      const auto name = b.flag.substr(0, b.flag.find(','));
      if (subs[cmd]->get_option(name)->count() > 0) cfg.set(b.key, buffers[cmd][b.key]);
    }
    cfg.set("command", cmd);
    if (dump[cmd]) {
      out << cfg.serialise();
      return 0;
    }
    return dispatch(cmd, cfg, out, err);
  } catch (const Error& e) {
    err << "psifrac: " << e.what() << "\n";
    return is_numeric_failure(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "psifrac: " << e.what() << "\n";
    return 2;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace psifrac::cli
