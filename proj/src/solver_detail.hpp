#pragma once

// Shared between the solver translation units.

#include <functional>
#include <map>
#include <string>

#include "psifrac/solvers.hpp"

namespace psifrac::detail {

std::string num(double v);

// nu (1 - mu), the exponent shift carried by a Hilfer initial value
double hilfer_eps(const FracOrder& o);

std::map<std::string, std::string> problem_meta(const FdeProblem& p);

struct SeriesSum {
  double sum = 0;
  double tail = 0;
  int terms = 0;
};

// Truncation: three consecutive terms below atol (|sum| + 1) and a passing
// geometric tail estimate. SeriesDivergence past max_terms.
SeriesSum sum_terms(const std::function<double(int)>& term, const SeriesSpec& s);

void check_grid(const FdeProblem& p, const Eigen::VectorXd& grid, bool open_origin);

}  // namespace psifrac::detail
