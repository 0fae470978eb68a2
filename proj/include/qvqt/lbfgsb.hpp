// SPDX-License-Identifier: Apache-2.0
//
// Limited-memory BFGS with box bounds: gradient projection onto the box plus
// a strong-Wolfe line search, two-loop recursion with a bounded history.

#pragma once

#include <functional>
#include <vector>

namespace qvqt {

struct LbfgsbOptions {
  int memory = 10;
  double grad_tolerance = 1e-3;  // stop when projected-gradient max-norm drops below
  int max_iterations = 1000;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search_steps = 40;
};

struct LbfgsbResult {
  std::vector<double> x;
  double f = 0.0;
  std::vector<double> gradient;
  int iterations = 0;
  bool converged = false;
  bool failed = false;  // non-finite objective/gradient encountered
  std::vector<std::pair<double, double>> history;  // (f, projected-grad max-norm) per iteration
};

// Objective: f(x) with gradient written into `grad` (same length as x).
using Objective =
    std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

LbfgsbResult lbfgsb_minimize(const Objective& objective, std::vector<double> x0,
                             const std::vector<double>& lower,
                             const std::vector<double>& upper,
                             const LbfgsbOptions& options);

}  // namespace qvqt
