#pragma once

#include <functional>
#include <vector>

namespace nvcr {

struct NelderMeadOptions {
  int max_evaluations = 20000;
  double x_tol = 1e-10;  ///< simplex diameter, relative to max(1, |x|)
  double f_tol = 0.0;    ///< absolute spread of vertex values (0 disables)
  int restarts = 2;      ///< fresh simplices around the best point after convergence
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Unconstrained Nelder-Mead minimization with standard coefficients.
/// Non-finite objective values are treated as +inf.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, std::vector<double> step,
                             const NelderMeadOptions& opts = {});

/// Central-difference gradient with per-coordinate step h * max(1, |x_i|).
std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x, double h = 1e-6);

}  // namespace nvcr
