#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qag {

struct NelderMeadOptions {
  std::size_t max_iters = 100;
  std::size_t max_evaluations = 0;  // 0 = 200 * dimension
  double xatol = 1e-4;
  double fatol = 1e-4;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  // Best objective value after each iteration; monotone non-increasing.
  std::vector<double> trace;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

// Derivative-free downhill simplex with the standard reflection / expansion /
// contraction / shrink coefficients (1, 2, 1/2, 1/2). The initial simplex
// perturbs each coordinate of x0 by 5% (or 2.5e-4 when it is zero).
MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           const NelderMeadOptions& options = {});

}  // namespace qag
