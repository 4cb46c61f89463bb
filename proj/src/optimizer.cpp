#include "qag/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qag/error.hpp"

namespace qag {

MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           const NelderMeadOptions& options) {
  const std::size_t dim = x0.size();
  if (dim == 0) throw invalid_argument("nelder_mead: empty starting point");
  const std::size_t max_evals = options.max_evaluations ? options.max_evaluations : 200 * dim;

  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  MinimizeResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    return f(x);
  };

  std::vector<std::vector<double>> simplex(dim + 1, x0);
  for (std::size_t k = 0; k < dim; ++k) {
    auto& y = simplex[k + 1][k];
    y = y != 0.0 ? 1.05 * y : 0.00025;
  }
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s;
    std::vector<double> v;
    for (auto i : order) {
      s.push_back(simplex[i]);
      v.push_back(values[i]);
    }
    simplex = std::move(s);
    values = std::move(v);
  };
  sort_simplex();

  auto affine = [&](const std::vector<double>& a, double wa, const std::vector<double>& b,
                    double wb) {
    std::vector<double> out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = wa * a[i] + wb * b[i];
    return out;
  };

  while (result.iterations < options.max_iters && result.evaluations < max_evals) {
    double xspread = 0.0;
    double fspread = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        xspread = std::max(xspread, std::abs(simplex[i][k] - simplex[0][k]));
      }
      fspread = std::max(fspread, std::abs(values[i] - values[0]));
    }
    if (xspread <= options.xatol && fspread <= options.fatol) break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / static_cast<double>(dim);
    }
    const auto& worst = simplex[dim];

    const auto reflected = affine(centroid, 1.0 + kReflect, worst, -kReflect);
    const double f_reflected = eval(reflected);
    bool shrink = false;

    if (f_reflected < values[0]) {
      const auto expanded = affine(centroid, 1.0 + kReflect * kExpand, worst, -kReflect * kExpand);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[dim] = expanded;
        values[dim] = f_expanded;
      } else {
        simplex[dim] = reflected;
        values[dim] = f_reflected;
      }
    } else if (f_reflected < values[dim - 1]) {
      simplex[dim] = reflected;
      values[dim] = f_reflected;
    } else if (f_reflected < values[dim]) {
      const auto outside =
          affine(centroid, 1.0 + kContract * kReflect, worst, -kContract * kReflect);
      const double f_outside = eval(outside);
      if (f_outside <= f_reflected) {
        simplex[dim] = outside;
        values[dim] = f_outside;
      } else {
        shrink = true;
      }
    } else {
      const auto inside = affine(centroid, 1.0 - kContract, worst, kContract);
      const double f_inside = eval(inside);
      if (f_inside < values[dim]) {
        simplex[dim] = inside;
        values[dim] = f_inside;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i <= dim; ++i) {
        simplex[i] = affine(simplex[0], 1.0 - kShrink, simplex[i], kShrink);
        values[i] = eval(simplex[i]);
      }
    }
    ++result.iterations;
    sort_simplex();
    const double best = result.trace.empty() ? values[0] : std::min(result.trace.back(), values[0]);
    result.trace.push_back(best);
  }

  result.x = simplex[0];
  result.value = values[0];
  return result;
}

}  // namespace qag
