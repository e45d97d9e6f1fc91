#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ebell {

struct NelderMeadOptions {
  /// Edge length of the initial axis-aligned simplex.
  double initial_step = 0.5;
  /// Stop once the spread of simplex values and the improvement from a
  /// fresh simplex around the incumbent both fall below this.
  double tolerance = 1e-8;
  std::int64_t max_evals = 5000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::int64_t evals = 0;
  bool converged = false;
};

/// Derivative-free simplex descent with dimension-adaptive coefficients
/// (reflection 1, expansion 1 + 2/n, contraction 3/4 - 1/(2n), shrink
/// 1 - 1/n). On convergence the simplex is rebuilt around the best vertex and
/// the descent continues; it stops when a rebuild no longer improves the
/// value by more than the tolerance.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::span<const double> start, const NelderMeadOptions& options);

}  // namespace ebell
