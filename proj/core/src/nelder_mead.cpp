#include "ebell/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ebell/errors.hpp"

namespace ebell {

namespace {

class Simplex {
 public:
  Simplex(const std::function<double(std::span<const double>)>& f, std::int64_t budget)
      : f_(f), budget_(budget) {}

  bool exhausted() const { return evals_ >= budget_; }
  std::int64_t evals() const { return evals_; }

  double eval(std::span<const double> x) {
    ++evals_;
    const double v = f_(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }

  // One descent from an axis-aligned simplex anchored at best_x. Returns when the
  // value spread drops to `tol` or the budget runs out.
  void descend(std::vector<double>& best_x, double& best_f, double step, double tol) {
    const std::size_t n = best_x.size();
    const double dn = static_cast<double>(n);
    const double alpha = 1.0;
    const double gamma = 1.0 + 2.0 / dn;
    const double rho = 0.75 - 1.0 / (2.0 * dn);
    const double sigma = 1.0 - 1.0 / dn;

    std::vector<std::vector<double>> pts(n + 1, best_x);
    std::vector<double> vals(n + 1, best_f);
    for (std::size_t i = 0; i < n && !exhausted(); ++i) {
      pts[i + 1][i] += step;
      vals[i + 1] = eval(pts[i + 1]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    auto sort_simplex = [&] {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    };
    auto along = [&](std::vector<double>& out, double t) {
      const auto& worst = pts[order[n]];
      for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (centroid[k] - worst[k]);
    };

    while (!exhausted()) {
      sort_simplex();
      if (vals[order[n]] - vals[order[0]] <= tol) break;

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[order[i]][k];
      for (auto& c : centroid) c /= dn;

      const double f_best = vals[order[0]];
      const double f_second_worst = vals[order[n - 1]];
      const double f_worst = vals[order[n]];

      along(xr, alpha);
      const double fr = eval(xr);
      if (fr < f_best) {
        along(xe, alpha * gamma);
        const double fe = exhausted() ? fr : eval(xe);
        if (fe < fr) {
          pts[order[n]] = xe;
          vals[order[n]] = fe;
        } else {
          pts[order[n]] = xr;
          vals[order[n]] = fr;
        }
        continue;
      }
      if (fr < f_second_worst) {
        pts[order[n]] = xr;
        vals[order[n]] = fr;
        continue;
      }
      const bool outside = fr < f_worst;
      along(xc, outside ? alpha * rho : -rho);
      const double fc = exhausted() ? std::numeric_limits<double>::infinity() : eval(xc);
      if (fc < (outside ? fr : f_worst)) {
        pts[order[n]] = xc;
        vals[order[n]] = fc;
        continue;
      }
      // shrink toward the best vertex
      const auto& xb = pts[order[0]];
      for (std::size_t i = 1; i <= n && !exhausted(); ++i) {
        auto& xi = pts[order[i]];
        for (std::size_t k = 0; k < n; ++k) xi[k] = xb[k] + sigma * (xi[k] - xb[k]);
        vals[order[i]] = eval(xi);
      }
    }

    sort_simplex();
    if (vals[order[0]] < best_f) {
      best_f = vals[order[0]];
      best_x = pts[order[0]];
    }
  }

 private:
  const std::function<double(std::span<const double>)>& f_;
  std::int64_t budget_;
  std::int64_t evals_ = 0;
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::span<const double> start, const NelderMeadOptions& options) {
  if (start.empty()) throw ArgumentError("nelder_mead: empty start point");
  if (!(options.tolerance > 0.0) || !(options.initial_step > 0.0) || options.max_evals < 1)
    throw ArgumentError("nelder_mead: tolerance, step and budget must be positive");

  Simplex simplex(objective, options.max_evals);
  NelderMeadResult result;
  result.x.assign(start.begin(), start.end());
  result.value = simplex.eval(result.x);

  double step = options.initial_step;
  while (!simplex.exhausted()) {
    const double before = result.value;
    simplex.descend(result.x, result.value, step, options.tolerance);
    if (before - result.value <= options.tolerance) {
      result.converged = !simplex.exhausted();
      break;
    }
    // restart with a smaller simplex around the incumbent
    step = std::max(step * 0.5, 1e-3);
  }
  result.evals = simplex.evals();
  return result;
}

}  // namespace ebell
