#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ebell/entropy.hpp"
#include "ebell/inequality.hpp"
#include "ebell/quantum.hpp"

namespace ebell {

struct OptimizerConfig {
  int restarts = 200;
  std::int64_t max_evals_per_restart = 5000;
  double objective_tolerance = 1e-8;
  std::uint64_t seed = 0;
  int parallel_workers = 1;

  void validate() const;
};

/// Random stream for one restart (or one sweep point), derived only from the
/// master seed and the index so results never depend on scheduling.
std::mt19937_64 derived_stream(std::uint64_t master_seed, std::uint64_t index,
                               std::uint64_t salt = 0);

/// Uniform double in [0, 1) with a platform-independent mapping.
double uniform01(std::mt19937_64& rng);

/// R - L as a function of the measurement angles, for the noisy family
/// V |psi_beta><psi_beta| + (1 - V) I / d^2.
///
/// The argument vector holds, for A, A', B, B' in that order, the
/// interleaved (phi, omega) pairs of each setting in Reck order; diagonal
/// phases stay at zero since the outcome table does not depend on them.
/// Probabilities come from the pure-state amplitudes
/// sum_k c_k U_A[m,k] U_B[n,k] mixed linearly with the uniform table, which
/// avoids forming the 9x9 conjugation; evaluate_quadrangle is the reference
/// route this must agree with.
class ViolationObjective {
 public:
  ViolationObjective(const NoisyStateParams& state, DistanceKind dkind, const EntropyKind& ekind);

  std::size_t num_parameters() const { return 4 * angles_per_setting_; }
  std::size_t angles_per_setting() const { return angles_per_setting_; }

  double operator()(std::span<const double> angles) const;
  QuadrangleReport report(std::span<const double> angles) const;

  QuadrangleSettings settings_from(std::span<const double> angles) const;
  std::vector<double> angles_from(const QuadrangleSettings& settings) const;

  const NoisyStateParams& state() const { return state_; }
  DistanceKind distance_kind() const { return dkind_; }
  const EntropyKind& entropy_kind() const { return ekind_; }

 private:
  NoisyStateParams state_;
  DistanceKind dkind_;
  EntropyKind ekind_;
  std::vector<double> schmidt_;
  std::size_t angles_per_setting_;
};

struct OptimizationResult {
  /// Re-evaluated through evaluate_quadrangle at best_settings.
  double best_violation = 0.0;
  QuadrangleReport report;
  QuadrangleSettings best_settings;
  std::int64_t evals_used = 0;
  /// Index of the winning random restart; warm start k is reported as -1 - k.
  int restart_index_of_best = 0;
  int restarts_run = 0;
  std::uint64_t seed = 0;
  /// Final value of every run, warm starts first, in candidate order.
  std::vector<double> restart_values;
};

struct SearchOptions {
  /// Starting points tried before the random restarts.
  std::vector<QuadrangleSettings> warm_starts;
  /// Stop after the first batch of restarts whose best value is below
  /// -kViolationThreshold. Batches have a fixed size so the cut point does
  /// not depend on the worker count.
  bool stop_on_violation = false;
};

inline constexpr int kRestartBatch = 8;

OptimizationResult minimize_violation(const NoisyStateParams& state, DistanceKind dkind,
                                      const EntropyKind& ekind, const OptimizerConfig& config,
                                      const SearchOptions& options = {});

struct VisibilityProbe {
  double visibility = 0.0;
  double min_violation = 0.0;
  std::int64_t evals = 0;
  bool violated() const { return min_violation < -kViolationThreshold; }
};

struct CriticalVisibilityOptions {
  double v_precision = 1e-3;
  /// Coarse V grid (0, 0.1, ..., 1) whose violation signs must agree with
  /// the final bracket.
  bool grid_check = true;
  int grid_points = 11;
  /// Optional starting bracket [lower, upper]; both ends are probed and the
  /// bracket widens back toward [0, 1] if either end has the wrong sign.
  std::optional<std::pair<double, double>> bracket_hint;
  std::vector<QuadrangleSettings> warm_starts;
};

struct CriticalVisibilityResult {
  /// Smallest probed V with an observed violation; absent when V = 1 shows
  /// none.
  std::optional<double> v_c;
  double q = 1.0;
  double beta = 1.0;
  DistanceKind dkind = DistanceKind::D1;
  EntropyKind ekind = EntropyKind::shannon();
  double bracket_width = 0.0;
  bool violated_at_v1 = false;

  /// Certificates: upper.violated() and !lower.violated(), with
  /// upper.visibility - lower.visibility == bracket_width.
  VisibilityProbe upper;
  VisibilityProbe lower;
  std::vector<VisibilityProbe> probes;
  std::vector<VisibilityProbe> grid;
  std::optional<QuadrangleSettings> best_settings;
  std::int64_t evals_used = 0;
};

CriticalVisibilityResult critical_visibility(double beta, DistanceKind dkind,
                                             const EntropyKind& ekind,
                                             const OptimizerConfig& config,
                                             const CriticalVisibilityOptions& options = {});

enum class SweepMode { ViolationAtFixedV, CriticalVisibility };

struct SweepRow {
  double q = 1.0;
  double beta = 1.0;
  std::optional<double> visibility;
  DistanceKind dkind = DistanceKind::D1;
  EntropyKind ekind = EntropyKind::shannon();
  std::optional<double> min_violation;
  std::optional<double> v_c;
  int restarts = 0;
  std::uint64_t seed = 0;
  std::int64_t evals = 0;
  /// Best settings of this row, used to warm-start the next grid point.
  std::optional<QuadrangleSettings> best_settings;
};

/// CSV-ready row for one V_c run; min_violation holds the value at V = 1.
SweepRow to_sweep_row(const CriticalVisibilityResult& result, const OptimizerConfig& config);

struct SweepOptions {
  SweepMode mode = SweepMode::ViolationAtFixedV;
  double visibility = 1.0;
  CriticalVisibilityOptions vc;
  /// Seed each grid point with the previous point's best settings.
  bool chain_warm_starts = true;
};

/// Tsallis entropy over `q_grid`; q = 1 runs through the Shannon branch and
/// is cross-checked against an explicit Shannon evaluation.
std::vector<SweepRow> sweep_q(double beta, DistanceKind dkind, std::span<const double> q_grid,
                              const OptimizerConfig& config, const SweepOptions& options = {});

std::vector<SweepRow> sweep_beta(std::span<const double> beta_grid, DistanceKind dkind,
                                 const EntropyKind& ekind, const OptimizerConfig& config,
                                 const SweepOptions& options = {});

/// Inclusive arithmetic grid lo, lo + step, ..., hi (hi is kept when the
/// last step lands within 1e-9 of it).
std::vector<double> arithmetic_grid(double lo, double hi, double step);

/// Random distribution on 3x3x3: flat, sparse, peaked, or a noisy
/// functional chain.
std::vector<double> random_tripartite(std::mt19937_64& rng);

/// Pairwise marginals of a 3x3x3 distribution indexed [x][y][z].
struct PairwiseMarginals {
  JointDistribution xy;
  JointDistribution yz;
  JointDistribution xz;
};
PairwiseMarginals pairwise_marginals(std::span<const double> p_xyz);

struct TriangleCounterexample {
  std::vector<double> p_xyz;
  double d_xy = 0.0;
  double d_yz = 0.0;
  double d_xz = 0.0;
  /// Variable routed through ('X', 'Y' or 'Z'); the excess is the direct
  /// distance between the other two minus the two-leg detour.
  char middle = 'Y';
  double excess = 0.0;
  std::int64_t trial = 0;
};

/// First sampled distribution where some direct distance exceeds the detour
/// through the third variable by more than 1e-9.
std::optional<TriangleCounterexample> triangle_counterexample(const EntropyKind& ekind,
                                                              DistanceKind dkind,
                                                              std::int64_t trials,
                                                              std::uint64_t seed);

std::optional<TriangleCounterexample> renyi_triangle_counterexample(double q,
                                                                    std::int64_t trials,
                                                                    std::uint64_t seed);

struct MetricAuditRow {
  DistanceKind dkind = DistanceKind::D1;
  EntropyKind ekind = EntropyKind::shannon();
  /// min over samples and variable orderings of d(X,Y) + d(Y,Z) - d(X,Z).
  double worst_triangle_slack = 0.0;
  /// min distance seen (non-negativity).
  double min_distance = 0.0;
  /// max |d(X,Y) - d(Y,X)|.
  double worst_asymmetry = 0.0;
  std::int64_t samples = 0;
};

/// Checks the metric axioms for every entropic distance under each entropy.
std::vector<MetricAuditRow> metric_audit(std::span<const EntropyKind> kinds, std::int64_t samples,
                                         std::uint64_t seed);

}  // namespace ebell
