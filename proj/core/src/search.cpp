#include "ebell/search.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "ebell/errors.hpp"
#include "ebell/nelder_mead.hpp"

namespace ebell {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kReevaluationTolerance = 1e-12;
constexpr double kRandomStartStep = 1.0;
constexpr double kWarmStartStep = 0.2;

// Runs fn(i) for i in [0, count) on up to `workers` threads. Results are
// written by index, so the outcome is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  const auto threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(workers, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

// M = T_{d,d-1} ... T_{2,1} for one setting with zero diagonal phases.
// Right-multiplying by T_{pq} only mixes columns p and q.
void mixer_product(int d, std::span<const double> angles, std::array<Complex, 9>& m) {
  m.fill(Complex{});
  for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i * d + i)] = 1.0;
  std::size_t k = 0;
  for (int p = d; p >= 2; --p) {
    for (int q = p - 1; q >= 1; --q, ++k) {
      const double phi = angles[2 * k];
      const double omega = angles[2 * k + 1];
      const double s = std::sin(omega);
      const double c = std::cos(omega);
      const Complex phase = std::polar(1.0, phi);
      const Complex t_pp = phase * s;
      const Complex t_qq = -s;
      const Complex t_pq = phase * c;
      const Complex t_qp = c;
      const int pi = p - 1;
      const int qi = q - 1;
      for (int r = 0; r < d; ++r) {
        const Complex mp = m[static_cast<std::size_t>(r * d + pi)];
        const Complex mq = m[static_cast<std::size_t>(r * d + qi)];
        m[static_cast<std::size_t>(r * d + pi)] = mp * t_pp + mq * t_qp;
        m[static_cast<std::size_t>(r * d + qi)] = mp * t_pq + mq * t_qq;
      }
    }
  }
}

struct RunOutcome {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  std::int64_t evals = 0;
};

}  // namespace

void OptimizerConfig::validate() const {
  if (restarts < 1) throw ArgumentError("restarts must be >= 1");
  if (max_evals_per_restart < 1) throw ArgumentError("max_evals_per_restart must be >= 1");
  if (!(objective_tolerance > 0.0)) throw ArgumentError("objective_tolerance must be > 0");
  if (parallel_workers < 1) throw ArgumentError("parallel_workers must be >= 1");
}

std::mt19937_64 derived_stream(std::uint64_t master_seed, std::uint64_t index, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// ViolationObjective

ViolationObjective::ViolationObjective(const NoisyStateParams& state, DistanceKind dkind,
                                       const EntropyKind& ekind)
    : state_(state), dkind_(dkind), ekind_(ekind), schmidt_(schmidt_coefficients(state)) {
  if (dkind == DistanceKind::Covariance && state.dim != 2)
    throw ArgumentError("covariance distance needs binary outcomes (d = 2)");
  angles_per_setting_ = static_cast<std::size_t>(state.dim * (state.dim - 1));
}

QuadrangleReport ViolationObjective::report(std::span<const double> angles) const {
  if (angles.size() != num_parameters())
    throw ArgumentError("ViolationObjective: expected " + std::to_string(num_parameters()) +
                        " angles");
  const int d = state_.dim;
  const auto du = static_cast<std::size_t>(d);
  std::array<std::array<Complex, 9>, 4> m;
  for (std::size_t s = 0; s < 4; ++s)
    mixer_product(d, angles.subspan(s * angles_per_setting_, angles_per_setting_), m[s]);

  const double v = state_.visibility;
  const double noise = (1.0 - v) / static_cast<double>(du * du);

  auto distance = [&](const std::array<Complex, 9>& ma, const std::array<Complex, 9>& mb) {
    std::array<double, 9> table{};
    for (std::size_t a = 0; a < du; ++a) {
      for (std::size_t b = 0; b < du; ++b) {
        Complex amp{};
        for (std::size_t k = 0; k < du; ++k) amp += schmidt_[k] * ma[k * du + a] * mb[k * du + b];
        table[a * du + b] = v * std::norm(amp) + noise;
      }
    }
    const std::span<double> flat(table.data(), du * du);
    normalize_probabilities(flat, false);
    if (dkind_ == DistanceKind::Covariance)
      return 1.0 - (table[0] - table[1] - table[2] + table[3]);
    std::array<double, 3> px{}, py{};
    for (std::size_t a = 0; a < du; ++a)
      for (std::size_t b = 0; b < du; ++b) {
        px[a] += table[a * du + b];
        py[b] += table[a * du + b];
      }
    return distance_from_entropies(dkind_, entropy_unchecked({px.data(), du}, ekind_),
                                   entropy_unchecked({py.data(), du}, ekind_),
                                   entropy_unchecked(flat, ekind_));
  };

  // settings order in the vector: A, A', B, B'
  return make_quadrangle_report(distance(m[0], m[2]), distance(m[1], m[2]), distance(m[1], m[3]),
                                distance(m[0], m[3]));
}

double ViolationObjective::operator()(std::span<const double> angles) const {
  return report(angles).violation;
}

QuadrangleSettings ViolationObjective::settings_from(std::span<const double> angles) const {
  if (angles.size() != num_parameters())
    throw ArgumentError("ViolationObjective: expected " + std::to_string(num_parameters()) +
                        " angles");
  auto slice = [&](std::size_t s) {
    return PhaseSettings::from_angles(state_.dim,
                                      angles.subspan(s * angles_per_setting_, angles_per_setting_));
  };
  return {slice(0), slice(1), slice(2), slice(3)};
}

std::vector<double> ViolationObjective::angles_from(const QuadrangleSettings& settings) const {
  settings.validate();
  if (settings.dim() != state_.dim)
    throw ArgumentError("ViolationObjective: settings dimension does not match the state");
  std::vector<double> out;
  out.reserve(num_parameters());
  for (const auto* s : {&settings.a, &settings.a_prime, &settings.b, &settings.b_prime})
    for (const auto& mz : s->mixers()) {
      out.push_back(mz.phi);
      out.push_back(mz.omega);
    }
  return out;
}

// ---------------------------------------------------------------------------
// minimize_violation

OptimizationResult minimize_violation(const NoisyStateParams& state, DistanceKind dkind,
                                      const EntropyKind& ekind, const OptimizerConfig& config,
                                      const SearchOptions& options) {
  config.validate();
  state.validate();
  const ViolationObjective objective(state, dkind, ekind);
  const std::function<double(std::span<const double>)> f = std::cref(objective);

  // Candidate i < warm.size() is warm start i; after that, random restart
  // i - warm.size().
  const std::size_t warm = options.warm_starts.size();
  const std::size_t total = warm + static_cast<std::size_t>(config.restarts);
  std::vector<RunOutcome> outcomes(total);

  auto run = [&](std::size_t i) {
    std::vector<double> start;
    NelderMeadOptions nm;
    nm.tolerance = config.objective_tolerance;
    nm.max_evals = config.max_evals_per_restart;
    if (i < warm) {
      start = objective.angles_from(options.warm_starts[i]);
      nm.initial_step = kWarmStartStep;
    } else {
      auto rng = derived_stream(config.seed, i - warm);
      start.resize(objective.num_parameters());
      for (auto& x : start) x = kTwoPi * uniform01(rng);
      nm.initial_step = kRandomStartStep;
    }
    auto r = nelder_mead(f, start, nm);
    outcomes[i] = {std::move(r.x), r.value, r.evals};
  };

  std::size_t done = 0;
  auto best_so_far = [&] {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < done; ++i) best = std::min(best, outcomes[i].value);
    return best;
  };
  auto run_range = [&](std::size_t end) {
    parallel_for(end - done, config.parallel_workers, [&](std::size_t k) { run(done + k); });
    done = end;
  };

  if (!options.stop_on_violation) {
    run_range(total);
  } else {
    if (warm > 0) run_range(warm);
    while (done < total && !(best_so_far() < -kViolationThreshold))
      run_range(std::min(total, done + static_cast<std::size_t>(kRestartBatch)));
  }

  std::size_t best_index = 0;
  std::int64_t evals = 0;
  for (std::size_t i = 0; i < done; ++i) {
    evals += outcomes[i].evals;
    if (outcomes[i].value < outcomes[best_index].value) best_index = i;
  }

  OptimizationResult result;
  result.seed = config.seed;
  result.evals_used = evals;
  result.restarts_run = static_cast<int>(done > warm ? done - warm : 0);
  result.restart_index_of_best = best_index < warm ? -1 - static_cast<int>(best_index)
                                                   : static_cast<int>(best_index - warm);
  result.best_settings = [&] {
    auto s = objective.settings_from(outcomes[best_index].x);
    return QuadrangleSettings{s.a.folded(), s.a_prime.folded(), s.b.folded(), s.b_prime.folded()};
  }();
  result.report = evaluate_quadrangle(make_state(state), result.best_settings, dkind, ekind);
  result.best_violation = result.report.violation;
  if (std::abs(result.best_violation - outcomes[best_index].value) > kReevaluationTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "minimize_violation: optimizer value " << outcomes[best_index].value
        << " does not re-verify (reference route gives " << result.best_violation << ")";
    throw NumericalError(msg.str());
  }
  result.restart_values.reserve(done);
  for (std::size_t i = 0; i < done; ++i) result.restart_values.push_back(outcomes[i].value);
  return result;
}

// ---------------------------------------------------------------------------
// critical_visibility

CriticalVisibilityResult critical_visibility(double beta, DistanceKind dkind,
                                             const EntropyKind& ekind,
                                             const OptimizerConfig& config,
                                             const CriticalVisibilityOptions& options) {
  config.validate();
  NoisyStateParams{beta, 1.0, 3}.validate();
  if (!(options.v_precision > 0.0)) throw ArgumentError("v_precision must be > 0");

  CriticalVisibilityResult out;
  out.q = ekind.family() == EntropyKind::Family::Shannon ? 1.0 : ekind.q();
  out.beta = beta;
  out.dkind = dkind;
  out.ekind = ekind;

  std::vector<QuadrangleSettings> incumbent = options.warm_starts;
  std::vector<VisibilityProbe> known;

  auto probe = [&](double v) {
    SearchOptions so;
    so.warm_starts = incumbent;
    so.stop_on_violation = true;
    const auto r = minimize_violation({beta, v, 3}, dkind, ekind, config, so);
    VisibilityProbe p{v, r.best_violation, r.evals_used};
    out.evals_used += r.evals_used;
    out.probes.push_back(p);
    if (p.violated()) {
      // keep the settings found at the smallest violating V as the warm start
      if (!out.best_settings || v <= out.upper.visibility) {
        out.best_settings = r.best_settings;
        incumbent = options.warm_starts;
        incumbent.insert(incumbent.begin(), r.best_settings);
      }
    }
    return p;
  };

  const VisibilityProbe at_one = probe(1.0);
  if (!at_one.violated()) {
    out.violated_at_v1 = false;
    out.upper = at_one;
    return out;
  }
  out.violated_at_v1 = true;
  out.upper = at_one;
  out.lower = probe(0.0);
  if (out.lower.violated()) {
    // a violation at pure white noise would be a bug somewhere upstream
    throw NumericalError("critical_visibility: violation reported at V = 0");
  }

  auto refine = [&](double v) {
    if (!(v > out.lower.visibility && v < out.upper.visibility)) return;
    const auto p = probe(v);
    (p.violated() ? out.upper : out.lower) = p;
  };
  if (options.bracket_hint) {
    refine(std::clamp(options.bracket_hint->second, 0.0, 1.0));
    refine(std::clamp(options.bracket_hint->first, 0.0, 1.0));
  }
  while (out.upper.visibility - out.lower.visibility > options.v_precision)
    refine(0.5 * (out.lower.visibility + out.upper.visibility));

  out.v_c = out.upper.visibility;
  out.bracket_width = out.upper.visibility - out.lower.visibility;

  if (options.grid_check && options.grid_points >= 2) {
    for (int k = 0; k < options.grid_points; ++k) {
      const double v = static_cast<double>(k) / (options.grid_points - 1);
      VisibilityProbe p;
      if (v == 1.0) {
        p = at_one;
      } else if (v == 0.0) {
        p = out.lower.visibility == 0.0 ? out.lower : probe(0.0);
      } else if (v > out.lower.visibility && v < out.upper.visibility) {
        continue;
      } else {
        p = probe(v);
      }
      out.grid.push_back(p);
      const bool expect_violation = v >= out.upper.visibility;
      if (p.violated() != expect_violation) {
        std::ostringstream msg;
        msg << "critical_visibility: min violation is not monotone in V (metric "
            << to_string(dkind) << ", " << ekind.name() << " q=" << out.q << ", beta=" << beta
            << "): bracket [" << out.lower.visibility << ", " << out.upper.visibility
            << "] but V=" << v << " gives " << p.min_violation;
        throw NumericalError(msg.str());
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// sweeps

std::vector<double> arithmetic_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw ArgumentError("grid needs step > 0 and hi >= lo");
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double x = lo + static_cast<double>(k) * step;
    if (x > hi + 1e-9) break;
    out.push_back(std::abs(x - hi) <= 1e-9 ? hi : x);
  }
  return out;
}

SweepRow to_sweep_row(const CriticalVisibilityResult& result, const OptimizerConfig& config) {
  SweepRow row;
  row.q = result.q;
  row.beta = result.beta;
  row.dkind = result.dkind;
  row.ekind = result.ekind;
  row.v_c = result.v_c;
  if (!result.probes.empty()) row.min_violation = result.probes.front().min_violation;
  row.restarts = config.restarts;
  row.seed = config.seed;
  row.evals = result.evals_used;
  row.best_settings = result.best_settings;
  return row;
}

namespace {

constexpr double kChainBracketHalfWidth = 0.02;

SweepRow run_sweep_point(double beta, DistanceKind dkind, const EntropyKind& ekind,
                         const OptimizerConfig& config, const SweepOptions& options,
                         const SweepRow* previous) {
  SweepRow row;
  row.q = ekind.family() == EntropyKind::Family::Shannon ? 1.0 : ekind.q();
  row.beta = beta;
  row.dkind = dkind;
  row.ekind = ekind;
  row.restarts = config.restarts;
  row.seed = config.seed;

  std::vector<QuadrangleSettings> warm;
  if (options.chain_warm_starts && previous && previous->best_settings)
    warm.push_back(*previous->best_settings);

  if (options.mode == SweepMode::ViolationAtFixedV) {
    row.visibility = options.visibility;
    SearchOptions so;
    so.warm_starts = warm;
    const auto r = minimize_violation({beta, options.visibility, 3}, dkind, ekind, config, so);
    row.min_violation = r.best_violation;
    row.evals = r.evals_used;
    row.best_settings = r.best_settings;
  } else {
    auto vc_opts = options.vc;
    vc_opts.warm_starts.insert(vc_opts.warm_starts.end(), warm.begin(), warm.end());
    if (options.chain_warm_starts && previous && previous->v_c && !vc_opts.bracket_hint)
      vc_opts.bracket_hint = std::pair{*previous->v_c - kChainBracketHalfWidth,
                                       *previous->v_c + kChainBracketHalfWidth};
    row = to_sweep_row(critical_visibility(beta, dkind, ekind, config, vc_opts), config);
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_q(double beta, DistanceKind dkind, std::span<const double> q_grid,
                              const OptimizerConfig& config, const SweepOptions& options) {
  if (!std::is_sorted(q_grid.begin(), q_grid.end()))
    throw ArgumentError("sweep_q: q grid must be sorted");
  std::vector<SweepRow> rows;
  for (double q : q_grid) {
    const auto ekind = EntropyKind::tsallis(q);
    rows.push_back(run_sweep_point(beta, dkind, ekind, config, options,
                                   rows.empty() ? nullptr : &rows.back()));
    if (q == 1.0 && rows.back().best_settings) {
      const double v = options.mode == SweepMode::ViolationAtFixedV
                           ? options.visibility
                           : rows.back().v_c.value_or(1.0);
      const auto rho = make_state({beta, v, 3});
      const auto& s = *rows.back().best_settings;
      const double as_tsallis = evaluate_quadrangle(rho, s, dkind, ekind).violation;
      const double as_shannon = evaluate_quadrangle(rho, s, dkind, EntropyKind::shannon()).violation;
      if (std::abs(as_tsallis - as_shannon) > kReevaluationTolerance)
        throw NumericalError("sweep_q: Tsallis q=1 row disagrees with the Shannon evaluation");
    }
  }
  return rows;
}

std::vector<SweepRow> sweep_beta(std::span<const double> beta_grid, DistanceKind dkind,
                                 const EntropyKind& ekind, const OptimizerConfig& config,
                                 const SweepOptions& options) {
  std::vector<SweepRow> rows;
  for (double beta : beta_grid)
    rows.push_back(run_sweep_point(beta, dkind, ekind, config, options,
                                   rows.empty() ? nullptr : &rows.back()));
  return rows;
}

// ---------------------------------------------------------------------------
// tripartite distributions, metric audit, counterexample search

std::vector<double> random_tripartite(std::mt19937_64& rng) {
  std::vector<double> p(27);
  const double style = uniform01(rng);
  const auto pick3 = [&rng] { return static_cast<std::size_t>(3.0 * uniform01(rng)); };
  if (style >= 0.75) {
    // near-functional chain x -> y -> z plus a little noise; keeps triangles tight
    const std::array<std::size_t, 3> f{pick3(), pick3(), pick3()};
    const std::array<std::size_t, 3> g{pick3(), pick3(), pick3()};
    const double noise = std::pow(uniform01(rng), 4.0);
    double sum = 0.0;
    for (auto& x : p) {
      x = noise * -std::log1p(-uniform01(rng));
      sum += x;
    }
    for (std::size_t x = 0; x < 3; ++x) {
      const double w = -std::log1p(-uniform01(rng));
      p[x * 9 + f[x] * 3 + g[f[x]]] += w;
      sum += w;
    }
    for (auto& x : p) x /= sum;
    return p;
  }
  double sum = 0.0;
  while (!(sum > 0.0)) {
    sum = 0.0;
    for (auto& x : p) {
      const double u = uniform01(rng);
      if (style < 0.25) {
        x = -std::log1p(-u);  // flat Dirichlet
      } else if (style < 0.5) {
        x = uniform01(rng) < 0.5 ? 0.0 : -std::log1p(-u);  // sparse support
      } else {
        x = std::pow(u, 1.0 + 12.0 * style);  // peaked
      }
      sum += x;
    }
  }
  for (auto& x : p) x /= sum;
  return p;
}

PairwiseMarginals pairwise_marginals(std::span<const double> p_xyz) {
  if (p_xyz.size() != 27) throw ArgumentError("pairwise_marginals: expected 27 entries");
  std::vector<double> xy(9, 0.0), yz(9, 0.0), xz(9, 0.0);
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t y = 0; y < 3; ++y)
      for (std::size_t z = 0; z < 3; ++z) {
        const double w = p_xyz[x * 9 + y * 3 + z];
        xy[x * 3 + y] += w;
        yz[y * 3 + z] += w;
        xz[x * 3 + z] += w;
      }
  return {JointDistribution::from_table(3, 3, std::move(xy)),
          JointDistribution::from_table(3, 3, std::move(yz)),
          JointDistribution::from_table(3, 3, std::move(xz))};
}

std::optional<TriangleCounterexample> triangle_counterexample(const EntropyKind& ekind,
                                                              DistanceKind dkind,
                                                              std::int64_t trials,
                                                              std::uint64_t seed) {
  auto rng = derived_stream(seed, 0, 0x7472690000000000ULL);
  for (std::int64_t t = 0; t < trials; ++t) {
    auto p = random_tripartite(rng);
    const auto m = pairwise_marginals(p);
    const double d_xy = entropic_distance(m.xy, dkind, ekind);
    const double d_yz = entropic_distance(m.yz, dkind, ekind);
    const double d_xz = entropic_distance(m.xz, dkind, ekind);
    // every variable gets a turn in the middle
    const std::array<std::pair<char, double>, 3> excesses{{{'Y', d_xz - (d_xy + d_yz)},
                                                           {'X', d_yz - (d_xy + d_xz)},
                                                           {'Z', d_xy - (d_xz + d_yz)}}};
    for (const auto& [middle, excess] : excesses)
      if (excess > kViolationThreshold)
        return TriangleCounterexample{std::move(p), d_xy, d_yz, d_xz, middle, excess, t};
  }
  return std::nullopt;
}

std::optional<TriangleCounterexample> renyi_triangle_counterexample(double q,
                                                                    std::int64_t trials,
                                                                    std::uint64_t seed) {
  return triangle_counterexample(EntropyKind::renyi(q), DistanceKind::D1, trials, seed);
}

std::vector<MetricAuditRow> metric_audit(std::span<const EntropyKind> kinds, std::int64_t samples,
                                         std::uint64_t seed) {
  std::vector<MetricAuditRow> rows;
  for (const auto& ekind : kinds)
    for (auto dkind : kEntropicDistances) {
      MetricAuditRow row;
      row.dkind = dkind;
      row.ekind = ekind;
      row.worst_triangle_slack = std::numeric_limits<double>::infinity();
      row.min_distance = std::numeric_limits<double>::infinity();
      rows.push_back(row);
    }

  auto rng = derived_stream(seed, 0, 0x6d65747269630000ULL);
  for (std::int64_t t = 0; t < samples; ++t) {
    const auto p = random_tripartite(rng);
    const auto m = pairwise_marginals(p);
    for (auto& row : rows) {
      const double d_xy = entropic_distance(m.xy, row.dkind, row.ekind);
      const double d_yz = entropic_distance(m.yz, row.dkind, row.ekind);
      const double d_xz = entropic_distance(m.xz, row.dkind, row.ekind);
      const double d_yx = entropic_distance(m.xy.transposed(), row.dkind, row.ekind);
      row.worst_triangle_slack = std::min({row.worst_triangle_slack, d_xy + d_yz - d_xz,
                                           d_xy + d_xz - d_yz, d_xz + d_yz - d_xy});
      row.min_distance = std::min({row.min_distance, d_xy, d_yz, d_xz});
      row.worst_asymmetry = std::max(row.worst_asymmetry, std::abs(d_xy - d_yx));
      ++row.samples;
    }
  }
  return rows;
}

}  // namespace ebell
