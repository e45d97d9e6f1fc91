#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ebell/errors.hpp"
#include "ebell/nelder_mead.hpp"
#include "ebell/search.hpp"

namespace ebell {
namespace {

constexpr double kPi = std::numbers::pi;
const double kTsirelson = 2.0 - 2.0 * std::numbers::sqrt2;

OptimizerConfig small_config(int restarts, std::uint64_t seed = 1) {
  OptimizerConfig c;
  c.restarts = restarts;
  c.seed = seed;
  return c;
}

std::vector<double> random_angles(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::vector<double> x(n);
  for (auto& a : x) a = angle(rng);
  return x;
}

TEST(OptimizerConfig, Validation) {
  OptimizerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.restarts = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.objective_tolerance = 0.0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.max_evals_per_restart = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.parallel_workers = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(Streams, DeterministicAndDistinct) {
  auto a = derived_stream(42, 3), b = derived_stream(42, 3), c = derived_stream(42, 4),
       d = derived_stream(43, 3), e = derived_stream(42, 3, 1);
  const auto first = a();
  EXPECT_EQ(first, b());
  EXPECT_NE(first, c());
  EXPECT_NE(first, d());
  EXPECT_NE(first, e());
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform01(a);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(NelderMead, Quadratic) {
  const auto f = [](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * (x[i] - 0.5 * i) * (x[i] - 0.5 * i);
    return s;
  };
  const std::vector<double> start(6, 3.0);
  const auto r = nelder_mead(f, start, {});
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.value, 1e-7);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(r.x[i], 0.5 * i, 1e-3);
}

TEST(NelderMead, Rosenbrock) {
  const auto f = [](std::span<const double> x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  const std::vector<double> start{-1.2, 1.0};
  NelderMeadOptions o;
  o.tolerance = 1e-14;
  const auto r = nelder_mead(f, start, o);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 1e-4);
}

TEST(NelderMead, RespectsBudget) {
  const auto f = [](std::span<const double> x) { return std::sin(x[0]) * std::cos(3 * x[1]) + x[2]; };
  const std::vector<double> start{0.1, 0.2, 0.3};
  NelderMeadOptions o;
  o.max_evals = 37;
  const auto r = nelder_mead(f, start, o);
  EXPECT_LE(r.evals, 37);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.value, f(r.x));
}

TEST(ViolationObjective, MatchesReferenceRoute) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u;
  for (auto dk : kEntropicDistances)
    for (const auto& ek : {EntropyKind::shannon(), EntropyKind::tsallis(1.1), EntropyKind::tsallis(2.7)})
      for (int trial = 0; trial < 10; ++trial) {
        const NoisyStateParams state{u(rng), u(rng), 3};
        const ViolationObjective obj(state, dk, ek);
        ASSERT_EQ(obj.num_parameters(), 24u);
        const auto x = random_angles(24, rng);
        const auto ref = evaluate_quadrangle(make_state(state), obj.settings_from(x), dk, ek);
        EXPECT_NEAR(obj(x), ref.violation, 1e-12);
        const auto rep = obj.report(x);
        for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(rep.distances()[i], ref.distances()[i], 1e-12);
      }
}

TEST(ViolationObjective, QubitCovariance) {
  std::mt19937_64 rng(32);
  const NoisyStateParams state{1.0, 0.9, 2};
  const ViolationObjective obj(state, DistanceKind::Covariance, EntropyKind::shannon());
  ASSERT_EQ(obj.num_parameters(), 8u);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_angles(8, rng);
    EXPECT_NEAR(obj(x), evaluate_chsh_covariance(make_state(state), obj.settings_from(x)).violation,
                1e-12);
  }
}

TEST(ViolationObjective, AnglesRoundTrip) {
  std::mt19937_64 rng(33);
  const ViolationObjective obj({0.5, 1.0, 3}, DistanceKind::D1, EntropyKind::shannon());
  const auto x = random_angles(24, rng);
  EXPECT_EQ(obj.angles_from(obj.settings_from(x)), x);
}

TEST(MinimizeViolation, WhiteNoiseNeverViolates) {
  const auto r = minimize_violation({1.0, 0.0, 3}, DistanceKind::D1, EntropyKind::shannon(),
                                    small_config(20));
  EXPECT_GE(r.best_violation, -1e-9);
  EXPECT_NEAR(r.best_violation, 4 * std::log(3.0), 1e-10);
}

TEST(MinimizeViolation, SeparableGuardAcrossKinds) {
  for (auto dk : kEntropicDistances)
    for (const auto& ek : {EntropyKind::shannon(), EntropyKind::tsallis(2), EntropyKind::tsallis(5)}) {
      const auto r = minimize_violation({0.0, 0.0, 3}, dk, ek, small_config(2));
      EXPECT_GE(r.best_violation, -1e-9);
    }
}

TEST(MinimizeViolation, MaximallyEntangledViolates) {
  const auto r = minimize_violation({1.0, 1.0, 3}, DistanceKind::D1, EntropyKind::shannon(),
                                    small_config(8));
  EXPECT_LT(r.best_violation, -0.5);
}

TEST(MinimizeViolation, TsirelsonBound) {
  const auto r = minimize_violation({1.0, 1.0, 2}, DistanceKind::Covariance,
                                    EntropyKind::shannon(), small_config(50, 7));
  EXPECT_NEAR(r.best_violation, kTsirelson, 1e-6);
  EXPECT_GE(r.best_violation, kTsirelson - 1e-12);
}

TEST(MinimizeViolation, Bookkeeping) {
  const auto r = minimize_violation({0.5, 1.0, 3}, DistanceKind::D2, EntropyKind::tsallis(2),
                                    small_config(5, 99));
  EXPECT_EQ(r.seed, 99u);
  EXPECT_EQ(r.restarts_run, 5);
  ASSERT_EQ(r.restart_values.size(), 5u);
  const auto best = std::min_element(r.restart_values.begin(), r.restart_values.end());
  EXPECT_EQ(r.restart_index_of_best, best - r.restart_values.begin());
  EXPECT_NEAR(*best, r.best_violation, 1e-12);
  EXPECT_GT(r.evals_used, 5);
  EXPECT_LE(r.evals_used, 5 * 5000);
  // re-evaluation through the reference route
  const auto ref = evaluate_quadrangle(make_state({0.5, 1.0, 3}), r.best_settings,
                                       DistanceKind::D2, EntropyKind::tsallis(2));
  EXPECT_NEAR(ref.violation, r.best_violation, 1e-12);
  EXPECT_EQ(ref.violation, r.report.violation);
  for (const auto* s : {&r.best_settings.a, &r.best_settings.a_prime, &r.best_settings.b,
                        &r.best_settings.b_prime})
    for (const auto& mz : s->mixers()) {
      EXPECT_GE(mz.phi, 0.0);
      EXPECT_LT(mz.omega, 2 * kPi);
    }
}

TEST(MinimizeViolation, IndependentOfWorkerCount) {
  auto c1 = small_config(6, 5);
  auto c3 = c1;
  c3.parallel_workers = 3;
  const NoisyStateParams state{0.2, 0.95, 3};
  const auto a = minimize_violation(state, DistanceKind::D1Norm, EntropyKind::tsallis(1.7), c1);
  const auto b = minimize_violation(state, DistanceKind::D1Norm, EntropyKind::tsallis(1.7), c3);
  EXPECT_EQ(a.best_violation, b.best_violation);
  EXPECT_EQ(a.best_settings, b.best_settings);
  EXPECT_EQ(a.evals_used, b.evals_used);
  EXPECT_EQ(a.restart_values, b.restart_values);
  EXPECT_EQ(a.restart_index_of_best, b.restart_index_of_best);
}

TEST(MinimizeViolation, SeedChangesTheRun) {
  const NoisyStateParams state{1.0, 1.0, 3};
  const auto a = minimize_violation(state, DistanceKind::D1, EntropyKind::shannon(), small_config(1, 1));
  const auto b = minimize_violation(state, DistanceKind::D1, EntropyKind::shannon(), small_config(1, 2));
  EXPECT_NE(a.best_settings, b.best_settings);
}

TEST(MinimizeViolation, WarmStartIsNeverWorse) {
  const NoisyStateParams state{1.0, 1.0, 3};
  const auto first = minimize_violation(state, DistanceKind::D1, EntropyKind::shannon(), small_config(2));
  SearchOptions so;
  so.warm_starts.push_back(first.best_settings);
  const auto second =
      minimize_violation(state, DistanceKind::D1, EntropyKind::shannon(), small_config(1, 77), so);
  EXPECT_LE(second.best_violation, first.best_violation + 1e-12);
  EXPECT_EQ(second.restart_values.size(), 2u);
}

TEST(MinimizeViolation, StopsAfterViolatingBatch) {
  SearchOptions so;
  so.stop_on_violation = true;
  const auto r = minimize_violation({1.0, 1.0, 3}, DistanceKind::D1, EntropyKind::shannon(),
                                    small_config(20), so);
  EXPECT_LT(r.best_violation, -1e-9);
  EXPECT_EQ(r.restarts_run, kRestartBatch);
  // without a violation the whole budget runs
  const auto w = minimize_violation({1.0, 0.0, 3}, DistanceKind::D1, EntropyKind::shannon(),
                                    small_config(10), so);
  EXPECT_EQ(w.restarts_run, 10);
}

TEST(MinimizeViolation, RejectsBadInput) {
  EXPECT_THROW(minimize_violation({1.0, 1.0, 3}, DistanceKind::Covariance, EntropyKind::shannon(),
                                  small_config(1)),
               ArgumentError);
  EXPECT_THROW(minimize_violation({2.0, 1.0, 3}, DistanceKind::D1, EntropyKind::shannon(),
                                  small_config(1)),
               ArgumentError);
  EXPECT_THROW(minimize_violation({1.0, 1.0, 3}, DistanceKind::D1, EntropyKind::shannon(),
                                  small_config(0)),
               ArgumentError);
}

TEST(CriticalVisibility, CertificatesAndBracket) {
  CriticalVisibilityOptions o;
  o.v_precision = 1e-2;
  o.grid_points = 5;
  const auto r = critical_visibility(0.0, DistanceKind::D1, EntropyKind::tsallis(2),
                                     small_config(4), o);
  ASSERT_TRUE(r.v_c.has_value());
  EXPECT_TRUE(r.violated_at_v1);
  EXPECT_TRUE(r.upper.violated());
  EXPECT_FALSE(r.lower.violated());
  EXPECT_EQ(*r.v_c, r.upper.visibility);
  EXPECT_NEAR(r.bracket_width, r.upper.visibility - r.lower.visibility, 1e-15);
  EXPECT_LE(r.bracket_width, 1e-2);
  // closed form for this state and entropy: R - L = 8/9 + V^2 (1/9 - (1+sqrt2)/2)
  const double closed = std::sqrt((8.0 / 9) / ((1 + std::numbers::sqrt2) / 2 - 1.0 / 9));
  EXPECT_NEAR(*r.v_c, closed, 0.011);
  EXPECT_EQ(r.grid.size(), 5u);
  for (const auto& g : r.grid) EXPECT_EQ(g.violated(), g.visibility >= r.upper.visibility);
  EXPECT_TRUE(r.best_settings.has_value());
  EXPECT_EQ(r.probes.front().visibility, 1.0);
}

TEST(CriticalVisibility, NoViolationAtFullVisibility) {
  CriticalVisibilityOptions o;
  o.grid_check = false;
  const auto r = critical_visibility(0.0, DistanceKind::D1, EntropyKind::tsallis(30),
                                     small_config(2), o);
  EXPECT_FALSE(r.v_c.has_value());
  EXPECT_FALSE(r.violated_at_v1);
  EXPECT_EQ(r.probes.size(), 1u);
}

TEST(CriticalVisibility, BracketHintIsOnlyAHint) {
  CriticalVisibilityOptions o;
  o.v_precision = 1e-2;
  o.grid_check = false;
  o.bracket_hint = std::pair{0.3, 0.4};  // wrong on purpose
  const auto r = critical_visibility(0.0, DistanceKind::D1, EntropyKind::tsallis(2),
                                     small_config(4), o);
  ASSERT_TRUE(r.v_c.has_value());
  EXPECT_GT(*r.v_c, 0.85);
  EXPECT_TRUE(r.upper.violated());
  EXPECT_FALSE(r.lower.violated());
}

TEST(CriticalVisibility, RejectsBadPrecision) {
  CriticalVisibilityOptions o;
  o.v_precision = 0.0;
  EXPECT_THROW(critical_visibility(1.0, DistanceKind::D1, EntropyKind::shannon(), small_config(1), o),
               ArgumentError);
}

TEST(Sweep, SingleQEqualsShannonRun) {
  const std::vector<double> grid{1.0};
  const auto cfg = small_config(3, 11);
  const auto rows = sweep_q(0.5, DistanceKind::D2, grid, cfg);
  ASSERT_EQ(rows.size(), 1u);
  const auto direct = minimize_violation({0.5, 1.0, 3}, DistanceKind::D2, EntropyKind::shannon(), cfg);
  EXPECT_NEAR(*rows[0].min_violation, direct.best_violation, 1e-6);
  EXPECT_EQ(rows[0].q, 1.0);
  EXPECT_FALSE(rows[0].v_c.has_value());
}

TEST(Sweep, SingleBetaEqualsDirectRun) {
  const std::vector<double> grid{1.0};
  const auto cfg = small_config(3, 12);
  const auto rows = sweep_beta(grid, DistanceKind::D1, EntropyKind::tsallis(2), cfg);
  const auto direct = minimize_violation({1.0, 1.0, 3}, DistanceKind::D1, EntropyKind::tsallis(2), cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(*rows[0].min_violation, direct.best_violation, 1e-12);
  EXPECT_EQ(rows[0].evals, direct.evals_used);
}

TEST(Sweep, RowsFollowTheGrid) {
  const std::vector<double> grid{1.0, 2.0, 3.0};
  SweepOptions so;
  so.visibility = 0.9;
  const auto rows = sweep_q(1.0, DistanceKind::D1, grid, small_config(2), so);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(rows[i].q, grid[i]);
    EXPECT_EQ(*rows[i].visibility, 0.9);
    EXPECT_EQ(rows[i].ekind.family(), EntropyKind::Family::Tsallis);
  }
  const std::vector<double> unsorted{2.0, 1.0};
  EXPECT_THROW(sweep_q(1.0, DistanceKind::D1, unsorted, small_config(1)), ArgumentError);
  const std::vector<double> below{0.5};
  EXPECT_THROW(sweep_q(1.0, DistanceKind::D1, below, small_config(1)), ArgumentError);
}

TEST(Sweep, ArithmeticGrid) {
  const auto g = arithmetic_grid(1.0, 5.0, 0.1);
  ASSERT_EQ(g.size(), 41u);
  EXPECT_EQ(g.front(), 1.0);
  EXPECT_EQ(g.back(), 5.0);
  EXPECT_NEAR(g[17], 2.7, 1e-12);
  EXPECT_EQ(arithmetic_grid(0.0, 0.0, 0.25).size(), 1u);
  EXPECT_THROW(arithmetic_grid(0.0, 1.0, 0.0), ArgumentError);
  EXPECT_THROW(arithmetic_grid(1.0, 0.0, 0.1), ArgumentError);
}

TEST(Tripartite, ValidDistributions) {
  auto rng = derived_stream(5, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto p = random_tripartite(rng);
    ASSERT_EQ(p.size(), 27u);
    double sum = 0.0;
    for (double x : p) {
      ASSERT_GE(x, 0.0);
      sum += x;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Tripartite, PairwiseMarginals) {
  std::vector<double> p(27, 0.0);
  p[1 * 9 + 2 * 3 + 0] = 0.5;  // x=1, y=2, z=0
  p[0] = 0.5;
  const auto m = pairwise_marginals(p);
  EXPECT_EQ(m.xy(1, 2), 0.5);
  EXPECT_EQ(m.yz(2, 0), 0.5);
  EXPECT_EQ(m.xz(1, 0), 0.5);
  EXPECT_EQ(m.xz(0, 0), 0.5);
  EXPECT_THROW(pairwise_marginals(std::vector<double>(26, 1.0 / 26)), ArgumentError);
}

TEST(Triangle, RenyiCounterexampleExists) {
  const auto c = renyi_triangle_counterexample(2.0, 100000, 1);
  ASSERT_TRUE(c.has_value());
  EXPECT_GT(c->excess, 1e-9);
  // recompute from the stored distribution
  const auto m = pairwise_marginals(c->p_xyz);
  const auto k = EntropyKind::renyi(2.0);
  EXPECT_NEAR(entropic_distance(m.xy, DistanceKind::D1, k), c->d_xy, 1e-14);
  EXPECT_NEAR(entropic_distance(m.yz, DistanceKind::D1, k), c->d_yz, 1e-14);
  EXPECT_NEAR(entropic_distance(m.xz, DistanceKind::D1, k), c->d_xz, 1e-14);
  const double excess = c->middle == 'Y'   ? c->d_xz - c->d_xy - c->d_yz
                        : c->middle == 'X' ? c->d_yz - c->d_xy - c->d_xz
                                           : c->d_xy - c->d_xz - c->d_yz;
  EXPECT_NEAR(excess, c->excess, 1e-14);
}

TEST(Triangle, RenyiSearchIsDeterministic) {
  const auto a = renyi_triangle_counterexample(2.0, 100000, 3);
  const auto b = renyi_triangle_counterexample(2.0, 100000, 3);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->p_xyz, b->p_xyz);
  EXPECT_EQ(a->trial, b->trial);
}

TEST(Triangle, TsallisHasNoCounterexample) {
  for (auto dk : kEntropicDistances)
    EXPECT_FALSE(triangle_counterexample(EntropyKind::tsallis(2.0), dk, 20000, 1).has_value());
}

TEST(MetricAudit, AxiomsHold) {
  const std::vector<EntropyKind> kinds{EntropyKind::shannon(), EntropyKind::tsallis(1.5),
                                       EntropyKind::tsallis(3)};
  const auto rows = metric_audit(kinds, 2000, 4);
  ASSERT_EQ(rows.size(), 12u);
  for (const auto& r : rows) {
    EXPECT_GE(r.worst_triangle_slack, -1e-12) << to_string(r.dkind) << ' ' << r.ekind.q();
    EXPECT_GE(r.min_distance, -1e-12);
    EXPECT_LE(r.worst_asymmetry, 1e-12);
    EXPECT_EQ(r.samples, 2000);
  }
}

TEST(MetricAudit, RenyiIsCaught) {
  const std::vector<EntropyKind> kinds{EntropyKind::renyi(2.0)};
  const auto rows = metric_audit(kinds, 20000, 1);
  EXPECT_LT(rows[0].worst_triangle_slack, -1e-9);  // D1 row
}

}  // namespace
}  // namespace ebell
