#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ebell/errors.hpp"
#include "ebell/version.hpp"

namespace ebell::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string format_exact(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

// ---------------------------------------------------------------------------
// option bundles shared by the subcommands

struct SearchFlags {
  std::uint64_t seed = 1;
  int restarts = 200;
  long long max_evals = 5000;
  double tolerance = 1e-8;
  int workers = 1;

  void attach(CLI::App* app) {
    app->add_option("--seed", seed, "Master seed")->capture_default_str();
    app->add_option("--restarts", restarts, "Random restarts per optimization")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--max-evals", max_evals, "Objective evaluations per restart")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--tolerance", tolerance, "Local descent stopping tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--workers", workers, "Worker threads (never changes results)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  }

  OptimizerConfig config() const {
    OptimizerConfig c;
    c.seed = seed;
    c.restarts = restarts;
    c.max_evals_per_restart = max_evals;
    c.objective_tolerance = tolerance;
    c.parallel_workers = workers;
    c.validate();
    return c;
  }

  // workers is left out: it never affects results
  void record(RunConfig& rc) const {
    rc.set("seed", std::to_string(seed));
    rc.set("restarts", static_cast<long long>(restarts));
    rc.set("max_evals", max_evals);
    rc.set("tolerance", tolerance);
  }
};

struct OutputFlags {
  std::string dir;
  std::string prefix;

  void attach(CLI::App* app, const std::string& default_prefix) {
    prefix = default_prefix;
    app->add_option("--output-dir", dir,
                    std::string("Directory for result files (default: $") + kOutputDirEnv +
                        " or the current directory)");
    app->add_option("--prefix", prefix, "Base name of result files")->capture_default_str();
  }

  std::filesystem::path path(const std::string& extension) const {
    std::filesystem::path base = dir;
    if (base.empty()) {
      const char* env = std::getenv(kOutputDirEnv);
      base = env && *env ? env : ".";
    }
    return base / (prefix + extension);
  }
};

struct EntropyFlags {
  std::string family = "shannon";
  double q = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--entropy", family, "shannon or tsallis")
        ->capture_default_str()
        ->check(CLI::IsMember({"shannon", "tsallis"}));
    app->add_option("--q", q, "Tsallis parameter (>= 1)")->capture_default_str();
  }

  EntropyKind kind() const {
    return family == "shannon" ? EntropyKind::shannon() : EntropyKind::tsallis(q);
  }

  void record(RunConfig& rc) const {
    rc.set("entropy", family);
    rc.set("q", q);
  }
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ArgumentError("cannot open output file " + path.string());
  f << content;
  if (!f) throw ArgumentError("failed writing " + path.string());
}

Json metadata_json(const std::string& command, const RunConfig& rc) {
  Json config = Json::object();
  for (const auto& [k, v] : rc.entries()) config[k] = v;
  return Json{{"artifact", "ebell"}, {"version", kVersion}, {"command", command},
              {"config", config}};
}

Json settings_json(const PhaseSettings& s, const char* name, const char* party) {
  Json mixers = Json::array();
  for (const auto& mz : s.mixers())
    mixers.push_back({{"p", mz.p}, {"q", mz.q}, {"phi", mz.phi}, {"omega", mz.omega}});
  Json alphas = Json::array();
  for (double a : s.alphas()) alphas.push_back(a);
  return {{"setting", name}, {"party", party}, {"mixers", mixers}, {"alphas", alphas}};
}

Json settings_json(const QuadrangleSettings& s) {
  const auto f = [](const PhaseSettings& p) { return p.folded(); };
  return Json::array({settings_json(f(s.a), "A", "alice"), settings_json(f(s.a_prime), "A'", "alice"),
                      settings_json(f(s.b), "B", "bob"), settings_json(f(s.b_prime), "B'", "bob")});
}

Json report_json(const QuadrangleReport& r) {
  return {{"lhs", r.lhs},
          {"rhs", r.rhs},
          {"violation", r.violation},
          {"d_a_b", r.d_a_b},
          {"d_b_a_prime", r.d_b_a_prime},
          {"d_a_prime_b_prime", r.d_a_prime_b_prime},
          {"d_a_b_prime", r.d_a_b_prime}};
}

Json probe_json(const VisibilityProbe& p) {
  return {{"visibility", p.visibility}, {"min_violation", p.min_violation}, {"evals", p.evals}};
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json vc_json(const CriticalVisibilityResult& r) {
  Json probes = Json::array();
  for (const auto& p : r.probes) probes.push_back(probe_json(p));
  Json grid = Json::array();
  for (const auto& p : r.grid) grid.push_back(probe_json(p));
  Json out{{"metric", to_string(r.dkind)},
           {"entropy", r.ekind.name()},
           {"q", r.q},
           {"beta", r.beta},
           {"v_c", optional_json(r.v_c)},
           {"violated_at_v1", r.violated_at_v1},
           {"bracket_width", r.bracket_width},
           {"upper", probe_json(r.upper)},
           {"lower", probe_json(r.lower)},
           {"probes", probes},
           {"grid", grid},
           {"evals_used", r.evals_used}};
  out["best_settings"] = r.best_settings ? settings_json(*r.best_settings) : Json(nullptr);
  return out;
}

void print_report(std::ostream& out, const QuadrangleReport& r) {
  out << "violation (R - L)   = " << format_g12(r.violation) << '\n'
      << "L = d(A,B')         = " << format_g12(r.lhs) << '\n'
      << "R                   = " << format_g12(r.rhs) << '\n'
      << "  d(A,B)            = " << format_g12(r.d_a_b) << '\n'
      << "  d(B,A')           = " << format_g12(r.d_b_a_prime) << '\n'
      << "  d(A',B')          = " << format_g12(r.d_a_prime_b_prime) << '\n';
}

std::vector<DistanceKind> metrics_for(const std::string& tag) {
  if (tag == "best") return {std::begin(kEntropicDistances), std::end(kEntropicDistances)};
  const auto k = parse_distance_kind(tag);
  if (k == DistanceKind::Covariance)
    throw ArgumentError("the covariance metric is only available through chsh-sanity");
  return {k};
}

const std::vector<std::string> kMetricTags{"d1", "d1n", "d2", "d2n"};

// ---------------------------------------------------------------------------
// subcommands

struct Violate {
  double beta = 1.0;
  double visibility = 1.0;
  std::string metric = "d1";
  EntropyFlags entropy;
  SearchFlags search;
  OutputFlags output;

  void attach(CLI::App* app) {
    app->add_option("--beta", beta, "Amplitude of |3,3>")->capture_default_str();
    app->add_option("--visibility", visibility, "Visibility V")->capture_default_str();
    app->add_option("--metric", metric, "d1, d1n, d2 or d2n")
        ->capture_default_str()
        ->check(CLI::IsMember(kMetricTags));
    entropy.attach(app);
    search.attach(app);
    output.attach(app, "violate");
  }

  int run(std::ostream& out) const {
    RunConfig rc;
    rc.set("beta", beta);
    rc.set("visibility", visibility);
    rc.set("metric", metric);
    entropy.record(rc);
    search.record(rc);

    const NoisyStateParams state{beta, visibility, 3};
    const auto r = minimize_violation(state, parse_distance_kind(metric), entropy.kind(),
                                      search.config());
    print_report(out, r.report);
    out << "evals = " << r.evals_used << ", best restart = " << r.restart_index_of_best << '\n';

    Json doc{{"metadata", metadata_json("violate", rc)},
             {"report", report_json(r.report)},
             {"best_settings", settings_json(r.best_settings)},
             {"evals_used", r.evals_used},
             {"restart_index_of_best", r.restart_index_of_best},
             {"restarts_run", r.restarts_run},
             {"seed", r.seed}};
    write_file(output.path(".json"), doc.dump(2) + "\n");
    return kExitOk;
  }
};

struct CriticalVisibility {
  double beta = 1.0;
  std::string metric = "d1";
  EntropyFlags entropy;
  SearchFlags search;
  OutputFlags output;
  double v_precision = 1e-3;
  bool no_grid_check = false;

  void attach(CLI::App* app) {
    std::vector<std::string> tags = kMetricTags;
    tags.push_back("best");
    app->add_option("--beta", beta, "Amplitude of |3,3>")->capture_default_str();
    app->add_option("--metric", metric, "d1, d1n, d2, d2n, or best (all four, minimum reported)")
        ->capture_default_str()
        ->check(CLI::IsMember(tags));
    entropy.attach(app);
    search.attach(app);
    app->add_option("--v-precision", v_precision, "Bisection bracket width")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_flag("--no-grid-check", no_grid_check, "Skip the coarse V-grid monotonicity check");
    output.attach(app, "vc");
  }

  int run(std::ostream& out) const {
    RunConfig rc;
    rc.set("beta", beta);
    rc.set("metric", metric);
    entropy.record(rc);
    search.record(rc);
    rc.set("v_precision", v_precision);
    rc.set("grid_check", no_grid_check ? "false" : "true");

    const auto config = search.config();
    CriticalVisibilityOptions opts;
    opts.v_precision = v_precision;
    opts.grid_check = !no_grid_check;

    std::vector<SweepRow> rows;
    Json results = Json::array();
    std::optional<double> best;
    std::string best_metric;
    for (auto dkind : metrics_for(metric)) {
      const auto r = critical_visibility(beta, dkind, entropy.kind(), config, opts);
      out << to_string(dkind) << ": v_c = " << (r.v_c ? format_g12(*r.v_c) : "none")
          << "  (bracket " << format_g12(r.bracket_width) << ", evals " << r.evals_used << ")\n";
      if (r.v_c && (!best || *r.v_c < *best)) {
        best = r.v_c;
        best_metric = std::string(to_string(dkind));
      }
      rows.push_back(to_sweep_row(r, config));
      results.push_back(vc_json(r));
    }
    if (metric == "best")
      out << "best: v_c = " << (best ? format_g12(*best) : "none")
          << (best ? " (" + best_metric + ")" : "") << '\n';

    Json doc{{"metadata", metadata_json("vc", rc)}, {"results", results}};
    doc["best_v_c"] = optional_json(best);
    doc["best_metric"] = best ? Json(best_metric) : Json(nullptr);
    write_file(output.path(".json"), doc.dump(2) + "\n");
    write_file(output.path(".csv"), render_csv("vc", rc, rows));
    return kExitOk;
  }
};

struct SweepModeFlags {
  std::string mode = "fixed-v";
  double visibility = 1.0;
  double v_precision = 1e-3;
  bool no_grid_check = false;

  void attach(CLI::App* app) {
    app->add_option("--mode", mode, "fixed-v (min violation at --visibility) or vc")
        ->capture_default_str()
        ->check(CLI::IsMember({"fixed-v", "vc"}));
    app->add_option("--visibility", visibility, "Visibility for fixed-v mode")
        ->capture_default_str();
    app->add_option("--v-precision", v_precision, "Bisection bracket width (vc mode)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_flag("--no-grid-check", no_grid_check, "Skip the coarse V-grid check (vc mode)");
  }

  SweepOptions options() const {
    SweepOptions o;
    o.mode = mode == "vc" ? SweepMode::CriticalVisibility : SweepMode::ViolationAtFixedV;
    o.visibility = visibility;
    o.vc.v_precision = v_precision;
    o.vc.grid_check = !no_grid_check;
    return o;
  }

  void record(RunConfig& rc) const {
    rc.set("mode", mode);
    if (mode == "fixed-v") {
      rc.set("visibility", visibility);
    } else {
      rc.set("v_precision", v_precision);
      rc.set("grid_check", no_grid_check ? "false" : "true");
    }
  }
};

struct SweepQ {
  double beta = 1.0;
  std::string metric = "d1";
  double q_min = 1.0;
  double q_max = 5.0;
  double q_step = 0.1;
  SweepModeFlags mode;
  SearchFlags search;
  OutputFlags output;

  void attach(CLI::App* app) {
    app->add_option("--beta", beta, "Amplitude of |3,3>")->capture_default_str();
    app->add_option("--metric", metric, "d1, d1n, d2 or d2n")
        ->capture_default_str()
        ->check(CLI::IsMember(kMetricTags));
    app->add_option("--q-min", q_min)->capture_default_str();
    app->add_option("--q-max", q_max)->capture_default_str();
    app->add_option("--q-step", q_step)->capture_default_str();
    mode.attach(app);
    search.attach(app);
    output.attach(app, "sweep-q");
  }

  int run(std::ostream& out) const {
    RunConfig rc;
    rc.set("beta", beta);
    rc.set("metric", metric);
    rc.set("q_min", q_min);
    rc.set("q_max", q_max);
    rc.set("q_step", q_step);
    mode.record(rc);
    search.record(rc);
    const auto grid = arithmetic_grid(q_min, q_max, q_step);
    const auto rows =
        sweep_q(beta, parse_distance_kind(metric), grid, search.config(), mode.options());
    const auto csv = render_csv("sweep-q", rc, rows);
    write_file(output.path(".csv"), csv);
    out << csv;
    return kExitOk;
  }
};

struct SweepBeta {
  double beta_min = 0.0;
  double beta_max = 1.0;
  double beta_step = 0.25;
  std::string metric = "d1";
  EntropyFlags entropy;
  SweepModeFlags mode;
  SearchFlags search;
  OutputFlags output;

  void attach(CLI::App* app) {
    app->add_option("--beta-min", beta_min)->capture_default_str();
    app->add_option("--beta-max", beta_max)->capture_default_str();
    app->add_option("--beta-step", beta_step)->capture_default_str();
    app->add_option("--metric", metric, "d1, d1n, d2 or d2n")
        ->capture_default_str()
        ->check(CLI::IsMember(kMetricTags));
    entropy.attach(app);
    mode.attach(app);
    search.attach(app);
    output.attach(app, "sweep-beta");
  }

  int run(std::ostream& out) const {
    RunConfig rc;
    rc.set("beta_min", beta_min);
    rc.set("beta_max", beta_max);
    rc.set("beta_step", beta_step);
    rc.set("metric", metric);
    entropy.record(rc);
    mode.record(rc);
    search.record(rc);
    const auto grid = arithmetic_grid(beta_min, beta_max, beta_step);
    const auto rows = sweep_beta(grid, parse_distance_kind(metric), entropy.kind(),
                                 search.config(), mode.options());
    const auto csv = render_csv("sweep-beta", rc, rows);
    write_file(output.path(".csv"), csv);
    out << csv;
    return kExitOk;
  }
};

struct ChshSanity {
  SearchFlags search;
  OutputFlags output;

  void attach(CLI::App* app) {
    search.restarts = 50;
    search.attach(app);
    output.attach(app, "chsh-sanity");
  }

  int run(std::ostream& out) const {
    RunConfig rc;
    search.record(rc);
    const NoisyStateParams state{1.0, 1.0, 2};
    const auto r = minimize_violation(state, DistanceKind::Covariance, EntropyKind::shannon(),
                                      search.config());
    const double tsirelson = 2.0 - 2.0 * std::numbers::sqrt2;
    const double gap = std::abs(r.best_violation - tsirelson);
    out << "min violation       = " << format_g12(r.best_violation) << '\n'
        << "2 - 2 sqrt(2)       = " << format_g12(tsirelson) << '\n'
        << "|min - (2-2sqrt2)|  = " << format_g12(gap) << '\n';
    Json doc{{"metadata", metadata_json("chsh-sanity", rc)},
             {"min_violation", r.best_violation},
             {"tsirelson_violation", tsirelson},
             {"abs_gap", gap},
             {"report", report_json(r.report)},
             {"best_settings", settings_json(r.best_settings)},
             {"evals_used", r.evals_used}};
    write_file(output.path(".json"), doc.dump(2) + "\n");
    return kExitOk;
  }
};

struct RenyiCheck {
  double q = 2.0;
  long long trials = 100000;
  std::uint64_t seed = 1;
  std::string entropy = "renyi";
  std::string metric = "d1";

  void attach(CLI::App* app) {
    app->add_option("--q", q, "Entropy parameter")->capture_default_str();
    app->add_option("--trials", trials, "Random tripartite distributions to try")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--entropy", entropy, "renyi, or tsallis as the metric-respecting control")
        ->capture_default_str()
        ->check(CLI::IsMember({"renyi", "tsallis"}));
    app->add_option("--metric", metric, "d1, d1n, d2 or d2n")
        ->capture_default_str()
        ->check(CLI::IsMember(kMetricTags));
  }

  int run(std::ostream& out) const {
    const auto kind = entropy == "renyi" ? EntropyKind::renyi(q) : EntropyKind::tsallis(q);
    const auto found = triangle_counterexample(kind, parse_distance_kind(metric), trials, seed);
    if (!found) {
      out << "none found (" << trials << " trials, " << entropy << " q=" << format_g12(q)
          << ")\n";
      return kExitOk;
    }
    out << "counterexample at trial " << found->trial << " (" << entropy
        << " q=" << format_g12(q) << ", metric " << metric << ")\n"
        << "d(X,Y) = " << format_g12(found->d_xy) << '\n'
        << "d(Y,Z) = " << format_g12(found->d_yz) << '\n'
        << "d(X,Z) = " << format_g12(found->d_xz) << '\n'
        << "through " << found->middle << ": excess = " << format_g12(found->excess) << '\n'
        << "p(x,y,z) =";
    for (double p : found->p_xyz) out << ' ' << format_g12(p);
    out << '\n';
    return kExitOk;
  }
};

struct MetricAudit {
  long long samples = 10000;
  std::uint64_t seed = 1;
  std::vector<double> qs{1.0, 1.5, 2.0, 3.0, 5.0};

  void attach(CLI::App* app) {
    app->add_option("--samples", samples, "Random 3x3x3 distributions")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--q", qs, "Tsallis parameters to audit")->capture_default_str()->delimiter(',');
  }

  int run(std::ostream& out) const {
    std::vector<EntropyKind> kinds{EntropyKind::shannon()};
    for (double q : qs) kinds.push_back(EntropyKind::tsallis(q));
    const auto rows = metric_audit(kinds, samples, seed);
    bool ok = true;
    out << "metric,entropy,q,worst_triangle_slack,min_distance,worst_asymmetry,status\n";
    for (const auto& r : rows) {
      const bool pass = r.worst_triangle_slack >= -1e-12 && r.min_distance >= -1e-12 &&
                        r.worst_asymmetry <= 1e-12;
      ok = ok && pass;
      out << to_string(r.dkind) << ',' << r.ekind.name() << ',' << format_g12(r.ekind.q()) << ','
          << format_g12(r.worst_triangle_slack) << ',' << format_g12(r.min_distance) << ','
          << format_g12(r.worst_asymmetry) << ',' << (pass ? "PASS" : "FAIL") << '\n';
    }
    return ok ? kExitOk : kExitAuditFailed;
  }
};

}  // namespace

void RunConfig::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = std::move(value);
      return;
    }
  entries_.emplace_back(std::move(key), std::move(value));
}

void RunConfig::set(std::string key, double value) { set(std::move(key), format_exact(value)); }

void RunConfig::set(std::string key, long long value) {
  set(std::move(key), std::to_string(value));
}

std::string format_g12(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string csv_row(const SweepRow& row) {
  const auto opt = [](const std::optional<double>& v) { return v ? format_g12(*v) : std::string(); };
  std::ostringstream s;
  s << format_g12(row.q) << ',' << format_g12(row.beta) << ',' << opt(row.visibility) << ','
    << to_string(row.dkind) << ',' << row.ekind.name() << ',' << opt(row.min_violation) << ','
    << opt(row.v_c) << ',' << row.restarts << ',' << row.seed << ',' << row.evals;
  return s.str();
}

std::string render_csv(const std::string& command, const RunConfig& config,
                       const std::vector<SweepRow>& rows) {
  std::ostringstream s;
  s << "# artifact=ebell\n# version=" << kVersion << "\n# command=" << command << '\n';
  for (const auto& [k, v] : config.entries()) s << "# " << k << '=' << v << '\n';
  s << kCsvHeader << '\n';
  for (const auto& row : rows) s << csv_row(row) << '\n';
  return s.str();
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropic Bell inequalities for noisy two-qutrit states", "ebell"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Violate violate;
  CriticalVisibility vc;
  SweepQ sweep_q_cmd;
  SweepBeta sweep_beta_cmd;
  ChshSanity chsh;
  RenyiCheck renyi;
  MetricAudit audit;

  auto* c_violate = app.add_subcommand("violate", "Minimize R - L at fixed beta and V");
  violate.attach(c_violate);
  auto* c_vc = app.add_subcommand("vc", "Critical visibility by bisection on V");
  vc.attach(c_vc);
  auto* c_sq = app.add_subcommand("sweep-q", "Scan the Tsallis parameter");
  sweep_q_cmd.attach(c_sq);
  auto* c_sb = app.add_subcommand("sweep-beta", "Scan the state parameter beta");
  sweep_beta_cmd.attach(c_sb);
  auto* c_chsh = app.add_subcommand("chsh-sanity", "Covariance-distance CHSH on a qubit pair");
  chsh.attach(c_chsh);
  auto* c_renyi = app.add_subcommand("renyi-check", "Search for a triangle-inequality failure");
  renyi.attach(c_renyi);
  auto* c_audit = app.add_subcommand("metric-audit", "Check the metric axioms on random data");
  audit.attach(c_audit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << '\n' << app.help();
    return kExitArgumentError;
  }

  try {
    if (c_violate->parsed()) return violate.run(out);
    if (c_vc->parsed()) return vc.run(out);
    if (c_sq->parsed()) return sweep_q_cmd.run(out);
    if (c_sb->parsed()) return sweep_beta_cmd.run(out);
    if (c_chsh->parsed()) return chsh.run(out);
    if (c_renyi->parsed()) return renyi.run(out);
    if (c_audit->parsed()) return audit.run(out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitArgumentError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumericalError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitArgumentError;
  }
  err << app.help();
  return kExitArgumentError;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_command(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ebell::cli
