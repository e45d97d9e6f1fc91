#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ebell/search.hpp"

namespace ebell::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAuditFailed = 1;
inline constexpr int kExitArgumentError = 2;
inline constexpr int kExitNumericalError = 3;

/// Overrides the default output directory (current directory).
inline constexpr const char* kOutputDirEnv = "EBELL_OUTPUT_DIR";

/// Flat key-value record of every parameter a run used, defaults included.
/// Written at the top of every output file.
class RunConfig {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, long long value);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// `%.12g`, the fixed float format of CSV bodies.
std::string format_g12(double value);

inline constexpr const char* kCsvHeader =
    "q,beta,visibility,metric,entropy,min_violation,v_c,restarts,seed,evals";

std::string csv_row(const SweepRow& row);

/// Metadata lines ("# key=value") followed by the header and one line per row.
std::string render_csv(const std::string& command, const RunConfig& config,
                       const std::vector<SweepRow>& rows);

/// Parses argv (argv[0] is the program name) and dispatches to a subcommand.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ebell::cli
