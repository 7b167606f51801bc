#pragma once
// Command-line front end: configuration parsing and command dispatch.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qec/codes.hpp"
#include "qec/records.hpp"

namespace qec::cli {

enum class Command { code_info, sweep, learn, calibrate, lemma };

std::string to_string(Command command);

struct RunConfig {
  Command command = Command::code_info;
  codes::Family family = codes::Family::rotated;
  std::size_t d = 4;
  std::vector<int> cases{1, 2, 3};
  std::vector<double> epsilons{1e-3, 2e-3, 5e-3, 1e-2};
  double p_star = 1.0 / 3.0;
  std::size_t bad_site = 0;
  double gamma = 0.01;
  double gamma_theta = 0.02;
  double theta_target = 1.0471975511965976;  // pi/3
  double theta0 = 0.3;
  double theta_initial = 0.0;
  double epsilon = 1e-3;  // background rate for learn / calibrate / lemma
  std::size_t rounds = 2000;
  std::uint64_t seed = 1;
  std::size_t max_iter = 50;
  std::size_t max_weight = 6;
  std::vector<std::size_t> known_sites{0};
  std::size_t n2 = 1;
  std::optional<double> prior_known;  // lemma: prior on known sites, defaults to p_star
  bool run_sweep = true;
  std::string out;  // empty means stdout
  records::Format format = records::Format::csv;
};

/// Thrown for invalid command lines or config files.
struct UsageError {
  std::string message;
  int exit_code = 2;
};

/// Parses argv (argv[0] included). `--config FILE` loads a JSON object whose
/// flat keys mirror the long flag names; explicit flags win over the file.
/// Throws UsageError; `--help` surfaces as UsageError with exit code 0.
RunConfig parse_config(int argc, const char* const* argv);

/// Resolved config as a flat JSON object, suitable as a --config file.
/// Output location and the config path itself are omitted.
std::string config_json(const RunConfig& config);

/// Runs the command, writing records to config.out (or `out` when empty)
/// and diagnostics to `err`. Returns the process exit status.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_config + execute with error reporting; the body of main().
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qec::cli
