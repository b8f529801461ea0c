#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qent/core.hpp"
#include "qent/entropy.hpp"

namespace qent::cli {

enum class Mode { sho, dho, validate, sweep };
enum class SweepVariable { omega, gamma };

/// start, start + step, ... up to stop (inclusive within a 1e-9 step slack).
struct Range {
  double start = 0.0;
  double stop = 10.0;
  double step = 0.05;

  std::vector<double> values() const;
};

struct RunConfig {
  Mode mode = Mode::sho;
  OscillatorParams params;
  double half_width = 12.0;
  std::size_t n_points = 2048;
  Range times;
  std::optional<SweepVariable> sweep_variable;
  std::optional<Range> sweep_range;
  std::optional<std::string> out_path;
  double caustic_delta = kDefaultCausticDelta;
};

/// Exit-code contract of the qent executable.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailure = 1,
  kExitConfigError = 2,
  kExitRuntimeError = 3,
};

/// Parses `key = value` lines ('#' starts a comment). Keys use the long flag
/// names without dashes; '_' and '-' are interchangeable. Errors name the
/// source and line.
std::map<std::string, std::string> parse_config_text(std::string_view text,
                                                     std::string_view source_name);

/// Resolves a RunConfig from command-line arguments (without argv[0]).
/// Values from --config FILE are applied first, explicit flags override them.
/// Throws Error(ConfigParseError) for malformed input and
/// Error(ConstraintViolation) for values that fail validation.
RunConfig parse_config(std::span<const std::string> args);

/// Applies `key -> value` settings onto cfg; `origin(key)` names where a value
/// came from for error messages.
void apply_settings(RunConfig& cfg, const std::map<std::string, std::string>& settings,
                    const std::map<std::string, std::string>& origins);

/// Checks the invariants of a resolved configuration.
void check_config(const RunConfig& cfg);

CheckedParams checked_params(const RunConfig& cfg, Regime regime);
Grid config_grid(const RunConfig& cfg);

struct CommandOutput {
  std::string content;
  int exit_code = kExitOk;
};

/// 17 significant digits, '.' separator, shortest exponent form where needed.
std::string format_number(double v);

CommandOutput cmd_sho(const RunConfig& cfg);
CommandOutput cmd_dho(const RunConfig& cfg);
CommandOutput cmd_sweep(const RunConfig& cfg);
CommandOutput cmd_validate(const RunConfig& cfg);

CommandOutput run(const RunConfig& cfg);

/// Whole program: parse, run, write output once. Returns the exit code.
int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err);

inline constexpr std::string_view kTraceHeader =
    "t,S_x,S_p,S_joint_numeric,S_joint_closed,deficit_x,deficit_p,caustic";
inline constexpr std::string_view kSweepHeader = "sweep_value,t,S_joint_closed,S_joint_numeric";

std::string render_trace_csv(const entropy::EntropyTrace& trace);

}  // namespace qent::cli
