#include <fstream>
#include <ostream>

#include "qent/cli.hpp"

namespace qent::cli {

namespace {

constexpr std::string_view kUsage =
    "usage: qent sho|dho|validate|sweep [--config FILE] [--m F] [--omega0 F] [--gamma F]\n"
    "            [--xbar F] [--hbar F] [--L F] [--n INT] [--t-start F] [--t-stop F]\n"
    "            [--t-step F] [--sweep omega|gamma] [--sweep-range A:B:STEP] [--delta F]\n"
    "            [--out PATH]\n";

using entropy::Column;
using entropy::EntropyTrace;
using entropy::System;

bool has_errors(const EntropyTrace& trace) {
  for (const auto& row : trace.rows)
    if (row.error) return true;
  return false;
}

EntropyTrace run_trace(System system, const RunConfig& cfg, const OscillatorParams& params) {
  const Regime regime = system == System::sho ? Regime::sho : Regime::dho;
  const CheckedParams p = validate_params(params, regime, cfg.caustic_delta);
  const std::vector<double> times = cfg.times.values();
  return entropy::entropy_trace(system, times, p, config_grid(cfg), entropy::TraceMode::both);
}

std::string envelope_line(const EntropyTrace& trace, Column column, std::string_view name) {
  std::string line = "# envelope " + std::string(name) + ": ";
  try {
    const auto env = entropy::envelope(trace, column);
    line += env.non_decreasing ? "non_decreasing" : "decreasing";
    line += " maxima=" + std::to_string(env.maxima.size());
    if (env.first_violation) {
      const auto& [a, b] = *env.first_violation;
      line += " first_drop=(" + format_number(a.first) + "," + format_number(a.second) + ")->(" +
              format_number(b.first) + "," + format_number(b.second) + ")";
    }
  } catch (const Error& e) {
    line += std::string("unavailable (") + e.what() + ")";
  }
  return line + "\n";
}

}  // namespace

CommandOutput cmd_sho(const RunConfig& cfg) {
  const EntropyTrace trace = run_trace(System::sho, cfg, cfg.params);
  return {render_trace_csv(trace), has_errors(trace) ? kExitRuntimeError : kExitOk};
}

CommandOutput cmd_dho(const RunConfig& cfg) {
  const EntropyTrace trace = run_trace(System::dho, cfg, cfg.params);
  std::string out = render_trace_csv(trace);
  out += envelope_line(trace, Column::s_joint_closed, "S_joint_closed");
  out += envelope_line(trace, Column::s_joint_numeric, "S_joint_numeric");
  return {std::move(out), has_errors(trace) ? kExitRuntimeError : kExitOk};
}

CommandOutput cmd_sweep(const RunConfig& cfg) {
  if (!cfg.sweep_variable || !cfg.sweep_range)
    throw Error(ErrorKind::ConstraintViolation, "sweep needs a variable and a range");
  std::string out(kSweepHeader);
  out += '\n';
  std::string errors;
  for (double v : cfg.sweep_range->values()) {
    OscillatorParams params = cfg.params;
    if (*cfg.sweep_variable == SweepVariable::omega) params.omega0 = v;
    else params.gamma = v;
    const bool damped = *cfg.sweep_variable == SweepVariable::gamma || params.gamma > 0.0;
    const EntropyTrace trace = run_trace(damped ? System::dho : System::sho, cfg, params);
    const std::string value = format_number(v);
    for (const auto& row : trace.rows) {
      out += value + ',' + format_number(row.t) + ',';
      if (row.s_joint_closed) out += format_number(*row.s_joint_closed);
      out += ',';
      if (row.s_joint_numeric) out += format_number(*row.s_joint_numeric);
      out += '\n';
      if (row.error)
        errors += "# error sweep_value=" + value + " t=" + format_number(row.t) + ": " + *row.error + "\n";
    }
  }
  out += errors;
  return {std::move(out), errors.empty() ? kExitOk : kExitRuntimeError};
}

CommandOutput run(const RunConfig& cfg) {
  switch (cfg.mode) {
    case Mode::sho: return cmd_sho(cfg);
    case Mode::dho: return cmd_dho(cfg);
    case Mode::sweep: return cmd_sweep(cfg);
    case Mode::validate: return cmd_validate(cfg);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown mode");
}

int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  for (const auto& a : args) {
    if (a == "-h" || a == "--help") {
      out << kUsage;
      return kExitOk;
    }
  }
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const Error& e) {
    err << "qent: " << e.what() << "\n";
    return kExitConfigError;
  }

  CommandOutput result;
  try {
    result = run(cfg);
  } catch (const Error& e) {
    err << "qent: " << e.what() << "\n";
    return e.kind() == ErrorKind::ConstraintViolation ? kExitConfigError : kExitRuntimeError;
  } catch (const std::exception& e) {
    err << "qent: " << e.what() << "\n";
    return kExitRuntimeError;
  }

  if (cfg.out_path) {
    std::ofstream file(*cfg.out_path, std::ios::binary | std::ios::trunc);
    file << result.content;
    file.flush();
    if (!file) {
      err << "qent: IoError: cannot write " << *cfg.out_path << "\n";
      return kExitRuntimeError;
    }
  } else {
    out << result.content;
    out.flush();
  }
  return result.exit_code;
}

}  // namespace qent::cli
