#include "qent/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "qent/numeric.hpp"

namespace qent::entropy {

namespace {

constexpr double kUnderflow = 1e-300;
constexpr double kNormalizationTolerance = 1e-6;

double entropy_sum(std::span<const double> values) {
  double s = 0.0;
  for (double v : values)
    if (v > kUnderflow) s -= v * std::log(v);
  return s;
}

void require_system_regime(System system, const CheckedParams& p) {
  const Regime wanted = system == System::sho ? Regime::sho : Regime::dho;
  if (p.regime() != wanted)
    throw Error(ErrorKind::InvalidArgument, "parameters validated for the wrong oscillator");
}

}  // namespace

double differential_entropy(const DensityProfile& d) {
  const double mass = d.integral();
  if (std::abs(mass - 1.0) > kNormalizationTolerance)
    throw Error(ErrorKind::NotNormalized, "density integrates to " + std::to_string(mass));
  check_grid_adequacy(d, "differential_entropy");
  return entropy_sum(d.values()) * d.spacing();
}

EntropyRecord joint_entropy_numeric(const DensityProfile& pos, const DensityProfile& mom,
                                    const CheckedParams& p) {
  EntropyRecord r;
  r.s_x = differential_entropy(pos);
  r.s_p = differential_entropy(mom);
  r.s_joint = r.s_x + r.s_p - std::log(2.0 * kPi * p.hbar());
  r.deficit_x = pos.raw_mass();
  r.deficit_p = mom.raw_mass();
  r.source = Source::numeric;
  return r;
}

double LeipnikTable::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.dx() * grid.dp();
}

LeipnikTable leipnik_density(const DensityProfile& pos, const DensityProfile& mom) {
  if (pos.space() != Space::position || mom.space() != Space::momentum)
    throw Error(ErrorKind::WrongSpace, "leipnik_density expects (position, momentum) densities");
  if (!(pos.grid() == mom.grid()))
    throw Error(ErrorKind::InvalidArgument, "position and momentum densities on different grids");
  for (const auto* d : {&pos, &mom}) {
    if (std::abs(d->integral() - 1.0) > kNormalizationTolerance)
      throw Error(ErrorKind::NotNormalized, "leipnik_density needs normalized inputs");
  }
  LeipnikTable table{pos.grid(), {}, pos.values().size(), mom.values().size()};
  table.values.resize(table.n_x * table.n_p);
  for (std::size_t i = 0; i < table.n_x; ++i)
    for (std::size_t k = 0; k < table.n_p; ++k)
      table.values[i * table.n_p + k] = pos.values()[i] * mom.values()[k];
  return table;
}

double phase_space_entropy(const LeipnikTable& table, double hbar) {
  const double h = 2.0 * kPi * hbar;
  double s = 0.0;
  for (double g : table.values)
    if (g > kUnderflow) s -= g * std::log(h * g);
  return s * table.grid.dx() * table.grid.dp();
}

double sho_joint_entropy_closed(double t, const CheckedParams& p) {
  const double s = std::sin(p.omega() * t);
  return kLeipnikBound + 4.0 * p.m() * p.omega() / p.hbar() * p.xbar() * p.xbar() * s * s;
}

double dho_joint_entropy_closed(double t, const CheckedParams& p, analytic::EtaForm form) {
  if (p.regime() != Regime::dho)
    throw Error(ErrorKind::InvalidArgument, "dho_joint_entropy_closed needs dho parameters");
  if (p.is_caustic(t))
    throw Error(ErrorKind::CausticTime, "dho_joint_entropy_closed at t = " + std::to_string(t));
  const analytic::DhoAux aux = analytic::dho_aux(t, p, form);
  const double n2 = aux.bigN * aux.bigN;
  const double two_abs_a2 = 2.0 * std::norm(aux.bigA);
  const double weight = n2 * std::sqrt(kPi / (2.0 * aux.aPrime));
  const double bracket = (std::log(n2) - 0.5) -
                         0.5 * std::sqrt(1.0 / two_abs_a2) * (std::log(n2 / two_abs_a2) - 0.5);
  return weight * bracket - std::log(2.0 * kPi);
}

double leipnik_bound_margin(double s_joint) { return s_joint - kLeipnikBound; }

WaveSample sample_state(System system, double t, const CheckedParams& p, const Grid& grid,
                        analytic::EtaForm form) {
  require_system_regime(system, p);
  WaveSample w{grid, std::vector<cplx>(grid.size()), Space::position, t};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    w.values[j] = system == System::sho ? analytic::sho_coherent_state(grid.x(j), t, p)
                                        : analytic::dho_wavefunction(0, grid.x(j), t, p, form);
  }
  return w;
}

EntropyRecord numeric_record(System system, double t, const CheckedParams& p, const Grid& grid,
                             analytic::EtaForm form) {
  const WaveSample psi = sample_state(system, t, p, grid, form);
  const DensityProfile pos = numeric::density_of(psi);
  const DensityProfile mom = numeric::density_of(numeric::to_momentum(psi));
  return joint_entropy_numeric(pos, mom, p);
}

std::pair<double, double> closed_form_deficits(System system, double t, const CheckedParams& p,
                                               const Grid& grid, analytic::EtaForm form) {
  require_system_regime(system, p);
  if (system == System::dho) {
    const double x_mass = analytic::dho_position_density(0.0, t, p, form).raw_mass;
    const double p_mass = analytic::dho_momentum_density(0.0, t, p, form).raw_mass;
    return {x_mass, p_mass};
  }
  double sx = 0.0;
  double sp = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    sx += analytic::sho_position_density(grid.x(j), t, p);
    sp += analytic::sho_momentum_density(grid.p(j), t, p);
  }
  return {sx * grid.dx(), sp * grid.dp()};
}

EntropyTrace entropy_trace(System system, std::span<const double> times, const CheckedParams& p,
                           const Grid& grid, TraceMode mode, TraceOptions options) {
  require_system_regime(system, p);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i]))
      throw Error(ErrorKind::InvalidArgument, "trace times must be finite and >= 0");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "trace times must be strictly increasing");
  }

  EntropyTrace trace;
  trace.rows.resize(times.size());
  parallel_for(times.size(), [&](std::size_t i) {
    TraceRow& row = trace.rows[i];
    row.t = times[i];
    if (p.is_caustic(row.t)) {
      row.caustic = true;
      return;
    }
    auto note = [&row](const Error& e) {
      row.error = row.error ? *row.error + "; " + e.what() : std::string(e.what());
    };
    if (mode != TraceMode::closed) {
      try {
        const EntropyRecord r = numeric_record(system, row.t, p, grid, options.eta_form);
        row.s_x = r.s_x;
        row.s_p = r.s_p;
        row.s_joint_numeric = r.s_joint;
      } catch (const Error& e) {
        note(e);
      }
    }
    if (mode != TraceMode::numeric) {
      try {
        row.s_joint_closed = system == System::sho
                                 ? sho_joint_entropy_closed(row.t, p)
                                 : dho_joint_entropy_closed(row.t, p, options.eta_form);
      } catch (const Error& e) {
        note(e);
      }
    }
    try {
      const auto [dx, dp] = closed_form_deficits(system, row.t, p, grid, options.eta_form);
      row.deficit_x = dx;
      row.deficit_p = dp;
    } catch (const Error& e) {
      note(e);
    }
  });
  return trace;
}

EnvelopeResult envelope(std::span<const double> times, std::span<const double> values,
                        double tolerance) {
  if (times.size() != values.size())
    throw Error(ErrorKind::InvalidArgument, "envelope: times and values differ in length");
  std::vector<double> ts;
  std::vector<double> vs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isfinite(values[i])) {
      ts.push_back(times[i]);
      vs.push_back(values[i]);
    }
  }
  if (vs.size() < 3) throw Error(ErrorKind::TooFewPoints, "envelope needs >= 3 finite values");

  // Runs of (near-)equal consecutive values form plateaus.
  struct Run {
    std::size_t first;
    std::size_t last;
    double value;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (!runs.empty() && std::abs(vs[i] - vs[runs.back().last]) <= tolerance) {
      runs.back().last = i;
      runs.back().value = std::max(runs.back().value, vs[i]);
    } else {
      runs.push_back({i, i, vs[i]});
    }
  }

  EnvelopeResult out;
  if (runs.size() == 1) {
    out.maxima.emplace_back(ts.front(), runs.front().value);
    return out;
  }
  for (std::size_t r = 1; r + 1 < runs.size(); ++r) {
    const Run& run = runs[r];
    if (!(runs[r - 1].value < run.value && runs[r + 1].value < run.value)) continue;
    if (run.first != run.last) {
      out.maxima.emplace_back(ts[run.first], run.value);
      continue;
    }
    const std::size_t i = run.first;
    const double t0 = ts[i - 1], t1 = ts[i], t2 = ts[i + 1];
    const double v0 = vs[i - 1], v1 = vs[i], v2 = vs[i + 1];
    // Newton form of the interpolating parabola.
    const double d01 = (v1 - v0) / (t1 - t0);
    const double d12 = (v2 - v1) / (t2 - t1);
    const double curvature = (d12 - d01) / (t2 - t0);
    if (curvature < 0.0) {
      const double tv = std::clamp(0.5 * (t0 + t1) - d01 / (2.0 * curvature), t0, t2);
      const double vv = v0 + d01 * (tv - t0) + curvature * (tv - t0) * (tv - t1);
      out.maxima.emplace_back(tv, std::max(vv, v1));
    } else {
      out.maxima.emplace_back(t1, v1);
    }
  }

  for (std::size_t k = 1; k < out.maxima.size(); ++k) {
    const auto& prev = out.maxima[k - 1];
    const auto& cur = out.maxima[k];
    if (cur.second < prev.second - tolerance * std::max(1.0, std::abs(prev.second))) {
      out.non_decreasing = false;
      out.first_violation = std::make_pair(prev, cur);
      break;
    }
  }
  return out;
}

EnvelopeResult envelope(const EntropyTrace& trace, Column column, double tolerance) {
  std::vector<double> ts;
  std::vector<double> vs;
  for (const TraceRow& row : trace.rows) {
    const std::optional<double>* cell = nullptr;
    switch (column) {
      case Column::s_x: cell = &row.s_x; break;
      case Column::s_p: cell = &row.s_p; break;
      case Column::s_joint_numeric: cell = &row.s_joint_numeric; break;
      case Column::s_joint_closed: cell = &row.s_joint_closed; break;
    }
    if (cell->has_value()) {
      ts.push_back(row.t);
      vs.push_back(**cell);
    }
  }
  return envelope(ts, vs, tolerance);
}

}  // namespace qent::entropy
