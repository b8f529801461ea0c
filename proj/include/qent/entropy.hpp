#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qent/analytic.hpp"
#include "qent/core.hpp"

namespace qent::entropy {

/// ln(e/2), the Leipnik lower bound for one-dimensional pure states.
inline const double kLeipnikBound = 1.0 - std::log(2.0);

enum class Source { numeric, closed_form };

struct EntropyRecord {
  double s_x = 0.0;
  double s_p = 0.0;
  double s_joint = 0.0;
  double deficit_x = 0.0;
  double deficit_p = 0.0;
  Source source = Source::numeric;
};

/// -sum rho ln rho * spacing, with 0 ln 0 := 0 (values below 1e-300 skipped).
/// Throws NotNormalized if |integral - 1| > 1e-6 and GridTooSmall on the tail alarm.
double differential_entropy(const DensityProfile& d);

/// S_x + S_p - ln(2 pi hbar).
EntropyRecord joint_entropy_numeric(const DensityProfile& pos, const DensityProfile& mom,
                                    const CheckedParams& p);

/// Outer product g(x_i, p_k) = rho_x(x_i) rho_p(p_k), row-major in x.
struct LeipnikTable {
  Grid grid;
  std::vector<double> values;
  std::size_t n_x = 0;
  std::size_t n_p = 0;

  double at(std::size_t i, std::size_t k) const { return values[i * n_p + k]; }
  double integral() const;
};

LeipnikTable leipnik_density(const DensityProfile& pos, const DensityProfile& mom);

/// -sum g ln(h g) dx dp over the table, h = 2 pi hbar.
double phase_space_entropy(const LeipnikTable& table, double hbar);

/// ln(e/2) + (4 m omega / hbar) xbar^2 sin^2(omega t), evaluated as printed.
double sho_joint_entropy_closed(double t, const CheckedParams& p);

/// Damped-oscillator joint entropy in the printed closed form, from N^2, A'
/// and |A|^2. Throws CausticTime where |sin(omega t)| <= delta.
double dho_joint_entropy_closed(double t, const CheckedParams& p,
                                analytic::EtaForm form = analytic::EtaForm::printed);

double leipnik_bound_margin(double s_joint);

enum class System { sho, dho };
enum class TraceMode { numeric, closed, both };

/// Position-space wave function at time t on the grid: the displaced
/// coherent state for sho, the ground state psi_0(x, t) for dho.
WaveSample sample_state(System system, double t, const CheckedParams& p, const Grid& grid,
                        analytic::EtaForm form = analytic::EtaForm::printed);

/// Position density from the sampled state, momentum density from its
/// discrete Fourier transform; then joint_entropy_numeric. Deficits are the
/// raw grid masses of the two densities.
EntropyRecord numeric_record(System system, double t, const CheckedParams& p, const Grid& grid,
                             analytic::EtaForm form = analytic::EtaForm::printed);

/// Raw masses of the closed-form position and momentum densities before
/// renormalization: grid integrals for sho, analytic integrals for dho.
std::pair<double, double> closed_form_deficits(System system, double t, const CheckedParams& p,
                                               const Grid& grid,
                                               analytic::EtaForm form = analytic::EtaForm::printed);

struct TraceRow {
  double t = 0.0;
  std::optional<double> s_x;
  std::optional<double> s_p;
  std::optional<double> s_joint_numeric;
  std::optional<double> s_joint_closed;
  std::optional<double> deficit_x;
  std::optional<double> deficit_p;
  bool caustic = false;
  /// Numeric failure at this time (e.g. GridTooSmall), kept instead of thrown.
  std::optional<std::string> error;
};

struct EntropyTrace {
  std::vector<TraceRow> rows;
};

struct TraceOptions {
  analytic::EtaForm eta_form = analytic::EtaForm::printed;
};

/// One row per time, computed in parallel with the output order fixed by
/// `times`. Caustic times are flagged and carry no entropies.
EntropyTrace entropy_trace(System system, std::span<const double> times, const CheckedParams& p,
                           const Grid& grid, TraceMode mode, TraceOptions options = {});

enum class Column { s_x, s_p, s_joint_numeric, s_joint_closed };

struct EnvelopeResult {
  std::vector<std::pair<double, double>> maxima;
  bool non_decreasing = true;
  /// First pair of consecutive maxima whose values decrease.
  std::optional<std::pair<std::pair<double, double>, std::pair<double, double>>> first_violation;
};

inline constexpr double kEnvelopeTolerance = 1e-6;

/// Local maxima by three-point comparison, with runs of equal values treated
/// as one plateau and each strict peak refined by a parabola through its
/// neighbours. A sequence with a single plateau reports that plateau.
/// Throws TooFewPoints for fewer than three finite values.
EnvelopeResult envelope(std::span<const double> times, std::span<const double> values,
                        double tolerance = kEnvelopeTolerance);
EnvelopeResult envelope(const EntropyTrace& trace, Column column,
                        double tolerance = kEnvelopeTolerance);

}  // namespace qent::entropy
