#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qent {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Default threshold on |sin(omega t)| below which a time is treated as a caustic.
inline constexpr double kDefaultCausticDelta = 1e-6;

enum class ErrorKind {
  NonPositiveParameter,
  Overdamped,
  BadGridSpec,
  CausticTime,
  NegativeQuantumNumber,
  QuantumNumberTooLarge,
  ZeroTime,
  ZeroDamping,
  QuadratureFailure,
  WrongSpace,
  GridTooSmall,
  NotNormalized,
  TooFewPoints,
  InvalidArgument,
  ConfigParseError,
  ConstraintViolation,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

enum class Regime { sho, dho };

/// Raw physical constants for one run. Natural units (m = hbar = omega0 = 1) by default.
struct OscillatorParams {
  double m = 1.0;
  double omega0 = 1.0;
  double gamma = 0.0;
  double hbar = 1.0;
  double xbar = 0.0;

  bool operator==(const OscillatorParams&) const = default;
};

/// Parameters that passed validate_params, together with the derived
/// oscillation frequency and the caustic threshold used by every
/// closed-form evaluation.
class CheckedParams {
 public:
  const OscillatorParams& raw() const noexcept { return raw_; }
  Regime regime() const noexcept { return regime_; }
  double m() const noexcept { return raw_.m; }
  double omega0() const noexcept { return raw_.omega0; }
  double gamma() const noexcept { return raw_.gamma; }
  double hbar() const noexcept { return raw_.hbar; }
  double xbar() const noexcept { return raw_.xbar; }
  /// omega0 for sho, sqrt(omega0^2 - gamma^2/4) for dho.
  double omega() const noexcept { return omega_; }
  double caustic_delta() const noexcept { return delta_; }

  /// True when |sin(omega t)| <= caustic_delta().
  bool is_caustic(double t) const;

  bool operator==(const CheckedParams&) const = default;

 private:
  friend CheckedParams validate_params(const OscillatorParams&, Regime, double);
  CheckedParams(const OscillatorParams& raw, Regime regime, double omega, double delta)
      : raw_(raw), regime_(regime), omega_(omega), delta_(delta) {}

  OscillatorParams raw_;
  Regime regime_;
  double omega_;
  double delta_;
};

CheckedParams validate_params(const OscillatorParams& p, Regime regime,
                              double caustic_delta = kDefaultCausticDelta);

/// Re-validation of an already checked value; returns it unchanged.
CheckedParams validate_params(const CheckedParams& p);

/// Uniform grid on [x_min, x_max) with n nodes (periodic convention: x_max is
/// not a node). The conjugate momentum grid has spacing dp = 2*pi*hbar/(n*dx)
/// and starts at -pi*hbar/dx.
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t n_points, double hbar = 1.0);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  double dp() const noexcept { return dp_; }
  double hbar() const noexcept { return hbar_; }
  double p_min() const noexcept { return -kPi * hbar_ / dx_; }

  double x(std::size_t j) const noexcept { return x_min_ + static_cast<double>(j) * dx_; }
  double p(std::size_t k) const noexcept { return p_min() + static_cast<double>(k) * dp_; }

  bool operator==(const Grid&) const = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
  double dp_;
  double hbar_;
};

enum class Space { position, momentum };

struct WaveSample {
  Grid grid;
  std::vector<cplx> values;
  Space space = Space::position;
  double time = 0.0;

  double spacing() const noexcept { return space == Space::position ? grid.dx() : grid.dp(); }
  double coordinate(std::size_t i) const noexcept {
    return space == Space::position ? grid.x(i) : grid.p(i);
  }
  /// sum |psi|^2 * spacing
  double norm2() const;
};

/// Non-negative density on a grid, normalized to unit grid integral. raw_mass
/// keeps the integral of the values before normalization.
class DensityProfile {
 public:
  /// Normalizes `raw_values`; throws NotNormalized if the raw mass is not
  /// positive and finite, InvalidArgument on negative or wrongly sized input.
  static DensityProfile from_raw(const Grid& grid, Space space, std::vector<double> raw_values);

  /// Uses `raw_mass` as the recorded pre-normalization integral (for analytic
  /// deficits) while normalizing the values by their grid integral.
  static DensityProfile from_raw(const Grid& grid, Space space, std::vector<double> raw_values,
                                 double raw_mass);

  const Grid& grid() const noexcept { return grid_; }
  Space space() const noexcept { return space_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double raw_mass() const noexcept { return raw_mass_; }
  double spacing() const noexcept { return space_ == Space::position ? grid_.dx() : grid_.dp(); }
  double coordinate(std::size_t i) const noexcept {
    return space_ == Space::position ? grid_.x(i) : grid_.p(i);
  }

  /// Grid integral of the stored values.
  double integral() const;
  /// Fraction of mass on the outer 5% of nodes (2.5% at each end).
  double tail_mass() const;

 private:
  DensityProfile(Grid grid, Space space, std::vector<double> values, double raw_mass)
      : grid_(grid), space_(space), values_(std::move(values)), raw_mass_(raw_mass) {}

  Grid grid_;
  Space space_;
  std::vector<double> values_;
  double raw_mass_;
};

inline constexpr double kTailMassLimit = 1e-8;

/// Throws GridTooSmall when more than kTailMassLimit of the mass sits on the
/// outer 5% of the grid.
void check_grid_adequacy(const DensityProfile& d, std::string_view what);

/// External force j(t) of the damped oscillator Lagrangian.
class DriveForce {
 public:
  static DriveForce zero() { return DriveForce{}; }
  explicit DriveForce(std::function<double(double)> j) : j_(std::move(j)) {}

  bool is_zero() const noexcept { return !j_; }
  double operator()(double t) const { return j_ ? j_(t) : 0.0; }

 private:
  DriveForce() = default;
  std::function<double(double)> j_;
};

/// Worker count from QENT_THREADS, else hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n) on worker_count() threads with static
/// chunking. Each index is computed independently, so results do not depend
/// on the number of workers. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace qent
