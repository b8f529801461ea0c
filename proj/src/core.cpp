#include "qent/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace qent {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorKind::Overdamped: return "Overdamped";
    case ErrorKind::BadGridSpec: return "BadGridSpec";
    case ErrorKind::CausticTime: return "CausticTime";
    case ErrorKind::NegativeQuantumNumber: return "NegativeQuantumNumber";
    case ErrorKind::QuantumNumberTooLarge: return "QuantumNumberTooLarge";
    case ErrorKind::ZeroTime: return "ZeroTime";
    case ErrorKind::ZeroDamping: return "ZeroDamping";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::WrongSpace: return "WrongSpace";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigParseError: return "ConfigParseError";
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

bool CheckedParams::is_caustic(double t) const {
  return std::abs(std::sin(omega_ * t)) <= delta_;
}

CheckedParams validate_params(const OscillatorParams& p, Regime regime, double caustic_delta) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::NonPositiveParameter, std::string(name) + " must be > 0");
  };
  positive(p.m, "m");
  positive(p.omega0, "omega0");
  positive(p.hbar, "hbar");
  if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma))
    throw Error(ErrorKind::NonPositiveParameter, "gamma must be >= 0");
  if (!std::isfinite(p.xbar)) throw Error(ErrorKind::InvalidArgument, "xbar must be finite");
  if (!(caustic_delta > 0.0) || caustic_delta >= 1.0)
    throw Error(ErrorKind::InvalidArgument, "caustic delta must lie in (0, 1)");

  double omega = p.omega0;
  if (regime == Regime::dho) {
    if (p.gamma >= 2.0 * p.omega0)
      throw Error(ErrorKind::Overdamped, "gamma must be < 2*omega0 for the damped oscillator");
    omega = std::sqrt(p.omega0 * p.omega0 - 0.25 * p.gamma * p.gamma);
  }
  return CheckedParams(p, regime, omega, caustic_delta);
}

CheckedParams validate_params(const CheckedParams& p) {
  CheckedParams again = validate_params(p.raw(), p.regime(), p.caustic_delta());
  // omega is recomputed from the same inputs, so this is the identity.
  return again;
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

Grid::Grid(double x_min, double x_max, std::size_t n_points, double hbar)
    : x_min_(x_min), x_max_(x_max), n_(n_points), dx_(0.0), dp_(0.0), hbar_(hbar) {
  if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max))
    throw Error(ErrorKind::BadGridSpec, "grid requires finite x_min < x_max");
  if (n_points < 16 || !is_power_of_two(n_points))
    throw Error(ErrorKind::BadGridSpec,
                "n_points must be a power of two >= 16, got " + std::to_string(n_points));
  if (!(hbar > 0.0)) throw Error(ErrorKind::NonPositiveParameter, "hbar must be > 0");
  dx_ = (x_max - x_min) / static_cast<double>(n_points);
  dp_ = 2.0 * kPi * hbar / (static_cast<double>(n_points) * dx_);
}

double WaveSample::norm2() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return s * spacing();
}

DensityProfile DensityProfile::from_raw(const Grid& grid, Space space,
                                        std::vector<double> raw_values) {
  return from_raw(grid, space, std::move(raw_values), std::nan(""));
}

DensityProfile DensityProfile::from_raw(const Grid& grid, Space space,
                                        std::vector<double> raw_values, double raw_mass) {
  if (raw_values.size() != grid.size())
    throw Error(ErrorKind::InvalidArgument, "density size does not match grid");
  double sum = 0.0;
  for (double v : raw_values) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::InvalidArgument, "density values must be finite and >= 0");
    sum += v;
  }
  const double spacing = space == Space::position ? grid.dx() : grid.dp();
  const double mass = sum * spacing;
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw Error(ErrorKind::NotNormalized, "density has no finite positive mass");
  for (double& v : raw_values) v /= mass;
  const double recorded = std::isnan(raw_mass) ? mass : raw_mass;
  return DensityProfile(grid, space, std::move(raw_values), recorded);
}

double DensityProfile::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * spacing();
}

double DensityProfile::tail_mass() const {
  const std::size_t n = values_.size();
  const std::size_t edge = std::max<std::size_t>(1, n / 40);
  double tail = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += values_[i];
    if (i < edge || i >= n - edge) tail += values_[i];
  }
  return total > 0.0 ? tail / total : 0.0;
}

void check_grid_adequacy(const DensityProfile& d, std::string_view what) {
  const double tail = d.tail_mass();
  if (tail > kTailMassLimit) {
    throw Error(ErrorKind::GridTooSmall, std::string(what) + ": " + std::to_string(tail) +
                                             " of the mass lies in the outer 5% of the " +
                                             (d.space() == Space::position ? "position" : "momentum") +
                                             " grid");
  }
}

unsigned worker_count() {
  if (const char* env = std::getenv("QENT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qent
