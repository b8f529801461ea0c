#include "qent/numeric.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <mutex>

namespace qent::numeric {

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           QuadratureTolerance tol) {
  if (!(a < b)) throw Error(ErrorKind::InvalidArgument, "integrate requires a < b");
  if (!(tol.abs > 0.0) || !(tol.rel > 0.0))
    throw Error(ErrorKind::InvalidArgument, "quadrature tolerances must be > 0");

  std::size_t evaluations = 0;
  auto counted = [&](double x) {
    ++evaluations;
    return f(x);
  };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      counted, a, b, 15, tol.rel, &error);
  const double allowed = std::max(tol.abs, tol.rel * std::abs(value));
  if (!std::isfinite(value) || !(error <= allowed)) {
    throw Error(ErrorKind::QuadratureFailure, "estimated error " + std::to_string(error) +
                                                  " exceeds tolerance " + std::to_string(allowed));
  }
  return {value, error, evaluations};
}

Grid build_grid(double half_width, std::size_t n_points, double hbar) {
  if (!(half_width > 0.0)) throw Error(ErrorKind::BadGridSpec, "half width must be > 0");
  return Grid(-half_width, half_width, n_points, hbar);
}

namespace {

// FFTW planning is not thread-safe; plans are created once per (size, sign)
// under a lock and then executed concurrently through the new-array interface.
// FFTW_UNALIGNED keeps the chosen codelets independent of buffer alignment so
// results are reproducible bit for bit.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<cplx> in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

void execute(std::vector<cplx>& in, std::vector<cplx>& out, int sign) {
  fftw_plan plan = PlanCache::instance().get(in.size(), sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

WaveSample to_momentum(const WaveSample& w) {
  if (w.space != Space::position)
    throw Error(ErrorKind::WrongSpace, "to_momentum expects a position-space sample");
  const Grid& g = w.grid;
  const std::size_t n = g.size();
  if (w.values.size() != n) throw Error(ErrorKind::InvalidArgument, "sample size does not match grid");
  const double hbar = g.hbar();

  // p_k x_j = p_k x_min + p_min j dx + 2 pi j k / n (in units of hbar)
  std::vector<cplx> in(n), out(n);
  for (std::size_t j = 0; j < n; ++j)
    in[j] = w.values[j] * std::polar(1.0, -g.p_min() * static_cast<double>(j) * g.dx() / hbar);
  execute(in, out, FFTW_FORWARD);

  const double scale = g.dx() / std::sqrt(2.0 * kPi * hbar);
  WaveSample result{g, std::vector<cplx>(n), Space::momentum, w.time};
  for (std::size_t k = 0; k < n; ++k)
    result.values[k] = scale * std::polar(1.0, -g.p(k) * g.x_min() / hbar) * out[k];
  return result;
}

WaveSample to_position(const WaveSample& w) {
  if (w.space != Space::momentum)
    throw Error(ErrorKind::WrongSpace, "to_position expects a momentum-space sample");
  const Grid& g = w.grid;
  const std::size_t n = g.size();
  if (w.values.size() != n) throw Error(ErrorKind::InvalidArgument, "sample size does not match grid");
  const double hbar = g.hbar();

  std::vector<cplx> in(n), out(n);
  for (std::size_t k = 0; k < n; ++k)
    in[k] = w.values[k] * std::polar(1.0, g.p(k) * g.x_min() / hbar);
  execute(in, out, FFTW_BACKWARD);

  const double scale = g.dp() / std::sqrt(2.0 * kPi * hbar);
  WaveSample result{g, std::vector<cplx>(n), Space::position, w.time};
  for (std::size_t j = 0; j < n; ++j)
    result.values[j] =
        scale * std::polar(1.0, g.p_min() * static_cast<double>(j) * g.dx() / hbar) * out[j];
  return result;
}

DensityProfile density_of(const WaveSample& w) {
  std::vector<double> rho(w.values.size());
  std::transform(w.values.begin(), w.values.end(), rho.begin(),
                 [](const cplx& v) { return std::norm(v); });
  return DensityProfile::from_raw(w.grid, w.space, std::move(rho));
}

WaveSample propagate(const Propagator& kernel, const WaveSample& w0, double t) {
  if (w0.space != Space::position)
    throw Error(ErrorKind::WrongSpace, "propagate expects a position-space sample");
  if (!kernel.amplitude) throw Error(ErrorKind::InvalidArgument, "empty propagator");
  const Grid& g = w0.grid;
  const std::size_t n = g.size();
  // Surface caustics and other kernel errors before spawning workers.
  (void)kernel.amplitude(0.0, 0.0, w0.time, t);

  WaveSample out{g, std::vector<cplx>(n), Space::position, t};
  parallel_for(n, [&](std::size_t i) {
    const double x = g.x(i);
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      if (w0.values[j] == cplx{0.0, 0.0}) continue;
      acc += kernel.amplitude(x, g.x(j), w0.time, t) * w0.values[j];
    }
    out.values[i] = acc * g.dx();
  });
  return out;
}

namespace {

constexpr std::array<std::pair<double, double>, 4> kDefaultComposePoints{{
    {0.0, 0.0},
    {0.5, -0.3},
    {1.0, 0.7},
    {-1.2, 0.4},
}};

}  // namespace

double kernel_compose(const Propagator& kernel, double t1, double t2, const Grid& grid) {
  return kernel_compose(kernel, t1, t2, grid, kDefaultComposePoints);
}

double kernel_compose(const Propagator& kernel, double t1, double t2, const Grid& grid,
                      std::span<const std::pair<double, double>> points) {
  if (!(t1 > 0.0) || !(t2 > 0.0))
    throw Error(ErrorKind::InvalidArgument,
                "kernel_compose needs t1, t2 > 0 (the t = 0 kernel is a delta function)");
  const double total = t1 + t2;
  if (std::abs(kernel.omega * total) > kMaxComposePhase)
    throw Error(ErrorKind::InvalidArgument, "composition restricted to |omega t| <= 5 pi / 6");

  const double centre = 0.5 * (grid.x_min() + grid.x_max());
  const double half = 0.5 * (grid.x_max() - grid.x_min());
  const double cut = 0.75 * half;
  const double width = 0.05 * half;
  const std::size_t n = grid.size();
  std::vector<double> window(n);
  for (std::size_t j = 0; j < n; ++j)
    window[j] = 0.5 * std::erfc((std::abs(grid.x(j) - centre) - cut) / width);

  double residual = 0.0;
  for (const auto& [x0, x] : points) {
    std::vector<cplx> integrand(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double x1 = grid.x(j);
      integrand[j] = kernel.amplitude(x, x1, t1, total) * kernel.amplitude(x1, x0, 0.0, t1);
    }
    cplx sum{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      if (window[j] < 1e-300) continue;
      if (j + 1 < n) {
        const double step = std::abs(std::arg(integrand[j + 1] / integrand[j]));
        if (step > 2.0 * kPi / 8.0)
          throw Error(ErrorKind::BadGridSpec,
                      "fewer than 8 nodes per local oscillation of the composition integrand");
      }
      sum += window[j] * integrand[j];
    }
    sum *= grid.dx();
    residual = std::max(residual, std::abs(sum - kernel.amplitude(x, x0, 0.0, total)));
  }
  return residual;
}

double van_vleck_default_step(double x0, double x1) {
  return 1e-4 * (1.0 + std::max(std::abs(x0), std::abs(x1)));
}

double mixed_second_derivative(const std::function<double(double, double)>& f, double x0,
                               double x1, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "finite-difference step must be > 0");
  return (f(x0 + h, x1 + h) - f(x0 + h, x1 - h) - f(x0 - h, x1 + h) + f(x0 - h, x1 - h)) /
         (4.0 * h * h);
}

cplx van_vleck_prefactor_fd(const std::function<double(double, double, double)>& action, double x0,
                            double x1, double t, double h, double hbar) {
  const double mixed =
      mixed_second_derivative([&](double a, double b) { return action(a, b, t); }, x0, x1, h);
  return std::sqrt(cplx{0.0, 1.0 / (2.0 * kPi * hbar)} * mixed);
}

}  // namespace qent::numeric
