#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qent/core.hpp"

namespace qent::numeric {

struct QuadratureResult {
  double value = 0.0;
  double est_error = 0.0;
  std::size_t evaluations = 0;
};

struct QuadratureTolerance {
  double abs = 1e-10;
  double rel = 1e-8;
};

/// Adaptive Gauss-Kronrod (7/15) estimate of the integral of f over [a, b].
/// Throws QuadratureFailure if the error estimate exceeds
/// max(tol.abs, tol.rel * |value|) at the maximum bisection depth.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           QuadratureTolerance tol = {});

/// Symmetric grid [-half_width, half_width).
Grid build_grid(double half_width, std::size_t n_points, double hbar = 1.0);

/// psi~(p_k) = dx / sqrt(2 pi hbar) * sum_j exp(-i p_k x_j / hbar) psi(x_j),
/// evaluated with one FFT. Discrete Parseval holds exactly.
WaveSample to_momentum(const WaveSample& w);
/// Inverse of to_momentum.
WaveSample to_position(const WaveSample& w);

/// Squared modulus as a normalized density. The raw mass is sum |psi|^2 * spacing.
DensityProfile density_of(const WaveSample& w);

/// Two-time propagator K(x, t_to; x0, t_from) plus the angular frequency that
/// sets its caustics (0 for free-particle kernels).
struct Propagator {
  std::function<cplx(double x, double x0, double t_from, double t_to)> amplitude;
  double omega = 0.0;
};

/// psi(x_i, t) = sum_j K(x_i, t; x_j, w0.time) psi(x_j, w0.time) dx by direct
/// O(n^2) summation, parallel over output nodes with a fixed summation order.
WaveSample propagate(const Propagator& kernel, const WaveSample& w0, double t);

/// Largest |omega t| accepted by kernel_compose.
inline constexpr double kMaxComposePhase = 5.0 * kPi / 6.0;

/// Chapman-Kolmogorov residual
///   max |int K(x, t1+t2; x1, t1) K(x1, t1; x0, 0) dx1 - K(x, t1+t2; x0, 0)|
/// over the (x0, x) test pairs. The intermediate integral runs over `grid`
/// with a smooth erfc cutoff at 75% of the half width; the oscillating
/// integrand is required to have at least 8 nodes per local period.
double kernel_compose(const Propagator& kernel, double t1, double t2, const Grid& grid,
                      std::span<const std::pair<double, double>> points);
double kernel_compose(const Propagator& kernel, double t1, double t2, const Grid& grid);

/// Default finite-difference step 1e-4 * (1 + max(|x0|, |x1|)).
double van_vleck_default_step(double x0, double x1);

/// sqrt((i / 2 pi hbar) * d^2 S / dx0 dx1) with the mixed derivative by
/// central differences of step h. Principal branch.
cplx van_vleck_prefactor_fd(const std::function<double(double, double, double)>& action, double x0,
                            double x1, double t, double h, double hbar);

/// Mixed central difference [S(+,+) - S(+,-) - S(-,+) + S(-,-)] / (4 h^2).
double mixed_second_derivative(const std::function<double(double, double)>& f, double x0,
                               double x1, double h);

}  // namespace qent::numeric
