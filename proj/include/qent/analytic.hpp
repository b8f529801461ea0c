#pragma once

#include <vector>

#include "qent/core.hpp"
#include "qent/numeric.hpp"

/// Closed-form actions, kernels, eigenstates, wave functions and densities of
/// the simple (SHO) and damped (DHO, Caldirola-Kanai) harmonic oscillators.
///
/// Branch convention: kernel prefactors take the principal square root of
/// 1/(i sin wt). This is exact for 0 < wt < pi; no Maslov phase is tracked
/// past the first caustic, so kernels at later times can differ from the true
/// propagator by a constant phase.
namespace qent::analytic {

using KernelValue = cplx;

/// Largest quantum number accepted by the Hermite-function evaluators. The
/// normalized three-term recurrence never forms H_n or n! explicitly, so this
/// is a sanity bound, not an overflow limit.
inline constexpr int kMaxQuantumNumber = 4096;

double sho_classical_action(double x0, double x1, double t, const CheckedParams& p);
KernelValue sho_kernel(double x0, double x1, double t, const CheckedParams& p);

double sho_energy(int n, const CheckedParams& p);

/// Normalized eigenfunction psi_n(x).
double sho_eigenstate(int n, double x, const CheckedParams& p);
/// psi_0(x) .. psi_{n_max}(x) from one recurrence pass.
std::vector<double> sho_eigenstates(int n_max, double x, const CheckedParams& p);

/// Partial spectral sum  sum_{n<=n_max} exp(-i t E_n/hbar) exp(-eps*omega*n) psi_n(x0) psi_n(x1).
KernelValue mehler_kernel(double x0, double x1, double t, const CheckedParams& p, int n_max,
                          double eps);

/// Displaced ground state (centre xbar at t = 0) evolved to time t.
cplx sho_coherent_state(double x, double t, const CheckedParams& p);
double sho_position_density(double x, double t, const CheckedParams& p);
/// Momentum density, evaluated as a Gaussian centred at -m*omega*xbar*sin(wt)
/// with variance m*omega*hbar/2.
double sho_momentum_density(double p_val, double t, const CheckedParams& p);
/// The same density written as printed (un-completed square); overflows for
/// large |xbar| where the completed form does not.
double sho_momentum_density_literal(double p_val, double t, const CheckedParams& p);

/// Free particle with Caldirola-Kanai damping. Prefactor exponent is 1/2.
KernelValue damped_free_kernel(double x0, double x1, double t, const CheckedParams& p);

struct DriveCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
  double f = 0.0;
};

/// a, b, c in closed form; d, e, f by adaptive quadrature of the drive
/// integrals (absolute tolerance 1e-10, relative 1e-8). Zero drive gives
/// d = e = f = 0 without quadrature.
DriveCoefficients dho_drive_coefficients(double t, const DriveForce& drive, const CheckedParams& p);

/// Kernel assembled from the drive coefficients:
/// K(x1, t; x0, 0) =
///   prefactor * exp[(i m / 2 hbar)(a x1^2 + b x0^2 + 2 c' x1 x0 + 2 d' x1 + 2 e x0 - f)]
/// with c' = c e^{-gamma t/2} and d' = d e^{-gamma t/2}; see dho_kernel_closed
/// for the zero-drive form it must reproduce.
KernelValue dho_kernel(double x0, double x1, double t, const CheckedParams& p,
                       const DriveForce& drive = DriveForce::zero());

/// Zero-drive kernel written directly in x0, x1 without the coefficient bundle.
KernelValue dho_kernel_closed(double x0, double x1, double t, const CheckedParams& p);

/// Which middle term of eta^2(t) to use. `printed` is gamma/omega * cos(wt);
/// `propagated` is gamma/omega * cot(wt), the value obtained by actually
/// convolving the kernel with the t = 0 ground state.
enum class EtaForm { printed, propagated };

struct DhoAux {
  double omega = 0.0;
  double eta2 = 0.0;       // eta^2(t); NaN at caustics
  double eta2_sin2 = 0.0;  // eta^2(t) sin^2(wt); finite everywhere
  double bigD = 0.0;       // D(t); sign(sin wt) * alpha e^{gamma t/2} / sqrt(eta2_sin2)
  cplx bigA;               // A(t)
  double aPrime = 0.0;     // A'(t) = Re A(t)
  double bigN = 0.0;       // N(t), with |sin wt|^{1/2}; NaN at caustics
  double cot_arg = 0.0;    // gamma/(2 omega) + cot(wt); NaN at caustics
  bool caustic_flag = false;
};

DhoAux dho_aux(double t, const CheckedParams& p, EtaForm form = EtaForm::printed);

/// cot^{-1} on the branch (0, pi).
double arccot(double u);

/// t = 0 eigenstate N0 H_n(alpha0 x) exp(-alpha0^2 x^2 / 2), alpha0 = sqrt(m omega / hbar).
double dho_initial_state(int n, double x, const CheckedParams& p);

cplx dho_wavefunction(int n, double x, double t, const CheckedParams& p,
                      EtaForm form = EtaForm::printed);

struct DensityValue {
  double density = 0.0;   // renormalized value
  double raw_mass = 0.0;  // integral of the literal expression over the real line
};

/// N^2 exp(-2 A' x^2) renormalized; raw_mass = N^2 sqrt(pi / (2 A')).
DensityValue dho_position_density(double x, double t, const CheckedParams& p,
                                  EtaForm form = EtaForm::printed);
/// N^2 / sqrt(2 |A|^2 hbar) exp(-p^2 A' / (2 hbar^2 |A|^2)) renormalized;
/// raw_mass = N^2 sqrt(pi hbar / A').
DensityValue dho_momentum_density(double p_val, double t, const CheckedParams& p,
                                  EtaForm form = EtaForm::printed);

/// Two-time kernels for numeric::propagate / kernel_compose. The damped
/// Lagrangian is not time-translation invariant: the leg [t_from, t_to] is the
/// zero-start kernel with mass m * exp(gamma * t_from).
numeric::Propagator sho_propagator(const CheckedParams& p);
numeric::Propagator dho_propagator(const CheckedParams& p);
numeric::Propagator damped_free_propagator(const CheckedParams& p);

}  // namespace qent::analytic
