#include "qent/analytic.hpp"

#include <cmath>
#include <limits>

namespace qent::analytic {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_regime(const CheckedParams& p, Regime regime, const char* what) {
  if (p.regime() != regime)
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + (regime == Regime::sho ? " needs sho-validated parameters"
                                                           : " needs dho-validated parameters"));
}

void guard_caustic(const CheckedParams& p, double t, const char* what) {
  if (p.is_caustic(t))
    throw Error(ErrorKind::CausticTime, std::string(what) + " at t = " + std::to_string(t) +
                                            " where |sin(omega t)| <= " +
                                            std::to_string(p.caustic_delta()));
}

void check_quantum_number(int n) {
  if (n < 0) throw Error(ErrorKind::NegativeQuantumNumber, "n = " + std::to_string(n));
  if (n > kMaxQuantumNumber)
    throw Error(ErrorKind::QuantumNumberTooLarge,
                "n = " + std::to_string(n) + " exceeds " + std::to_string(kMaxQuantumNumber));
}

// h_n(y) = H_n(y) / sqrt(2^n n!) by the normalized three-term recurrence.
double scaled_hermite(int n, double y) {
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = std::sqrt(2.0) * y;
  for (int k = 1; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * y * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Hermite functions pi^{-1/4} h_n(xi) exp(-xi^2/2), n = 0..n_max.
std::vector<double> hermite_functions(int n_max, double xi) {
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  out[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * xi * xi);
  if (n_max >= 1) out[1] = std::sqrt(2.0) * xi * out[0];
  for (int k = 1; k < n_max; ++k)
    out[k + 1] = std::sqrt(2.0 / (k + 1)) * xi * out[k] - std::sqrt(double(k) / (k + 1)) * out[k - 1];
  return out;
}

// Zero-drive damped kernel with an explicit mass, for legs that start at
// t_from > 0 (mass m e^{gamma t_from}).
cplx dho_kernel_with_mass(double x0, double x1, double t, double mass, const CheckedParams& p) {
  const double omega = p.omega();
  const double gamma = p.gamma();
  const double hbar = p.hbar();
  const double s = std::sin(omega * t);
  const double c = std::cos(omega * t);
  const double grow = std::exp(gamma * t);
  const double half_grow = std::exp(0.5 * gamma * t);
  const cplx pre = std::sqrt(cplx{0.0, -mass * omega * half_grow / (2.0 * kPi * hbar * s)});
  const double phase =
      mass / (4.0 * hbar) *
      (gamma * (x0 * x0 - grow * x1 * x1) +
       2.0 * omega / s * ((x0 * x0 + x1 * x1 * grow) * c - 2.0 * half_grow * x1 * x0));
  return pre * std::polar(1.0, phase);
}

cplx damped_free_with_mass(double x0, double x1, double t, double mass, const CheckedParams& p) {
  const double gamma = p.gamma();
  const double hbar = p.hbar();
  const double scale = gamma * mass * std::exp(0.5 * gamma * t) / std::sinh(0.5 * gamma * t);
  const cplx pre = std::sqrt(cplx{0.0, -scale / (4.0 * kPi * hbar)});
  const double dx = x1 - x0;
  return pre * std::polar(1.0, scale / (4.0 * hbar) * dx * dx);
}

}  // namespace

double sho_classical_action(double x0, double x1, double t, const CheckedParams& p) {
  require_regime(p, Regime::sho, "sho_classical_action");
  guard_caustic(p, t, "sho_classical_action");
  const double w = p.omega();
  const double s = std::sin(w * t);
  const double c = std::cos(w * t);
  return p.m() * w / (2.0 * s) * ((x0 * x0 + x1 * x1) * c - 2.0 * x0 * x1);
}

KernelValue sho_kernel(double x0, double x1, double t, const CheckedParams& p) {
  const double action = sho_classical_action(x0, x1, t, p);
  const double s = std::sin(p.omega() * t);
  const cplx pre = std::sqrt(cplx{0.0, -p.m() * p.omega() / (2.0 * kPi * p.hbar() * s)});
  return pre * std::polar(1.0, action / p.hbar());
}

double sho_energy(int n, const CheckedParams& p) {
  if (n < 0) throw Error(ErrorKind::NegativeQuantumNumber, "n = " + std::to_string(n));
  return p.hbar() * p.omega() * (n + 0.5);
}

std::vector<double> sho_eigenstates(int n_max, double x, const CheckedParams& p) {
  check_quantum_number(n_max);
  const double scale = std::sqrt(p.m() * p.omega() / p.hbar());
  auto out = hermite_functions(n_max, scale * x);
  const double norm = std::sqrt(scale);
  for (double& v : out) v *= norm;
  return out;
}

double sho_eigenstate(int n, double x, const CheckedParams& p) {
  return sho_eigenstates(n, x, p).back();
}

KernelValue mehler_kernel(double x0, double x1, double t, const CheckedParams& p, int n_max,
                          double eps) {
  require_regime(p, Regime::sho, "mehler_kernel");
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "Mehler damping eps must be > 0");
  const auto a = sho_eigenstates(n_max, x0, p);
  const auto b = sho_eigenstates(n_max, x1, p);
  const double w = p.omega();
  cplx sum{0.0, 0.0};
  for (int n = 0; n <= n_max; ++n) {
    const auto k = static_cast<std::size_t>(n);
    sum += std::polar(std::exp(-eps * w * n), -t * sho_energy(n, p) / p.hbar()) * (a[k] * b[k]);
  }
  return sum;
}

cplx sho_coherent_state(double x, double t, const CheckedParams& p) {
  require_regime(p, Regime::sho, "sho_coherent_state");
  const double w = p.omega();
  const double scale = std::sqrt(p.m() * w / p.hbar());
  const double alpha = scale * x;
  const double abar = scale * p.xbar();
  const cplx rot = std::polar(1.0, -w * t);
  const cplx exponent = -0.25 * abar * abar - 0.5 * alpha * alpha - cplx{0.0, 0.5 * w * t} -
                        0.25 * abar * abar * rot * rot + alpha * abar * rot;
  return std::pow(p.m() * w / (kPi * p.hbar()), 0.25) * std::exp(exponent);
}

double sho_position_density(double x, double t, const CheckedParams& p) {
  require_regime(p, Regime::sho, "sho_position_density");
  const double k = p.m() * p.omega() / p.hbar();
  const double shift = x - p.xbar() * std::cos(p.omega() * t);
  return std::sqrt(k / kPi) * std::exp(-k * shift * shift);
}

double sho_momentum_density(double p_val, double t, const CheckedParams& p) {
  require_regime(p, Regime::sho, "sho_momentum_density");
  const double mwh = p.m() * p.omega() * p.hbar();
  const double centre = -p.m() * p.omega() * p.xbar() * std::sin(p.omega() * t);
  const double shift = p_val - centre;
  return std::exp(-shift * shift / mwh) / std::sqrt(kPi * mwh);
}

double sho_momentum_density_literal(double p_val, double t, const CheckedParams& p) {
  require_regime(p, Regime::sho, "sho_momentum_density_literal");
  const double w = p.omega();
  const double mwh = p.m() * w * p.hbar();
  const double xb = p.xbar();
  const double exponent = -p_val * p_val / mwh +
                          p.m() * w * xb * xb / (2.0 * p.hbar()) * (std::cos(2.0 * w * t) - 1.0) -
                          2.0 * p_val * xb / p.hbar() * std::sin(w * t);
  return std::sqrt(1.0 / (kPi * mwh)) * std::exp(exponent);
}

KernelValue damped_free_kernel(double x0, double x1, double t, const CheckedParams& p) {
  if (!(p.gamma() > 0.0))
    throw Error(ErrorKind::ZeroDamping, "damped_free_kernel needs gamma > 0; use the free limit");
  if (!(t > 0.0)) throw Error(ErrorKind::ZeroTime, "damped_free_kernel needs t > 0");
  return damped_free_with_mass(x0, x1, t, p.m(), p);
}

DriveCoefficients dho_drive_coefficients(double t, const DriveForce& drive, const CheckedParams& p) {
  require_regime(p, Regime::dho, "dho_drive_coefficients");
  guard_caustic(p, t, "dho_drive_coefficients");
  const double w = p.omega();
  const double g = p.gamma();
  const double m = p.m();
  const double s = std::sin(w * t);
  const double cot = std::cos(w * t) / s;
  const double grow = std::exp(g * t);

  DriveCoefficients out;
  out.a = (-0.5 * g + w * cot) * grow;
  out.b = 0.5 * g + w * cot;
  out.c = -w * grow / s;
  if (drive.is_zero()) return out;
  if (!(t > 0.0)) throw Error(ErrorKind::ZeroTime, "drive integrals need t > 0");

  const numeric::QuadratureTolerance tol{1e-10, 1e-8};
  const numeric::QuadratureTolerance inner_tol{1e-12, 1e-10};
  const double int_d = numeric::integrate(
      [&](double tau) { return drive(tau) * std::exp(0.5 * g * tau) * std::sin(w * tau); }, 0.0, t,
      tol).value;
  const double int_e = numeric::integrate(
      [&](double tau) { return drive(tau) * std::exp(0.5 * g * tau) * std::sin(w * (t - tau)); },
      0.0, t, tol).value;
  const double int_f = numeric::integrate(
      [&](double tau) {
        if (!(tau > 0.0)) return 0.0;
        const double inner = numeric::integrate(
            [&](double u) { return drive(u) * std::exp(0.5 * g * u) * std::sin(w * u); }, 0.0, tau,
            inner_tol).value;
        return drive(tau) * std::exp(0.5 * g * tau) * std::sin(w * (t - tau)) * inner;
      },
      0.0, t, tol).value;

  out.d = grow / (m * s) * int_d;
  out.e = int_e / (m * s);
  // symmetric e^{g(tau+u)/2} weight and the 2/sin factor: this is what the
  // classical action of the driven path requires
  out.f = 2.0 * int_f / (m * m * w * s);
  return out;
}

KernelValue dho_kernel(double x0, double x1, double t, const CheckedParams& p,
                       const DriveForce& drive) {
  const DriveCoefficients k = dho_drive_coefficients(t, drive, p);
  const double w = p.omega();
  const double m = p.m();
  const double s = std::sin(w * t);
  const double half_shrink = std::exp(-0.5 * p.gamma() * t);
  const cplx pre =
      std::sqrt(cplx{0.0, -m * w * std::exp(0.5 * p.gamma() * t) / (2.0 * kPi * p.hbar() * s)});
  const double bracket = k.a * x1 * x1 + k.b * x0 * x0 + 2.0 * k.c * half_shrink * x1 * x0 +
                         2.0 * k.d * half_shrink * x1 + 2.0 * k.e * x0 - k.f;
  return pre * std::polar(1.0, m / (2.0 * p.hbar()) * bracket);
}

KernelValue dho_kernel_closed(double x0, double x1, double t, const CheckedParams& p) {
  require_regime(p, Regime::dho, "dho_kernel_closed");
  guard_caustic(p, t, "dho_kernel_closed");
  return dho_kernel_with_mass(x0, x1, t, p.m(), p);
}

double arccot(double u) { return 0.5 * kPi - std::atan(u); }

DhoAux dho_aux(double t, const CheckedParams& p, EtaForm form) {
  require_regime(p, Regime::dho, "dho_aux");
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "dho_aux needs t >= 0");
  const double w = p.omega();
  const double k = p.gamma() / w;
  const double s = std::sin(w * t);
  const double c = std::cos(w * t);
  const double scale = p.m() * w / (2.0 * p.hbar());
  const double grow = std::exp(p.gamma() * t);

  DhoAux aux;
  aux.omega = w;
  aux.caustic_flag = p.is_caustic(t);

  // eta^2 sin^2 and the imaginary bracket of A are written without 1/sin so
  // they stay finite through the caustics.
  double im_numerator = 0.0;
  if (form == EtaForm::printed) {
    aux.eta2_sin2 = 1.0 + k * c * s * s + 0.25 * k * k * s * s;
    im_numerator = 0.5 * k - k * c * c * s - 0.25 * k * k * c * s;
  } else {
    aux.eta2_sin2 = 1.0 + k * s * c + 0.25 * k * k * s * s;
    im_numerator = 0.5 * k - k * c * c - 0.25 * k * k * c * s;
  }
  const double im_bracket = 0.5 * k + im_numerator / aux.eta2_sin2;
  aux.bigA = scale * grow * cplx{1.0 / aux.eta2_sin2, im_bracket};
  aux.aPrime = aux.bigA.real();

  if (aux.caustic_flag) {
    aux.eta2 = kNaN;
    aux.bigD = kNaN;
    aux.bigN = kNaN;
    aux.cot_arg = kNaN;
    return aux;
  }
  const double alpha = std::sqrt(p.m() * w / p.hbar());
  aux.eta2 = aux.eta2_sin2 / (s * s);
  aux.bigD = alpha * std::exp(0.5 * p.gamma() * t) / (std::sqrt(aux.eta2) * s);
  aux.bigN = std::pow(p.m() * w / (kPi * p.hbar()), 0.25) * std::exp(0.25 * p.gamma() * t) /
             (std::sqrt(aux.eta2) * std::sqrt(std::abs(s)));
  aux.cot_arg = 0.5 * k + c / s;
  return aux;
}

double dho_initial_state(int n, double x, const CheckedParams& p) {
  require_regime(p, Regime::dho, "dho_initial_state");
  check_quantum_number(n);
  const double alpha = std::sqrt(p.m() * p.omega() / p.hbar());
  return std::sqrt(alpha) * hermite_functions(n, alpha * x).back();
}

cplx dho_wavefunction(int n, double x, double t, const CheckedParams& p, EtaForm form) {
  check_quantum_number(n);
  require_regime(p, Regime::dho, "dho_wavefunction");
  guard_caustic(p, t, "dho_wavefunction");
  const DhoAux aux = dho_aux(t, p, form);
  const cplx phase = std::polar(1.0, -(n + 0.5) * arccot(aux.cot_arg));
  return aux.bigN * phase * scaled_hermite(n, aux.bigD * x) * std::exp(-aux.bigA * x * x);
}

DensityValue dho_position_density(double x, double t, const CheckedParams& p, EtaForm form) {
  require_regime(p, Regime::dho, "dho_position_density");
  guard_caustic(p, t, "dho_position_density");
  const DhoAux aux = dho_aux(t, p, form);
  const double n2 = aux.bigN * aux.bigN;
  const double raw_mass = n2 * std::sqrt(kPi / (2.0 * aux.aPrime));
  return {n2 * std::exp(-2.0 * aux.aPrime * x * x) / raw_mass, raw_mass};
}

DensityValue dho_momentum_density(double p_val, double t, const CheckedParams& p, EtaForm form) {
  require_regime(p, Regime::dho, "dho_momentum_density");
  guard_caustic(p, t, "dho_momentum_density");
  const DhoAux aux = dho_aux(t, p, form);
  const double n2 = aux.bigN * aux.bigN;
  const double abs_a2 = std::norm(aux.bigA);
  const double hbar = p.hbar();
  const double literal_scale = n2 / std::sqrt(2.0 * abs_a2 * hbar);
  const double raw_mass = n2 * std::sqrt(kPi * hbar / aux.aPrime);
  const double value =
      literal_scale * std::exp(-p_val * p_val / (2.0 * hbar * hbar) * aux.aPrime / abs_a2);
  return {value / raw_mass, raw_mass};
}

numeric::Propagator sho_propagator(const CheckedParams& p) {
  require_regime(p, Regime::sho, "sho_propagator");
  return {[p](double x, double x0, double t_from, double t_to) {
            return sho_kernel(x0, x, t_to - t_from, p);
          },
          p.omega()};
}

numeric::Propagator dho_propagator(const CheckedParams& p) {
  require_regime(p, Regime::dho, "dho_propagator");
  return {[p](double x, double x0, double t_from, double t_to) {
            const double t = t_to - t_from;
            guard_caustic(p, t, "dho_propagator");
            return dho_kernel_with_mass(x0, x, t, p.m() * std::exp(p.gamma() * t_from), p);
          },
          p.omega()};
}

numeric::Propagator damped_free_propagator(const CheckedParams& p) {
  if (!(p.gamma() > 0.0))
    throw Error(ErrorKind::ZeroDamping, "damped_free_propagator needs gamma > 0");
  return {[p](double x, double x0, double t_from, double t_to) {
            const double t = t_to - t_from;
            if (!(t > 0.0)) throw Error(ErrorKind::ZeroTime, "damped free kernel needs t > 0");
            return damped_free_with_mass(x0, x, t, p.m() * std::exp(p.gamma() * t_from), p);
          },
          0.0};
}

}  // namespace qent::analytic
