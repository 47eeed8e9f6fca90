#pragma once

#include "qcav/fock.hpp"

#include <vector>

// Closed-form dipole dynamics of the dispersive atom-field interaction in a
// lossy cavity: the complex decay factor z = mu e^{i theta}, the resummed
// <sigma_x> series, its lossless limit, the intermediate double sum kept as
// an algebraic cross-check, and the critical damping ratio that turns the
// measured dipole into a direct Q-function readout.

namespace qcav {

/// Dimensionless dynamics parameters: tau = chi*t, eta = gamma/chi.
struct DecayParams {
    double chi = 1.0;    // dispersive coupling chi = lambda^2/delta [rad/time]
    double gamma = 0.0;  // cavity decay rate [1/time]
    double eta = 0.0;    // gamma/chi
    double tau = 0.0;    // chi*t

    static DecayParams from_rates(double chi, double gamma, double t);
    static DecayParams dimensionless(double tau, double eta);
};

/// z with mu = |z| and theta = arg(z) in (-pi, pi]; z = 1 at tau = 0.
struct PhaseFactor {
    Complex z{1.0, 0.0};
    double mu = 1.0;
    double theta = 0.0;
};

/// z = (eta + i e^{-2(eta+i)tau}) / (eta + i), the dimensionless form of
/// (gamma + i chi e^{-2 xi t})/xi with xi = gamma + i chi.  The M-th power
/// of z weights rho_MM in the measured dipole signal.
PhaseFactor phase_factor(double tau, double eta);

/// mu = sqrt[(eta^2 + e^{-4 eta tau} + 2 eta e^{-2 eta tau} sin 2tau)/(1+eta^2)],
/// evaluated literally; cross-checked against |phase_factor().z|.
double mu_formula(double tau, double eta);

/// Two-argument arctangent form of arg z; throws std::runtime_error
/// ("phase undefined at mu=0") when both components vanish.
double theta_formula(double tau, double eta);

/// The unique root of g(eta) = eta - e^{-3 pi eta / 2} on [0,1], found by
/// bisection to |g| <= 1e-14.  At this damping ratio mu(3 pi/4) = 0 and the
/// measured dipole reduces to pi Q(alpha).
double critical_eta();

/// <sigma_x>(tau) = Re sum_M z^M rho_MM for the displaced field density
/// rho(0; alpha).  Branch-safe: powers of z rather than mu^M cos(M theta).
double sigma_x_closed(const FieldDensity& rho_displaced, double tau, double eta);

/// The pre-resummation double sum over (m, k), truncated at m + k <= N, with
/// incrementally computed factorial ratios.  Numerically identical to
/// sigma_x_closed; kept as the independent check of the index-shift algebra.
double sigma_x_double_sum(const FieldDensity& rho_displaced, double tau, double eta);

/// Lossless limit: sum_m P_m(alpha;0) cos(2 m tau) over the photon
/// distribution of the displaced state.
double sigma_x_lossless(const FockVector& psi, Complex alpha, double tau);

/// Simulated measurement at an arbitrary working point: displace the field
/// by -alpha, evaluate sigma_x_closed at (tau, eta), divide by pi.
double reconstruct_q_point(const FieldDensity& rho0, Complex alpha, double tau, double eta);
double reconstruct_q_point(const FockVector& psi, Complex alpha, double tau, double eta);

/// The measurement scheme proper: fixed working point (tau = 3 pi/4,
/// eta = critical_eta()), where the result equals q_direct(rho0, alpha) up
/// to series/truncation error.
double reconstruct_q_point(const FieldDensity& rho0, Complex alpha);
double reconstruct_q_point(const FockVector& psi, Complex alpha);

struct MuSample {
    double tau = 0.0;
    double mu = 0.0;
    double theta = 0.0;
};

/// Uniform samples of phase_factor on [0, tau_max]; steps >= 2.
std::vector<MuSample> mu_curve(double eta, double tau_max, int steps);

}  // namespace qcav
