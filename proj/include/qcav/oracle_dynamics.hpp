#pragma once

#include "qcav/fock.hpp"

// Independent brute-force validation of the closed-form results: direct
// Runge-Kutta integration of the dispersive master equation, a literal
// evaluator of the factored superoperator solution, and a full
// Jaynes-Cummings probe of the dispersive approximation.

namespace qcav {

/// Atom (x) field density matrix organized as four atomic blocks, atom
/// indices outer, field indices inner.  Valid states have
/// Tr ee + Tr gg = 1 (1e-8), ee/gg Hermitian, ge = eg^dag (1e-10).
struct JointDensity {
    CMatrix ee, eg, ge, gg;
    int cutoff = 0;

    double trace() const { return (ee.trace() + gg.trace()).real(); }
};

/// Full Jaynes-Cummings parameter set.  chi = lambda^2/delta is derived;
/// delta = omega_eg - omega must be nonzero.
struct FullParams {
    double omega = 0.0;     // field frequency
    double omega_eg = 0.0;  // atomic frequency
    double lambda_c = 0.0;  // coupling strength
    double delta = 0.0;     // omega_eg - omega
    double chi = 0.0;       // lambda^2 / delta

    static FullParams from_frequencies(double omega, double omega_eg, double lambda_c);
};

/// Atom in (|e>+|g>)/sqrt(2), field displaced by alpha: all four blocks
/// equal (1/2) D |psi><psi| D^dag.
JointDensity joint_initial(const FockVector& psi_field, Complex alpha);

/// d rho/dt = -i [chi a^dag a sigma_z, rho] + 2 gamma a rho a^dag
///            - gamma a^dag a rho - gamma rho a^dag a, blockwise.
JointDensity lindblad_rhs(const JointDensity& rho, double chi, double gamma);

/// Largest stable step accepted by integrate_rk4 for these rates.
double rk4_max_dt(double chi, double gamma, int cutoff);

/// Classical fixed-step RK4; the final step is shortened to land exactly on
/// t_end.  Enforces dt <= rk4_max_dt (throws std::invalid_argument with a
/// suggested dt) and a trace drift <= 1e-8 over the run (std::runtime_error).
JointDensity integrate_rk4(const JointDensity& rho0, double chi, double gamma,
                           double t_end, double dt);

/// The factored analytic solution, evaluated per atomic block: the jump
/// series rho' = sum_n (2 gamma f_ij)^n / n! a^n rho a^dag^n with
/// f_ij = (1 - e^{-(G_i + Gbar_j) t})/(G_i + Gbar_j), G_i = gamma + i chi s_i,
/// followed by the diagonal scaling e^{-G_i n t} e^{-Gbar_j m t}.  The series
/// cap at n = N is exact for truncated states; a remainder check guards
/// misuse (some term norm must fall below 1e-14 by n = N, else
/// std::runtime_error).  gamma = 0 takes the removable-singularity branch.
JointDensity superop_evolve(const JointDensity& rho0, double chi, double gamma, double t);

/// <sigma_x> = 2 Re Tr rho_eg.
double sigma_x_expectation(const JointDensity& rho);

/// Largest step accepted by full_jc_evolve; bounded by the JC generator
/// rates |delta|/2 + lambda sqrt(N+1) + 2 gamma (N+1).
double jc_max_dt(const FullParams& params, double gamma, int cutoff);

/// RK4 integration with H = (delta/2) sigma_z + lambda (a^dag sigma_- +
/// a sigma_+) replacing the dispersive Hamiltonian (interaction picture at
/// the field frequency); cavity dissipator unchanged.  Used solely to probe
/// the dispersive approximation.
JointDensity full_jc_evolve(const JointDensity& rho0, const FullParams& params,
                            double gamma, double t_end, double dt);

/// Validity ratio r = |delta| / (lambda sqrt(n_relevant + 1)); callers treat
/// r >= 10 as the dispersive regime (reported, never enforced).  Throws
/// std::invalid_argument ("no coupling") when lambda = 0.
double dispersive_validity(const FullParams& params, int n_relevant);

/// Invariant validator for tests; throws std::runtime_error on breach.
void check_joint(const JointDensity& rho);

}  // namespace qcav
