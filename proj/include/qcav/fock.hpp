#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

// Truncated Fock-space linear algebra: ladder operators, state factories,
// displacement, photon statistics and coherent overlaps.  Everything here is
// a pure function of its inputs; values are immutable after construction.

namespace qcav {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Pure field state in the number basis |0..N>, amplitudes c_0..c_N.
/// Factory-built states satisfy sum |c_n|^2 = 1 within 1e-10 (the factory
/// certifies the discarded tail below 1e-12 and fails loudly otherwise).
struct FockVector {
    CVector amps;
    int cutoff = 0;  // amps.size() == cutoff + 1
};

/// (N+1)x(N+1) field density matrix.  Hermitian within 1e-10 entrywise,
/// trace within 1e-8 of 1 for normalized states, real nonneg diagonal.
struct FieldDensity {
    CMatrix matrix;
    int cutoff = 0;
};

/// Parsed test-state description.  Text grammar (CLI):
///   vacuum | fock:<n> | coherent:<re>,<im> | cat:<re>,<im>
struct StateSpec {
    enum class Kind { Vacuum, Fock, Coherent, Cat };
    Kind kind = Kind::Vacuum;
    int fock_n = 0;
    Complex amplitude{0.0, 0.0};

    /// Throws std::invalid_argument on malformed text or a degenerate
    /// cat:0 (which collapses to vacuum and is rejected).
    static StateSpec parse(const std::string& text);
};

/// True when a displacement of this amplitude is at risk of visible
/// truncation error at the given cutoff (|alpha|^2 > cutoff/4).  Callers
/// that surface warnings check this; the operations still return.
bool truncation_risk(Complex alpha, int cutoff);

/// Working dimension used for the displacement exponential before cropping.
int displacement_pad(int cutoff);

/// Annihilation operator a on the truncated space: a_{n-1,n} = sqrt(n).
/// The creation operator is its conjugate transpose.
CMatrix annihilation_matrix(int cutoff);

/// D(alpha) = exp(alpha a^dag - alpha^* a), computed by eigendecomposition
/// of the anti-Hermitian generator in dimension displacement_pad(cutoff),
/// then cropped to (N+1)x(N+1).  Accurate to ~1e-12 on the inner block for
/// amplitudes clear of the truncation-risk bound.
CMatrix displacement_matrix(Complex alpha, int cutoff);

/// Exact matrix elements <n|D(alpha)|m> for n < rows, m < cols, built from
/// the coherent column <n|D|0> and the identity D a^dag = (a^dag - alpha^*) D.
/// The recurrence couples only downward in n, so no padding is needed: the
/// block is exact up to rounding.  Independent of displacement_matrix; used
/// as its cross-check oracle and by the Wigner evaluator.
CMatrix displaced_fock_block(Complex alpha, int rows, int cols);

/// Build a normalized state, certifying the discarded tail < 1e-12.
/// coherent:b has c_n = e^{-|b|^2/2} b^n / sqrt(n!); cat:b is the even cat
/// N(|b> + |-b>), N = [2(1+e^{-2|b|^2})]^{-1/2}.
/// Throws std::invalid_argument ("cutoff too small", fock n > cutoff).
FockVector make_state(const StateSpec& spec, int cutoff);

FieldDensity density_from_pure(const FockVector& psi);

/// Displace a pure state and form the field density D|psi><psi|D^dag.
FieldDensity displaced_density(const FockVector& psi, Complex alpha);

/// P_m = rho_mm (real parts of the diagonal).
std::vector<double> photon_distribution(const FieldDensity& rho);

/// <alpha|rho|alpha>, contracted with truncated coherent amplitudes (exact
/// for rho supported on the truncated space).  Result clamped to >= 0;
/// throws std::runtime_error if the quadratic form is negative beyond the
/// 1e-10 numerical floor (invalid density).
double coherent_overlap(const FieldDensity& rho, Complex alpha);

/// Validators for the type invariants; throw std::runtime_error on breach.
void check_density(const FieldDensity& rho);

}  // namespace qcav
