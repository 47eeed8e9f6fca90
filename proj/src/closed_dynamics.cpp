#include "qcav/closed_dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace qcav {

namespace {
const Complex kI{0.0, 1.0};
}

DecayParams DecayParams::from_rates(double chi, double gamma, double t) {
    if (!(chi > 0.0)) throw std::invalid_argument("DecayParams: chi must be > 0");
    if (gamma < 0.0) throw std::invalid_argument("DecayParams: gamma must be >= 0");
    if (t < 0.0) throw std::invalid_argument("DecayParams: t must be >= 0");
    return DecayParams{chi, gamma, gamma / chi, chi * t};
}

DecayParams DecayParams::dimensionless(double tau, double eta) {
    if (tau < 0.0 || eta < 0.0) throw std::invalid_argument("DecayParams: tau, eta must be >= 0");
    return DecayParams{1.0, eta, eta, tau};
}

PhaseFactor phase_factor(double tau, double eta) {
    if (tau < 0.0 || eta < 0.0) throw std::invalid_argument("phase_factor: tau, eta must be >= 0");
    const Complex xi{eta, 1.0};
    const Complex z = (eta + kI * std::exp(-2.0 * xi * tau)) / xi;
    return PhaseFactor{z, std::abs(z), std::arg(z)};
}

double mu_formula(double tau, double eta) {
    if (tau < 0.0 || eta < 0.0) throw std::invalid_argument("mu_formula: tau, eta must be >= 0");
    const double e2 = std::exp(-2.0 * eta * tau);
    const double num = eta * eta + e2 * e2 + 2.0 * eta * e2 * std::sin(2.0 * tau);
    return std::sqrt(num / (1.0 + eta * eta));
}

double theta_formula(double tau, double eta) {
    if (tau < 0.0 || eta < 0.0) throw std::invalid_argument("theta_formula: tau, eta must be >= 0");
    const double e2 = std::exp(-2.0 * eta * tau);
    const double s = std::sin(2.0 * tau);
    const double c = std::cos(2.0 * tau);
    const double num = -(eta + e2 * (s - eta * c));
    const double den = eta * eta + e2 * (c + eta * s);
    if (std::abs(num) < 1e-300 && std::abs(den) < 1e-300)
        throw std::runtime_error("theta_formula: phase undefined at mu=0");
    return std::atan2(num, den);
}

double critical_eta() {
    auto g = [](double e) { return e - std::exp(-1.5 * kPi * e); };
    double lo = 0.0, hi = 1.0;  // g(0) = -1, g(1) = 1 - e^{-3pi/2} > 0
    double mid = 0.5;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) <= 1e-14) break;
        (gm < 0.0 ? lo : hi) = mid;
    }
    return mid;
}

double sigma_x_closed(const FieldDensity& rho_displaced, double tau, double eta) {
    const Complex z = phase_factor(tau, eta).z;
    const int dim = rho_displaced.cutoff + 1;
    Complex acc{0.0, 0.0};
    for (int m = dim - 1; m >= 0; --m)  // Horner in z
        acc = acc * z + rho_displaced.matrix(m, m).real();
    return acc.real();
}

double sigma_x_double_sum(const FieldDensity& rho_displaced, double tau, double eta) {
    const int dim = rho_displaced.cutoff + 1;
    const Complex xi{eta, 1.0};
    const Complex decay = std::exp(-2.0 * xi * tau);   // e^{-2 xi t}, dimensionless
    const Complex jump = eta * (1.0 - decay) / xi;     // gamma (1 - e^{-2 xi t}) / xi

    Complex acc{0.0, 0.0};
    Complex jm{1.0, 0.0};  // jump^m / m!
    for (int m = 0; m < dim; ++m) {
        if (m > 0) jm *= jump / double(m);
        Complex dk{1.0, 0.0};   // decay^k
        double ratio = 1.0;     // (m+k)!/k!, advanced multiplicatively in k
        for (int j = 1; j <= m; ++j) ratio *= j;  // k = 0 value: m!
        for (int k = 0; m + k < dim; ++k) {
            if (k > 0) {
                dk *= decay;
                ratio *= double(m + k) / double(k);
            }
            acc += jm * dk * ratio * rho_displaced.matrix(m + k, m + k).real();
        }
    }
    return acc.real();  // (1/2)(sum + c.c.)
}

double sigma_x_lossless(const FockVector& psi, Complex alpha, double tau) {
    if (tau < 0.0) throw std::invalid_argument("sigma_x_lossless: tau must be >= 0");
    CVector v = (alpha == Complex{0.0, 0.0})
                    ? psi.amps
                    : CVector(displacement_matrix(alpha, psi.cutoff) * psi.amps);
    double acc = 0.0;
    for (int m = 0; m <= psi.cutoff; ++m) acc += std::norm(v[m]) * std::cos(2.0 * m * tau);
    return acc;
}

double reconstruct_q_point(const FieldDensity& rho0, Complex alpha, double tau, double eta) {
    const CMatrix d = displacement_matrix(-alpha, rho0.cutoff);
    const FieldDensity shifted{d * rho0.matrix * d.adjoint(), rho0.cutoff};
    return sigma_x_closed(shifted, tau, eta) / kPi;
}

double reconstruct_q_point(const FockVector& psi, Complex alpha, double tau, double eta) {
    return reconstruct_q_point(displaced_density(psi, -alpha), Complex{0.0, 0.0}, tau, eta);
}

double reconstruct_q_point(const FieldDensity& rho0, Complex alpha) {
    return reconstruct_q_point(rho0, alpha, 0.75 * kPi, critical_eta());
}

double reconstruct_q_point(const FockVector& psi, Complex alpha) {
    return reconstruct_q_point(psi, alpha, 0.75 * kPi, critical_eta());
}

std::vector<MuSample> mu_curve(double eta, double tau_max, int steps) {
    if (steps < 2) throw std::invalid_argument("mu_curve: steps must be >= 2");
    if (tau_max <= 0.0) throw std::invalid_argument("mu_curve: tau_max must be > 0");
    std::vector<MuSample> out;
    out.reserve(steps);
    for (int k = 0; k < steps; ++k) {
        const double tau = tau_max * double(k) / double(steps - 1);
        const PhaseFactor p = phase_factor(tau, eta);
        out.push_back(MuSample{tau, p.mu, p.theta});
    }
    return out;
}

}  // namespace qcav
