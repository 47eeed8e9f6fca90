#include "qcav/closed_dynamics.hpp"

#include "qcav/oracle_dynamics.hpp"
#include "qcav/quasiprob.hpp"

#include "doctest.h"

#include <cmath>

using namespace qcav;

namespace {
FockVector state(const char* name, int cutoff = 32) {
    return make_state(StateSpec::parse(name), cutoff);
}

double angular_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2.0 * kPi);
    return std::min(d, 2.0 * kPi - d);
}
}  // namespace

TEST_CASE("decay parameter factories") {
    const DecayParams p = DecayParams::from_rates(2.0, 0.5, 3.0);
    CHECK(p.eta == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p.tau == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(std::abs(p.eta - p.gamma / p.chi) < 1e-14);
    const DecayParams d = DecayParams::dimensionless(1.2, 0.3);
    CHECK(d.chi == 1.0);
    CHECK(d.gamma == 0.3);
    CHECK_THROWS_AS(DecayParams::from_rates(0.0, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(DecayParams::from_rates(1.0, -0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(DecayParams::dimensionless(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("phase factor limits") {
    for (double tau : {0.0, 0.3, 1.0, 2.356, 7.0}) {
        CHECK(std::abs(phase_factor(tau, 0.0).mu - 1.0) < 1e-14);  // no damping
    }
    for (double eta : {0.0, 0.1, 0.5, 1.0}) {
        const PhaseFactor p = phase_factor(0.0, eta);
        CHECK(std::abs(p.z - Complex{1.0, 0.0}) < 1e-15);
        CHECK(p.mu == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(p.theta == 0.0);
    }
    CHECK(phase_factor(0.75 * kPi, critical_eta()).mu <= 1e-13);
}

TEST_CASE("mu formula closed forms") {
    for (double tau : {0.1, 1.0, 2.0, 9.0}) CHECK(mu_formula(tau, 0.0) == 1.0);
    for (double eta : {0.0, 0.2, 0.7, 1.0}) CHECK(mu_formula(0.0, eta) == 1.0);

    // tau = 3pi/4 reduction |eta - e^{-3 eta pi/2}| / sqrt(1+eta^2)
    for (double eta : {0.1, 0.2745, 0.6}) {
        const double expected =
            std::abs(eta - std::exp(-1.5 * kPi * eta)) / std::sqrt(1.0 + eta * eta);
        CHECK(mu_formula(0.75 * kPi, eta) == doctest::Approx(expected).epsilon(1e-13));
    }

    // decaying exponentials vanish at large tau
    CHECK(std::abs(mu_formula(50.0, 1.0) - 1.0 / std::sqrt(2.0)) < 1e-10);
}

TEST_CASE("theta formula against complex arithmetic") {
    for (double eta : {0.0, 0.3, 0.9}) CHECK(theta_formula(0.0, eta) == 0.0);

    for (double tau : {0.2, 1.0, 2.5, 4.0}) {
        CHECK(angular_distance(theta_formula(tau, 0.0), -2.0 * tau) < 1e-12);
    }

    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        for (int j = 0; j < 100; ++j) {
            const double tau = 3.0 * kPi * i / 99.0;
            const double eta = 1.0 * j / 99.0;
            const PhaseFactor p = phase_factor(tau, eta);
            if (p.mu > 1e-12)
                worst = std::max(worst, angular_distance(theta_formula(tau, eta), p.theta));
        }
    }
    CHECK(worst < 1e-12);

    // At the magic point both atan2 arguments are ~1e-17 residuals, not true
    // zeros, so the phase is still defined (and excluded from agreement
    // checks by the mu > 1e-12 guard).
    CHECK_NOTHROW(theta_formula(0.75 * kPi, critical_eta()));
    CHECK(std::isfinite(theta_formula(0.75 * kPi, critical_eta())));

    // the undefined-phase error needs both components to underflow exactly
    CHECK_THROWS_WITH_AS(theta_formula(4e307, 1e-305),
                         doctest::Contains("phase undefined"), std::runtime_error);
}

TEST_CASE("critical eta is the unique fixed point") {
    const double eta = critical_eta();
    auto g = [](double e) { return e - std::exp(-1.5 * kPi * e); };
    CHECK(std::abs(g(eta)) <= 1e-14);
    CHECK(eta == doctest::Approx(0.2744106319028481).epsilon(1e-14));
    CHECK(g(0.0) < 0.0);
    CHECK(g(1.0) > 0.0);

    // strictly increasing scan with exactly one sign change
    int sign_changes = 0;
    double prev = g(0.0);
    for (int k = 1; k < 1000; ++k) {
        const double cur = g(k / 999.0);
        CHECK(cur > prev);
        if (prev < 0.0 && cur >= 0.0) ++sign_changes;
        prev = cur;
    }
    CHECK(sign_changes == 1);

    CHECK(mu_formula(0.75 * kPi, eta) <= 1e-13);
}

TEST_CASE("closed dipole: vacuum stays saturated") {
    const FieldDensity vac = density_from_pure(state("vacuum"));
    for (double tau : {0.0, 0.4, 2.0})
        for (double eta : {0.0, 0.3, 1.0})
            CHECK(sigma_x_closed(vac, tau, eta) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("closed dipole reduces to the lossless series at eta = 0") {
    const FockVector psi = state("coherent:1,0");
    const Complex alpha{0.5, 0.3};
    const FieldDensity rho = displaced_density(psi, alpha);
    for (double tau : {0.1, 0.8, kPi / 2.0, 2.0, 2.9}) {
        CHECK(std::abs(sigma_x_closed(rho, tau, 0.0) - sigma_x_lossless(psi, alpha, tau)) <
              1e-12);
    }
}

TEST_CASE("closed dipole against the brute-force integrator") {
    const FockVector psi = state("coherent:1,0");
    const Complex alpha{0.5, 0.0};
    const double tau = 0.8, eta = 0.2;
    const double closed = sigma_x_closed(displaced_density(psi, alpha), tau, eta);
    const JointDensity evolved =
        integrate_rk4(joint_initial(psi, alpha), 1.0, eta, tau, 1e-4);
    CHECK(std::abs(closed - sigma_x_expectation(evolved)) < 1e-6);
}

TEST_CASE("double sum equals the resummed closed form") {
    for (const char* name : {"vacuum", "coherent:1,0", "fock:2", "cat:1.5,0"}) {
        const FockVector psi = state(name);
        for (const Complex alpha : {Complex{0.0, 0.0}, Complex{0.5, 0.3}}) {
            const FieldDensity rho = displaced_density(psi, alpha);
            for (double tau : {0.1, 0.8, 2.0})
                for (double eta : {0.0, 0.2, critical_eta()})
                    CHECK(std::abs(sigma_x_double_sum(rho, tau, eta) -
                                   sigma_x_closed(rho, tau, eta)) < 1e-10);
        }
    }
}

TEST_CASE("double sum closed forms") {
    const FieldDensity vac = density_from_pure(state("vacuum"));
    CHECK(sigma_x_double_sum(vac, 0.7, 0.4) == doctest::Approx(1.0).epsilon(1e-14));

    const FieldDensity one = density_from_pure(state("fock:1"));
    for (double tau : {0.3, 1.1, 2.2})
        CHECK(sigma_x_double_sum(one, tau, 0.0) ==
              doctest::Approx(std::cos(2.0 * tau)).epsilon(1e-13));
}

TEST_CASE("lossless series and parity point") {
    const FockVector psi = state("coherent:1,0");
    CHECK(sigma_x_lossless(state("vacuum"), {0.0, 0.0}, 1.7) ==
          doctest::Approx(1.0).epsilon(1e-14));

    const Complex alpha{0.4, -0.2};
    const auto p = photon_distribution(displaced_density(psi, alpha));
    double parity = 0.0;
    for (size_t m = 0; m < p.size(); ++m) parity += (m % 2 == 0 ? 1.0 : -1.0) * p[m];
    CHECK(std::abs(sigma_x_lossless(psi, alpha, kPi / 2.0) - parity) < 1e-12);
}

TEST_CASE("dipole magnitude is bounded by the damped diagonal sum") {
    for (const char* name : {"coherent:1,0", "cat:1.5,0"}) {
        const FockVector psi = state(name);
        const FieldDensity rho = displaced_density(psi, {0.5, 0.3});
        for (double tau : {0.3, 1.2, 2.356})
            for (double eta : {0.0, 0.2, 0.8}) {
                const double mu = mu_formula(tau, eta);
                double envelope = 0.0, mu_pow = 1.0;
                for (int m = 0; m <= rho.cutoff; ++m) {
                    envelope += mu_pow * rho.matrix(m, m).real();
                    mu_pow *= mu;
                }
                CHECK(std::abs(sigma_x_closed(rho, tau, eta)) <= envelope + 1e-12);
                CHECK(envelope <= 1.0 + 1e-12);
            }
    }
}

TEST_CASE("Q readout at the magic point") {
    const FockVector vac = state("vacuum");
    for (const Complex a : {Complex{0.0, 0.0}, Complex{0.7, -0.5}, Complex{1.5, 1.0}}) {
        CHECK(std::abs(reconstruct_q_point(vac, a) - std::exp(-std::norm(a)) / kPi) < 1e-10);
    }

    const FockVector coh = state("coherent:1,0");
    CHECK(std::abs(reconstruct_q_point(coh, {1.0, 0.0}) - 1.0 / kPi) < 1e-10);

    const FockVector cat = state("cat:1.5,0");
    const FieldDensity rho0 = density_from_pure(cat);
    double worst = 0.0;
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 21; ++j) {
            const Complex a{-2.0 + 0.2 * i, -2.0 + 0.2 * j};
            worst = std::max(worst, std::abs(reconstruct_q_point(cat, a) - q_direct(rho0, a)));
        }
    CHECK(worst < 1e-8);
}

TEST_CASE("mu curve reproduces the three damping regimes") {
    const int steps = 3001;
    const double tau_max = 3.0 * kPi;
    const double step = tau_max / (steps - 1);

    const auto flat = mu_curve(0.0, tau_max, steps);
    CHECK(flat.front().tau == 0.0);
    CHECK(flat.front().mu == 1.0);
    CHECK(flat.front().theta == 0.0);
    for (const auto& s : flat) CHECK(std::abs(s.mu - 1.0) < 1e-12);

    const auto weak = mu_curve(0.025, tau_max, steps);
    double lowest = 2.0;
    std::vector<double> minima;
    for (int i = 1; i + 1 < steps; ++i) {
        lowest = std::min(lowest, weak[i].mu);
        if (weak[i].mu < weak[i - 1].mu && weak[i].mu < weak[i + 1].mu)
            minima.push_back(weak[i].tau);
    }
    CHECK(lowest > 0.0);
    REQUIRE(minima.size() == 3);
    for (int k = 0; k < 3; ++k)
        CHECK(std::abs(minima[k] - (0.75 * kPi + k * kPi)) < 0.75);

    const auto crit = mu_curve(critical_eta(), tau_max, steps);
    int argmin = 0;
    for (int i = 1; i < steps; ++i)
        if (crit[i].mu < crit[argmin].mu) argmin = i;
    CHECK(std::abs(crit[argmin].tau - 0.75 * kPi) <= step + 1e-12);
    CHECK(crit[argmin].mu <= 1e-9);

    CHECK_THROWS_AS(mu_curve(0.1, 1.0, 1), std::invalid_argument);
}
