#include "qcav/oracle_dynamics.hpp"

#include "qcav/closed_dynamics.hpp"

#include "doctest.h"

#include <cmath>

using namespace qcav;

namespace {
const Complex kImag{0.0, 1.0};

FockVector state(const char* name, int cutoff = 24) {
    return make_state(StateSpec::parse(name), cutoff);
}

double block_diff(const CMatrix& a, const CMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_CASE("joint initial state") {
    const JointDensity j0 = joint_initial(state("vacuum", 8), {0.0, 0.0});
    CHECK(j0.ee(0, 0).real() == doctest::Approx(0.5));
    CHECK(block_diff(j0.ee, j0.gg) == 0.0);
    CHECK(block_diff(j0.ee, j0.eg) == 0.0);

    const JointDensity j = joint_initial(state("coherent:1,0"), {0.5, 0.3});
    CHECK(std::abs(j.trace() - 1.0) < 1e-10);
    CHECK(std::abs(j.eg.trace().real() - 0.5) < 1e-10);
    CHECK_NOTHROW(check_joint(j));
}

TEST_CASE("lindblad generator: zero couplings, trace freeness, decay rates") {
    const JointDensity j = joint_initial(state("coherent:1,0"), {0.2, -0.4});
    const JointDensity z = lindblad_rhs(j, 0.0, 0.0);
    CHECK(z.ee.cwiseAbs().maxCoeff() == 0.0);
    CHECK(z.eg.cwiseAbs().maxCoeff() == 0.0);

    const JointDensity r = lindblad_rhs(j, 0.7, 0.35);
    CHECK(std::abs(r.trace()) < 1e-12);

    JointDensity one;  // bare |1><1| weight in the ee block
    one.cutoff = 4;
    one.ee = CMatrix::Zero(5, 5);
    one.ee(1, 1) = 1.0;
    one.eg = CMatrix::Zero(5, 5);
    one.ge = CMatrix::Zero(5, 5);
    one.gg = CMatrix::Zero(5, 5);
    const JointDensity d = lindblad_rhs(one, 0.9, 1.0);
    CHECK(d.ee(1, 1).real() == doctest::Approx(-2.0));
    CHECK(d.ee(0, 0).real() == doctest::Approx(2.0));
}

TEST_CASE("rk4: zero time returns the initial state") {
    const JointDensity j = joint_initial(state("coherent:1,0"), {0.0, 0.0});
    const JointDensity out = integrate_rk4(j, 1.0, 0.2, 0.0, 1e-4);
    CHECK(block_diff(out.ee, j.ee) == 0.0);
    CHECK(block_diff(out.eg, j.eg) == 0.0);
}

TEST_CASE("rk4 matches the unitary dispersive phases at gamma = 0") {
    const double chi = 1.0, t = 0.7;
    const JointDensity j0 = joint_initial(state("coherent:1,0"), {0.0, 0.0});
    const JointDensity jt = integrate_rk4(j0, chi, 0.0, t, 1e-4);
    const int dim = j0.cutoff + 1;
    double worst = 0.0;
    for (int n = 0; n < dim; ++n) {
        for (int m = 0; m < dim; ++m) {
            auto phase = [&](double si, double sj) {
                return std::exp(-kImag * chi * (si * n - sj * m) * t);
            };
            worst = std::max(worst, std::abs(jt.ee(n, m) - phase(1, 1) * j0.ee(n, m)));
            worst = std::max(worst, std::abs(jt.eg(n, m) - phase(1, -1) * j0.eg(n, m)));
            worst = std::max(worst, std::abs(jt.ge(n, m) - phase(-1, 1) * j0.ge(n, m)));
            worst = std::max(worst, std::abs(jt.gg(n, m) - phase(-1, -1) * j0.gg(n, m)));
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("rk4 photon mean decays at 2 gamma when chi = 0") {
    const double gamma = 0.3, t = 1.0;
    const JointDensity j0 = joint_initial(state("coherent:1,0"), {0.0, 0.0});
    const JointDensity jt = integrate_rk4(j0, 0.0, gamma, t, 5e-4);
    auto mean = [](const JointDensity& r) {
        double m = 0.0;
        for (int n = 0; n <= r.cutoff; ++n) m += n * (r.ee(n, n) + r.gg(n, n)).real();
        return m;
    };
    CHECK(std::abs(mean(jt) - mean(j0) * std::exp(-2.0 * gamma * t)) < 1e-7);
}

TEST_CASE("rk4 stability guard names a usable step") {
    const JointDensity j = joint_initial(state("coherent:1,0"), {0.0, 0.0});
    CHECK_THROWS_WITH_AS(integrate_rk4(j, 1.0, 0.0, 1.0, 0.1),
                         doctest::Contains("use dt <="), std::invalid_argument);
    CHECK_THROWS_AS(integrate_rk4(j, 1.0, 0.0, 1.0, -1e-4), std::invalid_argument);
}

TEST_CASE("rk4 preserves block structure, trace and hermiticity") {
    JointDensity j = joint_initial(state("coherent:1,0"), {0.3, 0.2});
    j.eg.setZero();
    j.ge.setZero();
    const JointDensity out = integrate_rk4(j, 1.0, 0.25, 0.6, 1e-4);
    CHECK(out.eg.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(out.ge.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(out.trace() - 1.0) < 1e-8);

    const JointDensity full = integrate_rk4(joint_initial(state("cat:1.5,0", 32), {0.5, 0.3}),
                                            1.0, 0.2, 0.8, 1e-4);
    CHECK(std::abs(full.trace() - 1.0) < 1e-8);
    CHECK((full.ge - full.eg.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("superoperator solution: identity at t = 0 and lossless phases") {
    const JointDensity j0 = joint_initial(state("coherent:1,0"), {0.2, 0.1});
    const JointDensity at0 = superop_evolve(j0, 1.0, 0.3, 0.0);
    CHECK(block_diff(at0.ee, j0.ee) < 1e-15);
    CHECK(block_diff(at0.eg, j0.eg) < 1e-15);

    const double t = 0.9;
    const JointDensity free = superop_evolve(j0, 1.0, 0.0, t);
    const int dim = j0.cutoff + 1;
    double worst = 0.0;
    for (int n = 0; n < dim; ++n)
        for (int m = 0; m < dim; ++m) {
            const Complex expected = std::exp(-kImag * (double(n) - double(m)) * t) * j0.ee(n, m);
            worst = std::max(worst, std::abs(free.ee(n, m) - expected));
            const Complex expected_eg =
                std::exp(-kImag * (double(n) + double(m)) * t) * j0.eg(n, m);
            worst = std::max(worst, std::abs(free.eg(n, m) - expected_eg));
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("superoperator solution agrees with the integrator") {
    const JointDensity j0 = joint_initial(state("coherent:1,0"), {0.5, 0.3});
    const double eta = 0.25, tau = 0.8;
    const JointDensity a = superop_evolve(j0, 1.0, eta, tau);
    const JointDensity b = integrate_rk4(j0, 1.0, eta, tau, 1e-4);
    CHECK(block_diff(a.ee, b.ee) < 1e-7);
    CHECK(block_diff(a.eg, b.eg) < 1e-7);
    CHECK(block_diff(a.gg, b.gg) < 1e-7);
    CHECK(std::abs(sigma_x_expectation(a) - sigma_x_expectation(b)) < 1e-9);
    CHECK(std::abs(a.trace() - 1.0) < 1e-10);
    CHECK((a.ge - a.eg.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dipole expectation reads the coherence block") {
    const JointDensity j = joint_initial(state("cat:1.5,0", 32), {0.0, 0.0});
    CHECK(sigma_x_expectation(j) == doctest::Approx(1.0).epsilon(1e-12));
    JointDensity cleared = j;
    cleared.eg.setZero();
    CHECK(sigma_x_expectation(cleared) == 0.0);
}

TEST_CASE("full JC probe: decoupled limit rotates coherences at the detuning") {
    const FullParams p = FullParams::from_frequencies(0.0, 3.0, 1e-12);
    // lambda ~ 0: the eg block just picks up e^{-i delta t}
    const JointDensity j0 = joint_initial(state("coherent:1,0", 16), {0.0, 0.0});
    const double t = 0.8;
    const JointDensity jt = full_jc_evolve(j0, p, 0.0, t, 1e-3);
    const Complex rot = std::exp(-kImag * p.delta * t);
    CHECK(block_diff(jt.eg, CMatrix(rot * j0.eg)) < 1e-8);
    CHECK(block_diff(jt.ee, j0.ee) < 1e-8);
    CHECK(std::abs(jt.trace() - 1.0) < 1e-8);
}

TEST_CASE("full JC probe improves with detuning") {
    const int cutoff = 16;
    const FockVector psi = state("coherent:1,0", cutoff);
    const FieldDensity rho = density_from_pure(psi);

    auto probe = [&](double ratio) {
        const FullParams p = FullParams::from_frequencies(0.0, ratio * ratio, ratio);
        const double dt = 0.999 * jc_max_dt(p, 0.0, cutoff);
        JointDensity cur = joint_initial(psi, {0.0, 0.0});
        double worst = 0.0, t_prev = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double t = 0.5 * k / 20.0;
            cur = full_jc_evolve(cur, p, 0.0, t - t_prev, dt);
            t_prev = t;
            const Complex frame = std::exp(kImag * (p.delta + p.chi) * t);
            const double jc = 2.0 * (frame * cur.eg.trace()).real();
            worst = std::max(worst, std::abs(jc - sigma_x_closed(rho, p.chi * t, 0.0)));
        }
        CHECK(std::abs(cur.trace() - 1.0) < 1e-8);
        return worst;
    };
    const double coarse = probe(5.0);
    const double fine = probe(20.0);
    CHECK(fine < coarse);
}

TEST_CASE("jc guard scales with the generator") {
    const FullParams p = FullParams::from_frequencies(0.0, 100.0, 10.0);
    const JointDensity j = joint_initial(state("coherent:1,0", 16), {0.0, 0.0});
    CHECK_THROWS_AS(full_jc_evolve(j, p, 0.0, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("dispersive validity ratio") {
    const FullParams a = FullParams::from_frequencies(0.0, 100.0, 1.0);
    CHECK(dispersive_validity(a, 0) == doctest::Approx(100.0));
    const FullParams b = FullParams::from_frequencies(0.0, 10.0, 1.0);
    CHECK(dispersive_validity(b, 3) == doctest::Approx(5.0));
    CHECK(std::abs(dispersive_validity(a, 8) / dispersive_validity(a, 3) -
                   std::sqrt(4.0 / 9.0)) < 1e-14);

    FullParams none = a;
    none.lambda_c = 0.0;
    CHECK_THROWS_WITH_AS(dispersive_validity(none, 0), doctest::Contains("no coupling"),
                         std::invalid_argument);
    CHECK_THROWS_AS(FullParams::from_frequencies(1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("full params derive chi from the coupling and detuning") {
    const FullParams p = FullParams::from_frequencies(2.0, 27.0, 5.0);
    CHECK(p.delta == doctest::Approx(25.0));
    CHECK(std::abs(p.chi - p.lambda_c * p.lambda_c / p.delta) < 1e-12);
}
