#include "qcav/validation.hpp"

#include "qcav/closed_dynamics.hpp"
#include "qcav/fock.hpp"
#include "qcav/oracle_dynamics.hpp"
#include "qcav/quasiprob.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace qcav::validation {

namespace {

const Complex kImag{0.0, 1.0};

struct ConservationStats {
    double max_trace_drift = 0.0;
    double max_herm = 0.0;
    int runs = 0;

    void record(const JointDensity& rho, double trace0) {
        max_trace_drift = std::max(max_trace_drift, std::abs(rho.trace() - trace0));
        max_herm = std::max(max_herm,
                            (rho.ge - rho.eg.adjoint()).cwiseAbs().maxCoeff());
        ++runs;
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(3) << std::scientific << v;
    return os.str();
}

CheckResult make_result(std::string name, double measured, double bound, std::string note = "") {
    CheckResult r;
    r.name = std::move(name);
    r.measured = measured;
    r.bound = bound;
    r.pass = measured <= bound;
    r.note = std::move(note);
    return r;
}

std::vector<StateSpec> test_states() {
    return {StateSpec::parse("vacuum"), StateSpec::parse("coherent:1,0"),
            StateSpec::parse("fock:2"), StateSpec::parse("cat:1.5,0")};
}

const std::vector<Complex>& test_alphas() {
    static const std::vector<Complex> a{{0.0, 0.0}, {0.5, 0.3}};
    return a;
}

const std::vector<double>& test_taus() {
    static const std::vector<double> t{0.1, 0.8, kPi / 2.0, 2.0, 0.75 * kPi};
    return t;
}

std::vector<double> test_etas() { return {0.0, 0.2, critical_eta()}; }

// --- criterion 1: critical ratio ------------------------------------------

CheckResult criterion_critical_ratio() {
    const double eta = critical_eta();
    const double residual = std::abs(eta - std::exp(-1.5 * kPi * eta));
    const double reference = 0.274457;  // six-digit reference value
    const bool digits_ok = std::llround(eta * 1e6) == std::llround(reference * 1e6);
    const bool residual_ok = residual <= 1e-13;

    CheckResult r;
    r.name = "critical-ratio";
    r.measured = residual;
    r.bound = 1e-13;
    r.pass = digits_ok && residual_ok;
    std::ostringstream note;
    note << "eta=" << std::setprecision(16) << eta << "; residual " << fmt(residual)
         << (residual_ok ? " ok" : " FAIL") << "; six-digit reference " << reference
         << (digits_ok ? " matched" : " NOT matched (|diff|=" +
                                          fmt(std::abs(eta - reference)) + ")");
    r.note = note.str();
    return r;
}

// --- criterion 2: extinction at the magic point ----------------------------

CheckResult criterion_magic_point() {
    const double eta = critical_eta();
    const double tau = 0.75 * kPi;
    const double m1 = mu_formula(tau, eta);
    const double m2 = phase_factor(tau, eta).mu;
    return make_result("magic-point-extinction", std::max(m1, m2), 1e-13,
                       "mu_formula " + fmt(m1) + ", |z| " + fmt(m2));
}

// --- criterion 3: decay-factor curves --------------------------------------

CheckResult criterion_mu_curves() {
    const int steps = 3001;
    const double tau_max = 3.0 * kPi;
    const double step = tau_max / (steps - 1);
    const double magic = 0.75 * kPi;

    bool pass = true;
    std::ostringstream note;

    auto flat = mu_curve(0.0, tau_max, steps);
    double flat_dev = 0.0;
    for (const auto& s : flat) flat_dev = std::max(flat_dev, std::abs(s.mu - 1.0));
    if (flat_dev > 1e-12) pass = false;
    note << "eta=0 max|mu-1| " << fmt(flat_dev);

    auto weak = mu_curve(0.025, tau_max, steps);
    double weak_min = 1.0;
    bool local_min_near = false;
    for (int i = 1; i + 1 < steps; ++i) {
        weak_min = std::min(weak_min, weak[i].mu);
        if (weak[i].mu < weak[i - 1].mu && weak[i].mu < weak[i + 1].mu &&
            std::abs(weak[i].tau - magic) <= 0.75)
            local_min_near = true;
    }
    if (!(weak_min > 0.0) || !local_min_near) pass = false;
    note << "; eta=0.025 min " << fmt(weak_min)
         << (local_min_near ? ", local min near 3pi/4" : ", NO local min near 3pi/4");

    auto crit = mu_curve(critical_eta(), tau_max, steps);
    int argmin = 0;
    for (int i = 1; i < steps; ++i)
        if (crit[i].mu < crit[argmin].mu) argmin = i;
    const bool at_magic = std::abs(crit[argmin].tau - magic) <= step + 1e-12;
    const bool deep = crit[argmin].mu <= 1e-9;
    if (!at_magic || !deep) pass = false;
    note << "; eta* global min " << fmt(crit[argmin].mu) << " at tau="
         << std::setprecision(6) << crit[argmin].tau << (at_magic ? "" : " (WRONG spot)");

    CheckResult r;
    r.name = "fig1-mu-curves";
    r.measured = crit[argmin].mu;
    r.bound = 1e-9;
    r.pass = pass;
    r.note = note.str();
    return r;
}

// --- criteria 4, 5, 10 share the oracle sweep ------------------------------

struct OracleSweep {
    double dev_superop = 0.0;
    double dev_rk4 = 0.0;
    double dev_resummation = 0.0;
};

OracleSweep run_oracle_sweep(const Config& cfg, ConservationStats& stats) {
    OracleSweep out;
    auto taus = test_taus();
    for (const auto& spec : test_states()) {
        const FockVector psi = make_state(spec, cfg.cutoff);
        for (const Complex alpha : test_alphas()) {
            const FieldDensity rho_disp = displaced_density(psi, alpha);
            for (const double eta : test_etas()) {
                const JointDensity joint0 = joint_initial(psi, alpha);
                const double trace0 = joint0.trace();
                JointDensity cur = joint0;
                double t_prev = 0.0;
                for (const double tau : taus) {
                    const double closed = sigma_x_closed(rho_disp, tau, eta);
                    const double dsum = sigma_x_double_sum(rho_disp, tau, eta);
                    out.dev_resummation =
                        std::max(out.dev_resummation, std::abs(closed - dsum));

                    const JointDensity super = superop_evolve(joint0, 1.0, eta, tau);
                    out.dev_superop = std::max(
                        out.dev_superop, std::abs(closed - sigma_x_expectation(super)));
                    stats.record(super, trace0);

                    cur = integrate_rk4(cur, 1.0, eta, tau - t_prev, cfg.dt);
                    t_prev = tau;
                    out.dev_rk4 = std::max(
                        out.dev_rk4, std::abs(closed - sigma_x_expectation(cur)));
                    stats.record(cur, trace0);
                }
            }
        }
    }
    return out;
}

// --- criterion 6: Q reconstruction at the magic point -----------------------

CheckResult criterion_q_reconstruction(const Config& cfg) {
    const FockVector psi = make_state(StateSpec::parse("cat:1.5,0"), cfg.cutoff);
    const FieldDensity rho0 = density_from_pure(psi);
    double worst = 0.0;
    for (int i = 0; i < 21; ++i) {
        for (int j = 0; j < 21; ++j) {
            const Complex alpha{-2.0 + 0.2 * i, -2.0 + 0.2 * j};
            const double pi_q = kPi * reconstruct_q_point(psi, alpha);
            worst = std::max(worst, std::abs(pi_q - coherent_overlap(rho0, alpha)));
        }
    }
    return make_result("q-reconstruction-fidelity", worst, 1e-8,
                       "cat:1.5, 21x21 grid on [-2,2]^2, max |pi Q_rec - <a|rho|a>|");
}

// --- criterion 7: lossless limit reproduces the Wigner function -------------

CheckResult criterion_lossless_wigner() {
    const int cutoff = 48;  // keeps the displaced photon tail beyond reach
    const FockVector psi = make_state(StateSpec::parse("cat:1.5,0"), cutoff);
    const FieldDensity rho0 = density_from_pure(psi);
    double worst = 0.0;
    for (int i = 0; i < 21; ++i) {
        for (int j = 0; j < 21; ++j) {
            const Complex alpha{-1.5 + 0.15 * i, -1.5 + 0.15 * j};
            const double measured =
                sigma_x_closed(displaced_density(psi, -alpha), kPi / 2.0, 0.0);
            const double w = wigner_direct(rho0, alpha);
            worst = std::max(worst, std::abs(measured - 0.5 * kPi * w));
        }
    }
    return make_result("lossless-wigner-consistency", worst, 1e-9,
                       "eta=0, tau=pi/2, cat:1.5 at cutoff 48 on [-1.5,1.5]^2");
}

// --- criterion 8: W -> Q Gaussian convolution -------------------------------

CheckResult criterion_convolution(const Config& cfg) {
    GridSpec gs;
    gs.re_min = gs.im_min = -5.0;
    gs.re_max = gs.im_max = 5.0;
    gs.steps_re = gs.steps_im = 201;  // spacing 0.05
    // probe points with |a| <= 1 so the grid covers a disk of radius |a|+3
    const std::vector<Complex> points{{0.0, 0.0}, {0.5, 0.3}, {-0.6, 0.8},
                                      {0.9, 0.0}, {-0.3, -0.9}};
    double worst = 0.0;
    for (const char* name : {"vacuum", "cat:1.5,0"}) {
        const FieldDensity rho =
            density_from_pure(make_state(StateSpec::parse(name), cfg.cutoff));
        const PhaseGrid w =
            sample_grid([&](Complex a) { return wigner_direct(rho, a); }, gs);
        for (const Complex a : points) {
            const double qc = q_from_wigner_convolution(w, a);
            worst = std::max(worst, std::abs(qc - q_direct(rho, a)));
        }
    }
    return make_result("wigner-q-convolution", worst, 2e-3,
                       "vacuum and cat:1.5 on [-5,5]^2 at spacing 0.05");
}

// --- criterion 9: dispersive-limit probe ------------------------------------

double jc_probe_deviation(double ratio, ConservationStats& stats) {
    const int cutoff = 16;
    const FockVector psi = make_state(StateSpec::parse("coherent:1,0"), cutoff);
    const FieldDensity rho_disp = density_from_pure(psi);
    // lambda = ratio and delta = ratio^2 keep chi = 1, so tau = t.
    const FullParams params = FullParams::from_frequencies(0.0, ratio * ratio, ratio);
    const double dt = 0.999 * jc_max_dt(params, 0.0, cutoff);

    JointDensity cur = joint_initial(psi, Complex{0.0, 0.0});
    const double trace0 = cur.trace();
    const int samples = 120;
    const double t_end = 0.75 * kPi;
    double worst = 0.0;
    double t_prev = 0.0;
    for (int k = 1; k <= samples; ++k) {
        const double t = t_end * k / samples;
        cur = full_jc_evolve(cur, params, 0.0, t - t_prev, dt);
        t_prev = t;
        // The dispersive model lives in the frame rotating at delta + chi
        // (detuning plus the vacuum light shift of the dressed levels).
        const Complex frame = std::exp(kImag * ((params.delta + params.chi) * t));
        const double jc_sx = 2.0 * (frame * cur.eg.trace()).real();
        const double disp_sx = sigma_x_closed(rho_disp, params.chi * t, 0.0);
        worst = std::max(worst, std::abs(jc_sx - disp_sx));
    }
    stats.record(cur, trace0);
    return worst;
}

CheckResult criterion_dispersive_probe(ConservationStats& stats) {
    const double dev10 = jc_probe_deviation(10.0, stats);
    const double dev50 = jc_probe_deviation(50.0, stats);
    CheckResult r;
    r.name = "dispersive-limit-probe";
    r.measured = dev50;
    r.bound = dev10;
    r.pass = dev50 < dev10;
    r.note = "max <sigma_x> deviation: delta/lambda=50 gives " + fmt(dev50) +
             ", delta/lambda=10 gives " + fmt(dev10) + " (must be strictly smaller)";
    return r;
}

}  // namespace

std::vector<CheckResult> acceptance_checks(const Config& cfg) {
    if (cfg.cutoff < 8) throw std::invalid_argument("validation: cutoff must be >= 8");
    const double guard = rk4_max_dt(1.0, 1.0, cfg.cutoff);
    if (!(cfg.dt > 0.0) || cfg.dt > guard) {
        std::ostringstream msg;
        msg << "validation: dt " << cfg.dt << " violates the stability guard; use dt <= "
            << guard;
        throw std::invalid_argument(msg.str());
    }

    std::vector<CheckResult> out;
    ConservationStats stats;

    out.push_back(criterion_critical_ratio());
    out.push_back(criterion_magic_point());
    out.push_back(criterion_mu_curves());

    const OracleSweep sweep = run_oracle_sweep(cfg, stats);
    {
        CheckResult r = make_result("oracle-triangle", sweep.dev_superop, 1e-9,
                                    "closed vs superop; closed vs rk4 " +
                                        fmt(sweep.dev_rk4) + " (bound 1e-6)");
        r.pass = r.pass && sweep.dev_rk4 <= 1e-6;
        out.push_back(r);
    }
    out.push_back(make_result("resummation-identity", sweep.dev_resummation, 1e-10,
                              "double sum vs closed form over the full matrix"));
    out.push_back(criterion_q_reconstruction(cfg));
    out.push_back(criterion_lossless_wigner());
    out.push_back(criterion_convolution(cfg));
    out.push_back(criterion_dispersive_probe(stats));

    {
        CheckResult r = make_result("conservation-suite", stats.max_trace_drift, 1e-8,
                                    "hermiticity drift " + fmt(stats.max_herm) +
                                        " (bound 1e-9) over " +
                                        std::to_string(stats.runs) + " integrator states");
        r.pass = r.pass && stats.max_herm <= 1e-9;
        out.push_back(r);
    }
    return out;
}

std::vector<CheckResult> consistency_checks(const Config& cfg) {
    std::vector<CheckResult> out;

    {  // closed form at eta=0 against the lossless series
        double worst = 0.0;
        for (const auto& spec : test_states()) {
            const FockVector psi = make_state(spec, cfg.cutoff);
            for (const Complex alpha : test_alphas()) {
                const FieldDensity rho = displaced_density(psi, alpha);
                for (const double tau : test_taus())
                    worst = std::max(worst, std::abs(sigma_x_closed(rho, tau, 0.0) -
                                                     sigma_x_lossless(psi, alpha, tau)));
            }
        }
        out.push_back(make_result("eta0-reduction", worst, 1e-12,
                                  "closed form at eta=0 vs lossless series"));
    }

    {  // mu / theta formulas against complex arithmetic on a lattice
        double worst_mu = 0.0, worst_theta = 0.0;
        for (int i = 0; i < 100; ++i) {
            for (int j = 0; j < 100; ++j) {
                const double tau = 3.0 * kPi * i / 99.0;
                const double eta = 1.0 * j / 99.0;
                const PhaseFactor p = phase_factor(tau, eta);
                worst_mu = std::max(worst_mu, std::abs(mu_formula(tau, eta) - p.mu));
                if (p.mu > 1e-12) {
                    double d = std::abs(theta_formula(tau, eta) - p.theta);
                    d = std::min(d, std::abs(d - 2.0 * kPi));
                    worst_theta = std::max(worst_theta, d);
                }
            }
        }
        out.push_back(make_result("mu-vs-phase-factor", worst_mu, 1e-12,
                                  "literal mu formula vs |z| on a 100x100 lattice"));
        out.push_back(make_result("theta-vs-arg", worst_theta, 1e-12,
                                  "literal theta formula vs arg z where mu > 1e-12"));
    }

    {  // displacement unitarity and the two independent evaluation routes.
       // Unitarity amplitudes stay below ~0.8: past that the crop itself
       // loses more than 1e-9 of the top displaced columns at N = 32.
        const int dim = cfg.cutoff + 1;
        const int half = cfg.cutoff / 2 + 1;
        double worst_unit = 0.0, worst_route = 0.0;
        for (const Complex a : {Complex{0.3, 0.0}, Complex{0.7, 0.2}, Complex{0.0, 0.8}}) {
            const CMatrix d = displacement_matrix(a, cfg.cutoff);
            worst_unit = std::max(worst_unit,
                                  ((d.adjoint() * d).topLeftCorner(half, half) -
                                   CMatrix::Identity(half, half))
                                      .cwiseAbs()
                                      .maxCoeff());
        }
        for (const Complex a : {Complex{0.7, 0.2}, Complex{-1.8, 1.1}, Complex{2.5, 0.0}}) {
            const CMatrix d = displacement_matrix(a, cfg.cutoff);
            const CMatrix b = displaced_fock_block(a, dim, dim);
            worst_route = std::max(worst_route, (d.topLeftCorner(half, half) -
                                                 b.topLeftCorner(half, half))
                                                    .cwiseAbs()
                                                    .maxCoeff());
        }
        out.push_back(make_result("displacement-unitarity", worst_unit, 1e-9,
                                  "D^dag D vs identity on the inner half block"));
        out.push_back(make_result("displacement-routes", worst_route, 4e-12,
                                  "padded exponential vs exact recurrence, inner half"));
    }

    {  // quasiprobability normalization and sign structure
        double worst_norm_q = 0.0, worst_norm_w = 0.0, min_q = 1.0, min_w_cat = 1.0;
        for (const char* name : {"vacuum", "fock:2", "cat:1.5,0"}) {
            const FieldDensity rho =
                density_from_pure(make_state(StateSpec::parse(name), cfg.cutoff));
            GridSpec gs;
            const double reach = (std::string(name) == "cat:1.5,0") ? 4.5 : 4.0;
            gs.re_min = gs.im_min = -reach;
            gs.re_max = gs.im_max = reach;
            gs.steps_re = gs.steps_im = static_cast<int>(std::lround(2 * reach / 0.1)) + 1;
            const PhaseGrid q = sample_grid([&](Complex a) { return q_direct(rho, a); }, gs);
            const PhaseGrid w =
                sample_grid([&](Complex a) { return wigner_direct(rho, a); }, gs);
            worst_norm_q = std::max(worst_norm_q, std::abs(grid_integral(q) - 1.0));
            worst_norm_w = std::max(worst_norm_w, std::abs(grid_integral(w) - 1.0));
            min_q = std::min(min_q, q.values.minCoeff());
            if (std::string(name) == "cat:1.5,0") min_w_cat = w.values.minCoeff();
        }
        out.push_back(make_result("q-normalization", worst_norm_q, 5e-3,
                                  "trapezoid integral of Q vs 1"));
        out.push_back(make_result("w-normalization", worst_norm_w, 5e-3,
                                  "trapezoid integral of W vs 1"));
        out.push_back(make_result("q-nonnegative", std::max(-min_q, 0.0), 1e-10,
                                  "Q floor across states, min " + fmt(min_q)));
        CheckResult neg;
        neg.name = "wigner-cat-negativity";
        neg.measured = min_w_cat;
        neg.bound = 0.0;
        neg.pass = min_w_cat < 0.0;
        neg.note = "min W of cat:1.5 must be strictly negative";
        out.push_back(neg);
    }

    {  // block decoupling and photon-mean constancy of the dispersive generator
        const FockVector psi = make_state(StateSpec::parse("coherent:1,0"), cfg.cutoff);
        JointDensity j = joint_initial(psi, Complex{0.0, 0.0});
        j.eg.setZero();
        j.ge.setZero();
        const JointDensity evolved = integrate_rk4(j, 1.0, 0.3, 0.5, cfg.dt);
        const double leak = std::max(evolved.eg.cwiseAbs().maxCoeff(),
                                     evolved.ge.cwiseAbs().maxCoeff());
        out.push_back(make_result("block-decoupling", leak, 1e-12,
                                  "eg/ge stay zero under the dispersive generator"));

        const JointDensity j2 = joint_initial(psi, Complex{0.5, 0.3});
        auto photon_mean = [](const JointDensity& r) {
            double m = 0.0;
            for (int n = 0; n <= r.cutoff; ++n)
                m += n * (r.ee(n, n) + r.gg(n, n)).real();
            return m;
        };
        const JointDensity j2t = integrate_rk4(j2, 1.0, 0.0, 0.7, cfg.dt);
        out.push_back(make_result("photon-mean-constancy",
                                  std::abs(photon_mean(j2t) - photon_mean(j2)), 1e-10,
                                  "gamma=0 dispersive evolution conserves a^dag a"));
    }

    return out;
}

std::string format_line(const CheckResult& r) {
    std::ostringstream os;
    os << (r.pass ? "[PASS] " : "[FAIL] ") << std::left << std::setw(28) << r.name
       << " measured=" << fmt(r.measured) << " bound=" << fmt(r.bound);
    if (!r.note.empty()) os << "  (" << r.note << ")";
    return os.str();
}

}  // namespace qcav::validation
