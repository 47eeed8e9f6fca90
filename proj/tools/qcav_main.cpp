#include "qcav/closed_dynamics.hpp"
#include "qcav/fock.hpp"
#include "qcav/oracle_dynamics.hpp"
#include "qcav/quasiprob.hpp"
#include "qcav/validation.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using qcav::Complex;
using qcav::kPi;

// Shortest decimal form that round-trips; keeps CSV output byte-deterministic.
std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Complex parse_alpha(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--alpha", "expected <re>,<im>");
    try {
        size_t p = 0;
        double re = std::stod(text.substr(0, comma), &p);
        double im = std::stod(text.substr(comma + 1), &p);
        return {re, im};
    } catch (const std::exception&) {
        throw CLI::ValidationError("--alpha", "bad number in '" + text + "'");
    }
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        os << content;
        if (!os) throw std::runtime_error("write failed for '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("cannot move output into place at '" + path + "'");
}

void warn_if_truncation_risk(Complex alpha, int cutoff) {
    if (qcav::truncation_risk(alpha, cutoff))
        std::cerr << "warning: truncation risk: displacement |alpha|^2 = "
                  << std::norm(alpha) << " exceeds cutoff/4 = " << cutoff / 4.0 << "\n";
}

int run_root() {
    const double eta = qcav::critical_eta();
    const double residual = std::abs(eta - std::exp(-1.5 * kPi * eta));
    std::printf("eta_critical %.12f\n", eta);
    std::printf("residual %s\n", fmt_double(residual).c_str());
    return 0;
}

int run_mu_curve(double eta, double tau_max, int steps, const std::string& out) {
    std::string csv = "tau,mu,theta\n";
    for (const auto& s : qcav::mu_curve(eta, tau_max, steps)) {
        csv += fmt_double(s.tau);
        csv += ',';
        csv += fmt_double(s.mu);
        csv += ',';
        csv += fmt_double(s.theta);
        csv += '\n';
    }
    write_file_atomic(out, csv);
    return 0;
}

int run_sigmax(const std::string& state, Complex alpha, double tau, double eta,
               const std::string& method, int cutoff, std::optional<double> dt) {
    const bool wants_oracle = method == "lindblad" || method == "superop" || method == "all";
    if ((method == "lindblad" || method == "all") && !dt) {
        std::cerr << "error: --dt is required for method '" << method << "'\n";
        return 2;
    }
    warn_if_truncation_risk(alpha, cutoff);

    const qcav::FockVector psi = qcav::make_state(qcav::StateSpec::parse(state), cutoff);
    std::vector<std::pair<std::string, double>> rows;

    if (method == "closed" || method == "all") {
        const qcav::FieldDensity rho = qcav::displaced_density(psi, alpha);
        rows.emplace_back("closed", qcav::sigma_x_closed(rho, tau, eta));
    }
    if (wants_oracle) {
        const qcav::JointDensity joint = qcav::joint_initial(psi, alpha);
        if (method == "superop" || method == "all")
            rows.emplace_back("superop", qcav::sigma_x_expectation(
                                             qcav::superop_evolve(joint, 1.0, eta, tau)));
        if (method == "lindblad" || method == "all")
            rows.emplace_back("lindblad", qcav::sigma_x_expectation(qcav::integrate_rk4(
                                              joint, 1.0, eta, tau, *dt)));
    }

    for (const auto& [name, value] : rows)
        std::printf("%s %s\n", name.c_str(), fmt_double(value).c_str());
    if (method == "all") {
        double dev = 0.0;
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = i + 1; j < rows.size(); ++j)
                dev = std::max(dev, std::abs(rows[i].second - rows[j].second));
        std::printf("max_pairwise_deviation %s\n", fmt_double(dev).c_str());
    }
    return 0;
}

int run_qmap(const std::string& state, const std::string& grid_re, const std::string& grid_im,
             int cutoff, const std::string& method, const std::string& out_csv,
             const std::string& out_pgm, std::optional<double> eta_ov,
             std::optional<double> tau_ov) {
    const qcav::GridSpec gs = qcav::GridSpec::parse(grid_re, grid_im);
    const qcav::FockVector psi = qcav::make_state(qcav::StateSpec::parse(state), cutoff);
    const qcav::FieldDensity rho0 = qcav::density_from_pure(psi);

    const double corner = std::max({std::hypot(gs.re_min, gs.im_min),
                                    std::hypot(gs.re_min, gs.im_max),
                                    std::hypot(gs.re_max, gs.im_min),
                                    std::hypot(gs.re_max, gs.im_max)});
    warn_if_truncation_risk(Complex{corner, 0.0}, cutoff);

    const bool with_rec = method == "reconstructed" || method == "both";
    const bool with_dir = method == "direct" || method == "both";
    const double tau = tau_ov.value_or(0.75 * kPi);
    const double eta = eta_ov.value_or(qcav::critical_eta());

    std::string csv = "alpha_re,alpha_im";
    if (with_rec) csv += ",q_reconstructed";
    if (with_dir) csv += ",q_direct";
    if (with_rec && with_dir) csv += ",abs_error";
    csv += '\n';

    Eigen::MatrixXd heat(gs.steps_re, gs.steps_im);
    for (int j = gs.steps_im - 1; j >= 0; --j) {  // top row of the map first
        for (int i = 0; i < gs.steps_re; ++i) {
            const Complex a = gs.point(i, j);
            double rec = 0.0, dir = 0.0;
            if (with_rec) rec = qcav::reconstruct_q_point(psi, a, tau, eta);
            if (with_dir) dir = qcav::q_direct(rho0, a);
            heat(i, j) = with_rec ? rec : dir;
            csv += fmt_double(a.real());
            csv += ',';
            csv += fmt_double(a.imag());
            if (with_rec) {
                csv += ',';
                csv += fmt_double(rec);
            }
            if (with_dir) {
                csv += ',';
                csv += fmt_double(dir);
            }
            if (with_rec && with_dir) {
                csv += ',';
                csv += fmt_double(std::abs(rec - dir));
            }
            csv += '\n';
        }
    }
    write_file_atomic(out_csv, csv);

    if (!out_pgm.empty()) {
        const double vmax = std::max(heat.maxCoeff(), 0.0);
        std::string pgm = "P2\n" + std::to_string(gs.steps_re) + " " +
                          std::to_string(gs.steps_im) + "\n255\n";
        for (int j = gs.steps_im - 1; j >= 0; --j) {
            for (int i = 0; i < gs.steps_re; ++i) {
                const double v = std::max(heat(i, j), 0.0);
                const int pixel =
                    vmax > 0.0 ? static_cast<int>(std::lround(255.0 * v / vmax)) : 0;
                pgm += std::to_string(pixel);
                pgm += (i + 1 < gs.steps_re) ? ' ' : '\n';
            }
        }
        write_file_atomic(out_pgm, pgm);
    }
    return 0;
}

int run_validate(int cutoff, double dt) {
    qcav::validation::Config cfg;
    cfg.cutoff = cutoff;
    cfg.dt = dt;
    std::vector<qcav::validation::CheckResult> results;
    // Precondition violations (bad dt/cutoff) throw before any check runs.
    results = qcav::validation::acceptance_checks(cfg);
    auto extra = qcav::validation::consistency_checks(cfg);
    results.insert(results.end(), extra.begin(), extra.end());

    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("%s\n", qcav::validation::format_line(r).c_str());
        all_pass = all_pass && r.pass;
    }
    std::printf("%s (%zu checks)\n", all_pass ? "ALL PASS" : "FAILURES PRESENT",
                results.size());
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qcav: dispersive cavity QED with direct Q-function readout"};
    app.require_subcommand(1);

    auto* root = app.add_subcommand("root", "print the critical damping ratio eta*");

    auto* mu = app.add_subcommand("mu-curve", "sample the decay factor mu(tau) to CSV");
    double mu_eta = 0.0, mu_tau_max = 3.0 * kPi;
    int mu_steps = 3001;
    std::string mu_out;
    mu->add_option("--eta", mu_eta, "damping ratio gamma/chi")
        ->required()
        ->check(CLI::NonNegativeNumber);
    mu->add_option("--tau-max", mu_tau_max, "range end (tau = chi t)")
        ->check(CLI::PositiveNumber);
    mu->add_option("--steps", mu_steps, "sample count")->check(CLI::Range(2, 10000000));
    mu->add_option("--out", mu_out, "output CSV path")->required();

    auto* sx = app.add_subcommand("sigmax", "atomic dipole <sigma_x> at one working point");
    std::string sx_state, sx_alpha = "0,0", sx_method = "all";
    double sx_tau = 0.0, sx_eta = 0.0;
    int sx_cutoff = 32;
    std::optional<double> sx_dt;
    sx->add_option("--state", sx_state, "field state spec")->required();
    sx->add_option("--alpha", sx_alpha, "displacement <re>,<im>");
    sx->add_option("--tau", sx_tau, "dimensionless time chi t")
        ->required()
        ->check(CLI::NonNegativeNumber);
    sx->add_option("--eta", sx_eta, "damping ratio gamma/chi")
        ->required()
        ->check(CLI::NonNegativeNumber);
    sx->add_option("--method", sx_method, "closed | superop | lindblad | all")
        ->check(CLI::IsMember({"closed", "superop", "lindblad", "all"}));
    sx->add_option("--cutoff", sx_cutoff, "Fock cutoff")->check(CLI::Range(8, 4096));
    sx->add_option("--dt", sx_dt, "RK4 step (chi = 1 units)")->check(CLI::PositiveNumber);

    auto* qm = app.add_subcommand("qmap", "Q function over a phase-space grid");
    std::string qm_state, qm_grid, qm_grid_im, qm_method = "both", qm_out, qm_pgm;
    int qm_cutoff = 32;
    std::optional<double> qm_eta_ov, qm_tau_ov;
    qm->add_option("--state", qm_state, "field state spec")->required();
    qm->add_option("--grid", qm_grid, "grid spec <min>:<max>:<steps>")->required();
    qm->add_option("--grid-im", qm_grid_im, "independent imaginary-axis grid spec");
    qm->add_option("--cutoff", qm_cutoff, "Fock cutoff")->check(CLI::Range(8, 4096));
    qm->add_option("--method", qm_method, "reconstructed | direct | both")
        ->check(CLI::IsMember({"reconstructed", "direct", "both"}));
    qm->add_option("--out", qm_out, "output CSV path")->required();
    qm->add_option("--heatmap", qm_pgm, "optional PGM heatmap path");
    qm->add_option("--eta-override", qm_eta_ov,
                   "measurement eta (default: the critical ratio)")
        ->check(CLI::NonNegativeNumber);
    qm->add_option("--tau-override", qm_tau_ov, "measurement tau (default: 3 pi/4)")
        ->check(CLI::NonNegativeNumber);

    auto* va = app.add_subcommand("validate", "run the full cross-check suite");
    int va_cutoff = 32;
    double va_dt = 1e-4;
    va->add_option("--cutoff", va_cutoff, "Fock cutoff")->check(CLI::Range(8, 4096));
    va->add_option("--dt", va_dt, "RK4 step (chi = 1 units)")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (root->parsed()) return run_root();
        if (mu->parsed()) return run_mu_curve(mu_eta, mu_tau_max, mu_steps, mu_out);
        if (sx->parsed())
            return run_sigmax(sx_state, parse_alpha(sx_alpha), sx_tau, sx_eta, sx_method,
                              sx_cutoff, sx_dt);
        if (qm->parsed())
            return run_qmap(qm_state, qm_grid, qm_grid_im, qm_cutoff, qm_method, qm_out,
                            qm_pgm, qm_eta_ov, qm_tau_ov);
        if (va->parsed()) return run_validate(va_cutoff, va_dt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
