#include "qcav/oracle_dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qcav {

namespace {

const Complex kI{0.0, 1.0};

// Dispersive generator, blockwise: the commutator contributes
// -i chi (s_i n - s_j m) to entry (n,m) of block (i,j) and the dissipator
// acts identically on each block.  Entry coefficients are precomputed so a
// right-hand-side evaluation is two elementwise products per block.
struct DispersiveRhs {
    int dim;
    CMatrix c_ee, c_eg, c_ge, c_gg;  // -i chi (s_i n - s_j m) - gamma (n+m)
    CMatrix shift_w;                 // 2 gamma sqrt((n+1)(m+1)) on the shifted block
    bool damped;

    DispersiveRhs(int cutoff, double chi, double gamma) : dim(cutoff + 1) {
        auto coef = [&](double si, double sj) {
            CMatrix c(dim, dim);
            for (int n = 0; n < dim; ++n)
                for (int m = 0; m < dim; ++m)
                    c(n, m) = -kI * chi * (si * n - sj * m) - gamma * double(n + m);
            return c;
        };
        c_ee = coef(1.0, 1.0);
        c_eg = coef(1.0, -1.0);
        c_ge = coef(-1.0, 1.0);
        c_gg = coef(-1.0, -1.0);
        damped = gamma > 0.0;
        if (damped) {
            shift_w.resize(dim - 1, dim - 1);
            for (int n = 0; n + 1 < dim; ++n)
                for (int m = 0; m + 1 < dim; ++m)
                    shift_w(n, m) = 2.0 * gamma * std::sqrt(double((n + 1) * (m + 1)));
        }
    }

    void block(const CMatrix& r, const CMatrix& c, CMatrix& out) const {
        out = c.cwiseProduct(r);
        if (damped && dim > 1)
            out.topLeftCorner(dim - 1, dim - 1) +=
                shift_w.cwiseProduct(r.bottomRightCorner(dim - 1, dim - 1));
    }

    void operator()(const JointDensity& r, JointDensity& out) const {
        block(r.ee, c_ee, out.ee);
        block(r.eg, c_eg, out.eg);
        block(r.ge, c_ge, out.ge);
        block(r.gg, c_gg, out.gg);
    }
};

// Full Jaynes-Cummings generator in the interaction picture at the field
// frequency: H = (delta/2) sigma_z + lambda (a^dag sigma_- + a sigma_+),
// same cavity dissipator.  Ladder products are done as diagonal-scaled
// shifts, never dense matrix products.
struct JcRhs {
    int dim;
    double delta, lambda;
    CVector sq;       // sqrt(k+1)
    CMatrix cdis;     // -gamma (n+m)
    CMatrix shift_w;  // 2 gamma sqrt((n+1)(m+1))
    bool damped;
    mutable CMatrix t1, t2;

    JcRhs(int cutoff, const FullParams& p, double gamma)
        : dim(cutoff + 1), delta(p.delta), lambda(p.lambda_c) {
        sq.resize(dim - 1);
        for (int k = 0; k + 1 < dim; ++k) sq[k] = std::sqrt(double(k + 1));
        cdis.resize(dim, dim);
        for (int n = 0; n < dim; ++n)
            for (int m = 0; m < dim; ++m) cdis(n, m) = -gamma * double(n + m);
        damped = gamma > 0.0;
        if (damped) {
            shift_w.resize(dim - 1, dim - 1);
            for (int n = 0; n + 1 < dim; ++n)
                for (int m = 0; m + 1 < dim; ++m)
                    shift_w(n, m) = 2.0 * gamma * std::sqrt(double((n + 1) * (m + 1)));
        }
        t1.resize(dim, dim);
        t2.resize(dim, dim);
    }

    // t1 = a m ; t2 = m a^dag
    void a_left(const CMatrix& m) const {
        t1.topRows(dim - 1).noalias() = sq.asDiagonal() * m.bottomRows(dim - 1);
        t1.row(dim - 1).setZero();
    }
    void adag_right(const CMatrix& m) const {
        t2.leftCols(dim - 1).noalias() = m.rightCols(dim - 1) * sq.asDiagonal();
        t2.col(dim - 1).setZero();
    }
    // t1 = a^dag m ; t2 = m a
    void adag_left(const CMatrix& m) const {
        t1.bottomRows(dim - 1).noalias() = sq.asDiagonal() * m.topRows(dim - 1);
        t1.row(0).setZero();
    }
    void a_right(const CMatrix& m) const {
        t2.rightCols(dim - 1).noalias() = m.leftCols(dim - 1) * sq.asDiagonal();
        t2.col(0).setZero();
    }

    void dissipate(const CMatrix& r, CMatrix& out) const {
        out += cdis.cwiseProduct(r);
        if (damped && dim > 1)
            out.topLeftCorner(dim - 1, dim - 1) +=
                shift_w.cwiseProduct(r.bottomRightCorner(dim - 1, dim - 1));
    }

    void operator()(const JointDensity& r, JointDensity& out) const {
        // ee: -i lambda (a r_ge - r_eg a^dag)
        a_left(r.ge);
        adag_right(r.eg);
        out.ee = -kI * lambda * (t1 - t2);
        dissipate(r.ee, out.ee);
        // eg: -i [delta r_eg + lambda (a r_gg - r_ee a)]
        a_left(r.gg);
        a_right(r.ee);
        out.eg = -kI * (delta * r.eg + lambda * (t1 - t2));
        dissipate(r.eg, out.eg);
        // ge: -i [-delta r_ge + lambda (a^dag r_ee - r_gg a^dag)]
        adag_left(r.ee);
        adag_right(r.gg);
        out.ge = -kI * (-delta * r.ge + lambda * (t1 - t2));
        dissipate(r.ge, out.ge);
        // gg: -i lambda (a^dag r_eg - r_ge a)
        adag_left(r.eg);
        a_right(r.ge);
        out.gg = -kI * lambda * (t1 - t2);
        dissipate(r.gg, out.gg);
    }
};

JointDensity zeros_like(const JointDensity& r) {
    const int dim = r.cutoff + 1;
    JointDensity z;
    z.cutoff = r.cutoff;
    z.ee = CMatrix::Zero(dim, dim);
    z.eg = CMatrix::Zero(dim, dim);
    z.ge = CMatrix::Zero(dim, dim);
    z.gg = CMatrix::Zero(dim, dim);
    return z;
}

template <typename Rhs>
JointDensity rk4_run(const JointDensity& rho0, double t_end, double dt, const Rhs& rhs) {
    JointDensity y = rho0;
    JointDensity k1 = zeros_like(rho0), k2 = zeros_like(rho0), k3 = zeros_like(rho0),
                 k4 = zeros_like(rho0), mid = zeros_like(rho0);
    const double trace0 = y.trace();

    double t = 0.0;
    while (t_end - t > 1e-15 * std::max(1.0, t_end)) {
        const double h = std::min(dt, t_end - t);
        rhs(y, k1);
        mid.ee = y.ee + (0.5 * h) * k1.ee;
        mid.eg = y.eg + (0.5 * h) * k1.eg;
        mid.ge = y.ge + (0.5 * h) * k1.ge;
        mid.gg = y.gg + (0.5 * h) * k1.gg;
        rhs(mid, k2);
        mid.ee = y.ee + (0.5 * h) * k2.ee;
        mid.eg = y.eg + (0.5 * h) * k2.eg;
        mid.ge = y.ge + (0.5 * h) * k2.ge;
        mid.gg = y.gg + (0.5 * h) * k2.gg;
        rhs(mid, k3);
        mid.ee = y.ee + h * k3.ee;
        mid.eg = y.eg + h * k3.eg;
        mid.ge = y.ge + h * k3.ge;
        mid.gg = y.gg + h * k3.gg;
        rhs(mid, k4);
        const double w = h / 6.0;
        y.ee += w * (k1.ee + 2.0 * k2.ee + 2.0 * k3.ee + k4.ee);
        y.eg += w * (k1.eg + 2.0 * k2.eg + 2.0 * k3.eg + k4.eg);
        y.ge += w * (k1.ge + 2.0 * k2.ge + 2.0 * k3.ge + k4.ge);
        y.gg += w * (k1.gg + 2.0 * k2.gg + 2.0 * k3.gg + k4.gg);
        t += h;
    }

    if (std::abs(y.trace() - trace0) > 1e-8)
        throw std::runtime_error("rk4: trace drift exceeded 1e-8 over the run");
    return y;
}

void require_step(double dt, double max_dt, const char* who) {
    if (!(dt > 0.0)) throw std::invalid_argument(std::string(who) + ": dt must be > 0");
    if (dt > max_dt) {
        std::ostringstream msg;
        msg << who << ": dt " << dt << " violates the stability guard; use dt <= " << max_dt;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

FullParams FullParams::from_frequencies(double omega, double omega_eg, double lambda_c) {
    const double delta = omega_eg - omega;
    if (delta == 0.0) throw std::invalid_argument("FullParams: detuning must be nonzero");
    return FullParams{omega, omega_eg, lambda_c, delta, lambda_c * lambda_c / delta};
}

JointDensity joint_initial(const FockVector& psi_field, Complex alpha) {
    FieldDensity rho_f = displaced_density(psi_field, alpha);
    JointDensity j;
    j.cutoff = psi_field.cutoff;
    j.ee = 0.5 * rho_f.matrix;
    j.eg = j.ee;
    j.ge = j.ee;
    j.gg = j.ee;
    return j;
}

JointDensity lindblad_rhs(const JointDensity& rho, double chi, double gamma) {
    DispersiveRhs rhs(rho.cutoff, chi, gamma);
    JointDensity out = zeros_like(rho);
    rhs(rho, out);
    return out;
}

double rk4_max_dt(double chi, double gamma, int cutoff) {
    const double rate = std::max({chi * (cutoff + 1), gamma * (cutoff + 1), 1.0});
    return 0.01 / rate;
}

JointDensity integrate_rk4(const JointDensity& rho0, double chi, double gamma,
                           double t_end, double dt) {
    if (t_end < 0.0) throw std::invalid_argument("integrate_rk4: t_end must be >= 0");
    require_step(dt, rk4_max_dt(chi, gamma, rho0.cutoff), "integrate_rk4");
    if (t_end == 0.0) return rho0;
    return rk4_run(rho0, t_end, dt, DispersiveRhs(rho0.cutoff, chi, gamma));
}

JointDensity superop_evolve(const JointDensity& rho0, double chi, double gamma, double t) {
    if (t < 0.0) throw std::invalid_argument("superop_evolve: t must be >= 0");
    const int dim = rho0.cutoff + 1;
    const Complex g_plus{gamma, chi};   // gamma + i chi (s = +1)
    const Complex g_minus{gamma, -chi};

    auto evolve_block = [&](const CMatrix& r, Complex gi, Complex gjbar) {
        const Complex s = gi + gjbar;
        const Complex x = s * t;
        // f = (1 - e^{-s t})/s, with the removable singularity at s -> 0
        // (the gamma = 0 limit for the diagonal blocks) taken by series.
        Complex f;
        if (std::abs(x) < 1e-3)
            f = t * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0);
        else
            f = (1.0 - std::exp(-x)) / s;
        const Complex jump = 2.0 * gamma * f;

        CMatrix acc = r;
        bool converged = r.norm() < 1e-14;
        Complex w{1.0, 0.0};  // jump^n / n!
        Eigen::VectorXd fac = Eigen::VectorXd::Ones(dim);  // sqrt((k+n)!/k!)
        for (int n = 1; n < dim; ++n) {
            w *= jump / double(n);
            if (w == Complex{0.0, 0.0}) {
                converged = true;
                break;
            }
            const int sz = dim - n;
            double term_sq = 0.0;
            for (int k = 0; k < sz; ++k) fac[k] *= std::sqrt(double(k + n));
            for (int k = 0; k < sz; ++k) {
                for (int l = 0; l < sz; ++l) {
                    const Complex term = w * fac[k] * fac[l] * r(k + n, l + n);
                    acc(k, l) += term;
                    term_sq += std::norm(term);
                }
            }
            if (std::sqrt(term_sq) < 1e-14) converged = true;
        }
        if (!converged)
            throw std::runtime_error("superop_evolve: jump series did not fall below 1e-14 "
                                     "within the cutoff (state too close to the truncation edge)");

        CVector row(dim), col(dim);
        for (int n = 0; n < dim; ++n) {
            row[n] = std::exp(-gi * t * double(n));
            col[n] = std::exp(-gjbar * t * double(n));
        }
        return CMatrix(row.asDiagonal() * acc * col.asDiagonal());
    };

    JointDensity out;
    out.cutoff = rho0.cutoff;
    out.ee = evolve_block(rho0.ee, g_plus, g_minus);
    out.eg = evolve_block(rho0.eg, g_plus, g_plus);
    out.ge = evolve_block(rho0.ge, g_minus, g_minus);
    out.gg = evolve_block(rho0.gg, g_minus, g_plus);
    return out;
}

double sigma_x_expectation(const JointDensity& rho) {
    return 2.0 * rho.eg.trace().real();
}

double jc_max_dt(const FullParams& params, double gamma, int cutoff) {
    const double rate = std::abs(params.delta) / 2.0 +
                        std::abs(params.lambda_c) * std::sqrt(double(cutoff + 1)) +
                        2.0 * gamma * (cutoff + 1);
    return 0.05 / std::max(rate, 1.0);
}

JointDensity full_jc_evolve(const JointDensity& rho0, const FullParams& params,
                            double gamma, double t_end, double dt) {
    if (t_end < 0.0) throw std::invalid_argument("full_jc_evolve: t_end must be >= 0");
    require_step(dt, jc_max_dt(params, gamma, rho0.cutoff), "full_jc_evolve");
    if (t_end == 0.0) return rho0;
    return rk4_run(rho0, t_end, dt, JcRhs(rho0.cutoff, params, gamma));
}

double dispersive_validity(const FullParams& params, int n_relevant) {
    if (n_relevant < 0) throw std::invalid_argument("dispersive_validity: n must be >= 0");
    if (params.lambda_c == 0.0) throw std::invalid_argument("dispersive_validity: no coupling");
    return std::abs(params.delta) /
           (std::abs(params.lambda_c) * std::sqrt(double(n_relevant + 1)));
}

void check_joint(const JointDensity& rho) {
    if (std::abs(rho.trace() - 1.0) > 1e-8)
        throw std::runtime_error("joint density: trace deviates from 1");
    const double h_ee = (rho.ee - rho.ee.adjoint()).cwiseAbs().maxCoeff();
    const double h_gg = (rho.gg - rho.gg.adjoint()).cwiseAbs().maxCoeff();
    const double h_x = (rho.ge - rho.eg.adjoint()).cwiseAbs().maxCoeff();
    if (h_ee > 1e-10 || h_gg > 1e-10)
        throw std::runtime_error("joint density: diagonal block not Hermitian");
    if (h_x > 1e-10) throw std::runtime_error("joint density: ge != eg^dag");
}

}  // namespace qcav
