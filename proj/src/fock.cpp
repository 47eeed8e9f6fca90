#include "qcav/fock.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qcav {

namespace {

const Complex kI{0.0, 1.0};

double parse_real(const std::string& text, const std::string& what) {
    try {
        size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(v)) throw std::invalid_argument("not finite");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("state spec: bad number '" + text + "' in " + what);
    }
}

Complex parse_pair(const std::string& text, const std::string& what) {
    auto comma = text.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("state spec: expected <re>,<im> in " + what);
    return {parse_real(text.substr(0, comma), what),
            parse_real(text.substr(comma + 1), what)};
}

// Upper tail sum_{n > cutoff} p_n of the Poisson weights p_n = e^{-x} x^n / n!.
// Summed forward from n = cutoff+1 with the multiplicative recurrence, so no
// cancellation against 1.
double poisson_tail(double x, int cutoff, bool even_only) {
    if (x == 0.0) return 0.0;
    double p = std::exp(-x);
    for (int n = 1; n <= cutoff + 1; ++n) p *= x / n;
    double tail = 0.0;
    int n = cutoff + 1;
    while (true) {
        if (!even_only || n % 2 == 0) tail += p;
        ++n;
        p *= x / n;
        if (n > cutoff + 2 && p < 1e-30 && n > static_cast<int>(x)) break;
        if (n > cutoff + 2000) break;
    }
    return tail;
}

}  // namespace

StateSpec StateSpec::parse(const std::string& text) {
    StateSpec spec;
    if (text == "vacuum") {
        spec.kind = Kind::Vacuum;
        return spec;
    }
    auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "fock") {
        spec.kind = Kind::Fock;
        double n = parse_real(rest, "fock:<n>");
        if (n < 0 || n != std::floor(n))
            throw std::invalid_argument("state spec: fock:<n> needs a nonnegative integer");
        spec.fock_n = static_cast<int>(n);
        return spec;
    }
    if (head == "coherent") {
        spec.kind = Kind::Coherent;
        spec.amplitude = parse_pair(rest, "coherent:<re>,<im>");
        return spec;
    }
    if (head == "cat") {
        spec.kind = Kind::Cat;
        spec.amplitude = parse_pair(rest, "cat:<re>,<im>");
        if (spec.amplitude == Complex{0.0, 0.0})
            throw std::invalid_argument("state spec: cat:0 is degenerate (collapses to vacuum)");
        return spec;
    }
    throw std::invalid_argument("state spec: unknown kind '" + text +
                                "' (want vacuum | fock:<n> | coherent:<re>,<im> | cat:<re>,<im>)");
}

bool truncation_risk(Complex alpha, int cutoff) {
    return std::norm(alpha) > cutoff / 4.0;
}

int displacement_pad(int cutoff) { return 2 * cutoff + 16; }

CMatrix annihilation_matrix(int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("annihilation_matrix: cutoff must be >= 0");
    const int dim = cutoff + 1;
    CMatrix a = CMatrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

CMatrix displacement_matrix(Complex alpha, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("displacement_matrix: cutoff must be >= 0");
    const int dim = cutoff + 1;
    if (alpha == Complex{0.0, 0.0}) return CMatrix::Identity(dim, dim);

    // The generator alpha a^dag - alpha^* a is anti-Hermitian; pulling the
    // phase of alpha into a diagonal similarity leaves i times a real
    // symmetric tridiagonal matrix T with off-diagonal |alpha| sqrt(n+1).
    const int pad = displacement_pad(cutoff);
    const double r = std::abs(alpha);
    const double psi = std::arg(alpha) - kPi / 2.0;

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(pad);
    Eigen::VectorXd sub(pad - 1);
    for (int n = 0; n < pad - 1; ++n) sub[n] = r * std::sqrt(double(n + 1));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& v = es.eigenvectors();

    CVector phase(pad);
    for (int k = 0; k < pad; ++k) phase[k] = std::exp(kI * es.eigenvalues()[k]);

    // Only the top-left block of exp(iT) is needed after the crop.
    Eigen::MatrixXd vtop = v.topRows(dim);
    CMatrix core = (vtop.cast<Complex>() * phase.asDiagonal()) *
                   vtop.transpose().cast<Complex>();

    CMatrix out(dim, dim);
    for (int n = 0; n < dim; ++n)
        for (int m = 0; m < dim; ++m)
            out(n, m) = std::exp(kI * (psi * double(n - m))) * core(n, m);
    return out;
}

CMatrix displaced_fock_block(Complex alpha, int rows, int cols) {
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("displaced_fock_block: empty block");
    CMatrix b(rows, cols);
    b(0, 0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < rows; ++n) b(n, 0) = b(n - 1, 0) * alpha / std::sqrt(double(n));
    const Complex ac = std::conj(alpha);
    for (int m = 0; m + 1 < cols; ++m) {
        const double inv = 1.0 / std::sqrt(double(m + 1));
        b(0, m + 1) = -ac * b(0, m) * inv;
        for (int n = 1; n < rows; ++n)
            b(n, m + 1) = (std::sqrt(double(n)) * b(n - 1, m) - ac * b(n, m)) * inv;
    }
    return b;
}

FockVector make_state(const StateSpec& spec, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("make_state: cutoff must be >= 0");
    const int dim = cutoff + 1;
    FockVector psi;
    psi.cutoff = cutoff;
    psi.amps = CVector::Zero(dim);

    switch (spec.kind) {
        case StateSpec::Kind::Vacuum:
            psi.amps[0] = 1.0;
            return psi;
        case StateSpec::Kind::Fock:
            if (spec.fock_n > cutoff)
                throw std::invalid_argument("make_state: fock:" + std::to_string(spec.fock_n) +
                                            " exceeds cutoff " + std::to_string(cutoff));
            psi.amps[spec.fock_n] = 1.0;
            return psi;
        case StateSpec::Kind::Coherent: {
            const Complex b = spec.amplitude;
            const double x = std::norm(b);
            double tail = poisson_tail(x, cutoff, false);
            if (tail >= 1e-12) {
                std::ostringstream msg;
                msg << "make_state: cutoff too small (coherent tail " << tail << " >= 1e-12)";
                throw std::invalid_argument(msg.str());
            }
            psi.amps[0] = std::exp(-0.5 * x);
            for (int n = 1; n < dim; ++n) psi.amps[n] = psi.amps[n - 1] * b / std::sqrt(double(n));
            return psi;
        }
        case StateSpec::Kind::Cat: {
            const Complex b = spec.amplitude;
            const double x = std::norm(b);
            const double ncat = 1.0 / std::sqrt(2.0 * (1.0 + std::exp(-2.0 * x)));
            double tail = 4.0 * ncat * ncat * poisson_tail(x, cutoff, true);
            if (tail >= 1e-12) {
                std::ostringstream msg;
                msg << "make_state: cutoff too small (cat tail " << tail << " >= 1e-12)";
                throw std::invalid_argument(msg.str());
            }
            Complex coh = std::exp(-0.5 * x);  // e^{-|b|^2/2} b^n / sqrt(n!)
            psi.amps[0] = 2.0 * ncat * coh;
            for (int n = 1; n < dim; ++n) {
                coh *= b / std::sqrt(double(n));
                psi.amps[n] = (n % 2 == 0) ? 2.0 * ncat * coh : Complex{0.0, 0.0};
            }
            return psi;
        }
    }
    throw std::logic_error("make_state: unreachable");
}

FieldDensity density_from_pure(const FockVector& psi) {
    return FieldDensity{psi.amps * psi.amps.adjoint(), psi.cutoff};
}

FieldDensity displaced_density(const FockVector& psi, Complex alpha) {
    if (alpha == Complex{0.0, 0.0}) return density_from_pure(psi);
    CVector v = displacement_matrix(alpha, psi.cutoff) * psi.amps;
    return FieldDensity{v * v.adjoint(), psi.cutoff};
}

std::vector<double> photon_distribution(const FieldDensity& rho) {
    const int dim = rho.cutoff + 1;
    std::vector<double> p(dim);
    for (int m = 0; m < dim; ++m) p[m] = rho.matrix(m, m).real();
    return p;
}

double coherent_overlap(const FieldDensity& rho, Complex alpha) {
    const int dim = rho.cutoff + 1;
    CVector v(dim);
    v[0] = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < dim; ++n) v[n] = v[n - 1] * alpha / std::sqrt(double(n));
    const Complex q = v.adjoint() * rho.matrix * v;
    if (q.real() < -1e-10)
        throw std::runtime_error("coherent_overlap: quadratic form negative beyond floor");
    return std::max(q.real(), 0.0);
}

void check_density(const FieldDensity& rho) {
    const int dim = rho.cutoff + 1;
    if (rho.matrix.rows() != dim || rho.matrix.cols() != dim)
        throw std::runtime_error("density: shape does not match cutoff");
    double herm = (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10) throw std::runtime_error("density: not Hermitian");
    if (std::abs(rho.matrix.trace().real() - 1.0) > 1e-8)
        throw std::runtime_error("density: trace deviates from 1");
    for (int n = 0; n < dim; ++n)
        if (rho.matrix(n, n).real() < -1e-10)
            throw std::runtime_error("density: negative diagonal entry");
}

}  // namespace qcav
