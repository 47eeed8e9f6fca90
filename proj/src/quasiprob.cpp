#include "qcav/quasiprob.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qcav {

GridSpec GridSpec::parse(const std::string& re_part, const std::string& im_part) {
    auto parse_axis = [](const std::string& text, double& lo, double& hi, int& steps) {
        auto c1 = text.find(':');
        auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::invalid_argument("grid spec: want <min>:<max>:<steps>, got '" + text + "'");
        try {
            size_t p = 0;
            lo = std::stod(text.substr(0, c1), &p);
            hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1), &p);
            steps = std::stoi(text.substr(c2 + 1), &p);
        } catch (const std::exception&) {
            throw std::invalid_argument("grid spec: bad number in '" + text + "'");
        }
        if (steps < 2) throw std::invalid_argument("grid spec: steps must be >= 2");
        if (!(hi > lo)) throw std::invalid_argument("grid spec: max must exceed min");
    };
    GridSpec g;
    parse_axis(re_part, g.re_min, g.re_max, g.steps_re);
    if (im_part.empty()) {
        g.im_min = g.re_min;
        g.im_max = g.re_max;
        g.steps_im = g.steps_re;
    } else {
        parse_axis(im_part, g.im_min, g.im_max, g.steps_im);
    }
    return g;
}

double q_direct(const FieldDensity& rho, Complex alpha) {
    return coherent_overlap(rho, alpha) / kPi;
}

double wigner_direct(const FieldDensity& rho, Complex alpha) {
    const int dim = rho.cutoff + 1;
    // Tr[rho D(a) P D^dag(a)] = Tr[rho D(2a) P]; rho is supported on the
    // truncated space, so the (N+1)^2 block of D(2a) contracts it exactly.
    CMatrix b = displaced_fock_block(2.0 * alpha, dim, dim);
    Complex acc{0.0, 0.0};
    for (int m = 0; m < dim; ++m) {
        const double par = (m % 2 == 0) ? 1.0 : -1.0;
        for (int n = 0; n < dim; ++n) acc += par * rho.matrix(m, n) * b(n, m);
    }
    return (2.0 / kPi) * acc.real();
}

double q_from_wigner_convolution(const PhaseGrid& w, Complex alpha) {
    const GridSpec& s = w.spec;
    const double radius = std::abs(alpha) + 3.0;
    const bool covered = alpha.real() - radius >= s.re_min - 1e-9 &&
                         alpha.real() + radius <= s.re_max + 1e-9 &&
                         alpha.imag() - radius >= s.im_min - 1e-9 &&
                         alpha.imag() + radius <= s.im_max + 1e-9;
    if (!covered) throw std::invalid_argument("convolution domain too small");
    if (s.dre() > 0.1 + 1e-12 || s.dim() > 0.1 + 1e-12)
        throw std::invalid_argument("convolution grid spacing too coarse (> 0.1)");

    double acc = 0.0;
    for (int i = 0; i < s.steps_re; ++i) {
        const double wi = (i == 0 || i == s.steps_re - 1) ? 0.5 : 1.0;
        for (int j = 0; j < s.steps_im; ++j) {
            const double wj = (j == 0 || j == s.steps_im - 1) ? 0.5 : 1.0;
            const Complex beta = s.point(i, j);
            acc += wi * wj * w.values(i, j) * std::exp(-2.0 * std::norm(alpha - beta));
        }
    }
    return (2.0 / kPi) * acc * s.dre() * s.dim();
}

PhaseGrid sample_grid(const std::function<double(Complex)>& f, const GridSpec& spec) {
    if (spec.steps_re < 2 || spec.steps_im < 2)
        throw std::invalid_argument("sample_grid: steps must be >= 2 on both axes");
    PhaseGrid g;
    g.spec = spec;
    g.values.resize(spec.steps_re, spec.steps_im);
    for (int i = 0; i < spec.steps_re; ++i) {
        for (int j = 0; j < spec.steps_im; ++j) {
            const Complex a = spec.point(i, j);
            double v;
            try {
                v = f(a);
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << "sample_grid: evaluator failed at alpha=(" << a.real() << ","
                    << a.imag() << "): " << e.what();
                throw std::runtime_error(msg.str());
            }
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "sample_grid: non-finite value at alpha=(" << a.real() << ","
                    << a.imag() << ")";
                throw std::runtime_error(msg.str());
            }
            g.values(i, j) = v;
        }
    }
    return g;
}

double grid_integral(const PhaseGrid& g) {
    const GridSpec& s = g.spec;
    double acc = 0.0;
    for (int i = 0; i < s.steps_re; ++i) {
        const double wi = (i == 0 || i == s.steps_re - 1) ? 0.5 : 1.0;
        for (int j = 0; j < s.steps_im; ++j) {
            const double wj = (j == 0 || j == s.steps_im - 1) ? 0.5 : 1.0;
            acc += wi * wj * g.values(i, j);
        }
    }
    return acc * s.dre() * s.dim();
}

}  // namespace qcav
