#pragma once

#include "qcav/fock.hpp"

#include <functional>
#include <string>

// Exact quasiprobability evaluation (Q and Wigner) and the Gaussian
// convolution linking them.  Conventions: Q(a) = <a|rho|a>/pi and
// int W d^2a = 1 (prefactor 2/pi), which makes the parity identity exact.

namespace qcav {

/// Uniform rectangular grid over the complex plane; point (i,j) sits at
/// re_min + i*dre, im_min + j*dim.  steps are point counts (>= 2 per axis).
struct GridSpec {
    double re_min = 0.0, re_max = 0.0;
    double im_min = 0.0, im_max = 0.0;
    int steps_re = 0, steps_im = 0;

    double dre() const { return (re_max - re_min) / (steps_re - 1); }
    double dim() const { return (im_max - im_min) / (steps_im - 1); }
    Complex point(int i, int j) const {
        // interpolated form so symmetric grids hit 0 and the endpoints exactly
        return {re_min + (re_max - re_min) * (double(i) / (steps_re - 1)),
                im_min + (im_max - im_min) * (double(j) / (steps_im - 1))};
    }
    /// CLI text form `<min>:<max>:<steps>`, applied to both axes unless an
    /// independent imaginary-axis spec is supplied.
    static GridSpec parse(const std::string& re_part, const std::string& im_part = "");
};

struct PhaseGrid {
    GridSpec spec;
    Eigen::MatrixXd values;  // (steps_re, steps_im)
};

/// Q(a) = coherent_overlap(rho, a)/pi, always >= 0 up to the numerical floor.
double q_direct(const FieldDensity& rho, Complex alpha);

/// W(a) = (2/pi) sum_n (-1)^n <n|D^dag(a) rho D(a)|n>, evaluated without
/// truncating the parity sum via Tr[rho D(2a) P] with exact displaced-basis
/// matrix elements.  Normalized so the full-plane integral is 1.
double wigner_direct(const FieldDensity& rho, Complex alpha);

/// Q(a) = (2/pi) int W(b) e^{-2|a-b|^2} d^2b by the trapezoid rule on the
/// sampled grid.  Requires the grid to cover a disk of radius |a|+3 around a
/// and spacing <= 0.1; throws std::invalid_argument
/// ("convolution domain too small") otherwise.
double q_from_wigner_convolution(const PhaseGrid& w, Complex alpha);

/// Evaluate f at every grid point.  Points are independent and order is
/// unobservable.  Evaluator failures are rethrown with the point coordinates
/// attached; non-finite samples are rejected.
PhaseGrid sample_grid(const std::function<double(Complex)>& f, const GridSpec& spec);

/// Trapezoid integral of the sampled values over the grid rectangle.
double grid_integral(const PhaseGrid& g);

}  // namespace qcav
