#pragma once

#include "resolab/potentials.hpp"
#include "resolab/testfns.hpp"

#include <complex>
#include <stdexcept>
#include <vector>

namespace resolab {

struct ResonanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -h^2 u'' + V u = lambda^2 u on the line, truncated where V is negligible.
struct SpectralProblem {
    PotentialField field;
    double h = 1.0;
    double ode_tol = 1e-12;
    double truncation_tol = 1e-14;  // relative to max V
    double x_left = 0.0;
    double x_right = 0.0;

    SpectralProblem(PotentialField f, double h_in,
                    double ode_tol_in = 1e-12, double trunc_tol = 1e-14);
};

struct Rect {
    double re_lo = 0.0, re_hi = 0.0;
    double im_lo = 0.0, im_hi = 0.0;  // im_hi <= 0: lower half plane
    double width() const { return re_hi - re_lo; }
    double height() const { return im_hi - im_lo; }
    std::complex<double> center() const {
        return {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)};
    }
};

// Renormalized Wronskian of the outgoing Jost solutions: the log-derivative
// of u_- (u_- ~ e^{-i lambda x / h} at -inf) propagated to x_right, minus
// i lambda / h, times the running positive rescaling of (u, u'). Differs
// from the true Wronskian by a nonvanishing factor, so zeros in the lower
// half plane and their winding numbers are those of the resonance problem.
std::complex<double> wronskian(const SpectralProblem& problem,
                               std::complex<double> lambda);

// Winding number of the renormalized Wronskian around the rectangle,
// computed by adaptive phase tracking; equals the zero count with
// multiplicity for rectangles in the lower half plane.
int count_zeros(const SpectralProblem& problem, const Rect& rect);

struct Resonance {
    std::complex<double> lambda;
    int multiplicity = 1;
    double residual = 0.0;  // |W~| at the refined location
};

struct ResonanceSet {
    std::vector<Resonance> items;
    Rect window;
    double h = 1.0;
    bool truncated = false;  // max_count exceeded; partial set
    int total_multiplicity() const;
};

ResonanceSet find_resonances(const SpectralProblem& problem, Rect window,
                             int max_count = 512);

struct ResonanceSumResult {
    double value = 0.0;             // real part of the assembled sum
    double imag_residual = 0.0;     // should vanish after mirror pairing
    double truncation_bound = 0.0;  // bound on the window-truncation error
};

// (1/4 pi) sum over resonances of integral of ghat(t) e^{-i t lambda} over R,
// assembled as (1/2 pi) sum of the one-sided integrals.
ResonanceSumResult resonance_sum(const ResonanceSet& set,
                                 const TestFunctionPair& pair);

}  // namespace resolab
