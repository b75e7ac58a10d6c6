#pragma once

#include "resolab/potentials.hpp"
#include "resolab/resonances.hpp"
#include "resolab/testfns.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace resolab {

struct TraceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Leading phase-space invariant:
//   integral over R^{2n} of f(|xi|^2 + V) - f(|xi|^2) dx dxi.
// n = 1, or radial fields via radial quadrature.
double direct_leading(const PotentialField& field, const TestFunctionPair& pair,
                      double tol = 1e-10);

// Subleading invariant: integral of |grad V|^2 f^{(3)}(|xi|^2 + V) dx dxi.
double direct_subleading(const PotentialField& field,
                         const TestFunctionPair& pair, double tol = 1e-10);

// Birman-Krein pairing of the scattering phase with g: the trace
// Tr(g(sqrt P) - g(sqrt P0)) computed from the unwrapped total phase of
// det S(lambda) on an adaptive real-frequency grid (n = 1).
double spectral_shift_trace(const SpectralProblem& problem,
                            const TestFunctionPair& pair, double tol = 1e-8);

struct TraceSample {
    double h = 0.0;
    double value = 0.0;             // trace used by the fit
    std::string source;             // "spectral-shift" or "resonance"
    double resonance_value = 0.0;   // when computed
    double resonance_bound = 0.0;
};

struct TraceFit {
    double c0 = 0.0, c2 = 0.0, c4 = 0.0;
    double rms_residual = 0.0;
    double condition = 0.0;
    std::vector<TraceSample> samples;
};

// Fit (2 pi h)^n Tr(h) to c0 + c2 h^2 + c4 h^4 over an h-sweep. Per-h traces
// come from the spectral-shift oracle unless the resonance-side truncation
// bound is already below 1e-6.
TraceFit semiclassical_fit(const PotentialField& field,
                           const TestFunctionPair& pair,
                           const std::vector<double>& h_list);

struct TraceReport {
    double h = 1.0;
    double resonance_value = 0.0;
    double resonance_bound = 0.0;
    double spectral_shift_value = 0.0;
    double leading = 0.0;     // I1
    double subleading = 0.0;  // I2
    TraceFit fit;
};

}  // namespace resolab
