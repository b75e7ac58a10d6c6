#pragma once

#include "resolab/moments.hpp"
#include "resolab/potentials.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace resolab {

struct InversionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// mu(s) = vol({V > s}) on a level grid, piecewise linear with nonnegative
// cell increments; density = -mu' is piecewise constant on the cells.
struct DistributionFunction {
    std::vector<double> s;        // s_1 < ... < s_M
    std::vector<double> mu;       // mu(s_i), nonincreasing
    std::vector<double> density;  // -mu' on cell i = [s_i, s_{i+1}], size M-1
    double fit_residual = 0.0;    // relative moment-matching residual
    bool ill_posed = false;       // residual above 1e-4

    double operator()(double level) const;  // linear interpolation
    double max_level() const { return s.empty() ? 0.0 : s.back(); }
};

// Coarea densities on the cell-midpoint levels:
//   a(s) = integral over {V = s} of |grad V|^{-1} dS  (= -mu'(s)),
//   b(s) = integral over {V = s} of |grad V| dS.
struct CoareaDensities {
    int n = 1;
    std::vector<double> s;   // levels (cell midpoints or caller levels)
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> mu;  // mu(s) at the same levels (reference volume)
};

struct Certificate {
    std::vector<double> s;
    std::vector<double> defect;  // a b / P0^2 - 1
    double sup_defect = 0.0;
    std::string verdict;  // "RADIAL-CONSISTENT" or "NON-RADIAL"
};

// Level grid on [lo_frac, 1] * max_value, uniform in sqrt(ln(max/s)):
// log-like at the bottom, clustered near the top level (default design grid).
std::vector<double> level_grid(double max_value, int nodes = 200,
                               double lo_frac = 1e-3);

// Hausdorff inversion M_k = int s^k d(-mu): nonnegative piecewise-linear-mu
// least squares with Tikhonov smoothing of the density.
DistributionFunction moments_to_distribution(const MomentTable& table,
                                             const std::vector<double>& s_grid);

// a from the distribution density, b from the same inversion applied to N_k.
CoareaDensities coarea_densities(const DistributionFunction& distribution,
                                 const MomentTable& table);

// Exact densities from the level-set oracle (counterexample route).
CoareaDensities oracle_densities(const PotentialField& field,
                                 const std::vector<double>& levels);

// Cauchy-Schwarz / isoperimetric equality test against the radial reference
// P0(s)^2 (n = 1: 4; n >= 3: squared area of the sphere of volume mu(s)).
Certificate cs_certificate(const CoareaDensities& densities);

// R with R^{-1}(s) = (mu(s) / omega_n)^{1/n}; monotone interpolation plus an
// exponential tail below the grid.
RadialProfile distribution_to_profile(const DistributionFunction& distribution,
                                      int n);

struct ReconstructionReport {
    double x0 = 0.0;         // located translation
    double sup_error = 0.0;  // sup |reconstructed - target| on the test grid
    std::vector<double> x, reconstructed, target;
};

// Integrate |V'| = |R'(R^{-1}(V))| along both flowlines out of the located
// maximum of the target; n = 1 only.
ReconstructionReport reconstruct_field_1d(const RadialProfile& profile,
                                          const PotentialField& target);

}  // namespace resolab
