#pragma once

#include "resolab/potentials.hpp"
#include "resolab/testfns.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace resolab {

struct MomentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Moment invariants M_k = int V^k dx and N_k = int V^k |grad V|^2 dx for
// k in [k_min, k_max]. Residuals are extraction error estimates (zero for
// the quadrature oracle); entries whose residual exceeds 1e-3 |value| are
// flagged unreliable.
struct MomentTable {
    int n = 1;
    int k_min = 1;
    int k_max = 1;
    std::vector<double> M, N;                      // indexed k - k_min
    std::vector<double> M_residual, N_residual;
    std::vector<char> M_unreliable, N_unreliable;
    std::string source;  // "direct-oracle" or "fitted"

    double M_at(int k) const { return M.at(k - k_min); }
    double N_at(int k) const { return N.at(k - k_min); }
};

// Adaptive quadrature of V^k and V^k |grad V|^2 over the certified support.
MomentTable direct_moments(const PotentialField& field, int k_min, int k_max,
                           double tol = 1e-11);

// lambda |-> value of one scaled invariant I(f_lambda).
using InvariantEvaluator = std::function<double(double)>;

struct InvariantEvaluators {
    InvariantEvaluator leading;     // I1(f_lambda): moments M_k
    InvariantEvaluator subleading;  // I2(f_lambda): moments N_k
};

// Evaluators backed by the direct phase-space integrals of the given field.
InvariantEvaluators direct_evaluators(const PotentialField& field,
                                      const TestFunctionPair& pair);

// Moment extraction from lambda-scaling asymptotics:
//   I1(f_lambda) = sum_{k >= n} lambda^{n/2-k} C_{k,n} M_k / k!
//   I2(f_lambda) = sum_{j >= 0} lambda^{n/2-3-j} C_{3+j,n} N_j / j!
// solved per family on the geometric lambda list; residuals by jackknife.
MomentTable extract_moments(const InvariantEvaluators& evaluators,
                            const TestFunctionPair& pair, int n, int K,
                            const std::vector<double>& lambda_list);

// Default extraction grid: quarter-octave geometric points in [4, 64].
std::vector<double> default_lambda_list();

}  // namespace resolab
