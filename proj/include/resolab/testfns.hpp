#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace resolab {

struct TestFnError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Compactly supported even bump for ghat: ghat(t) = exp(-1/(1-u^2)) with
// u = (|t| - (t0+T)/2) / ((T-t0)/2), zero outside t0 < |t| < T.
struct BumpSpec {
    double t0 = 1.0;
    double T = 3.0;
};

// An admissible pair (g, f) with f(tau^2) = g(tau), built from ghat through
// the cosine transform so that all sigma-derivatives of f stay smooth
// through sigma = 0. Immutable; evaluation is reentrant.
class TestFunctionPair {
  public:
    enum class Kind { bump, gaussian };

    // f = e^{-sigma}, g = e^{-tau^2}; not admissible (ghat has no gap at 0),
    // used only for calibration against the exact identity
    // integral of f^{(k)}(|xi|^2) = (-1)^k pi^{n/2}.
    static TestFunctionPair gaussian(int k_max = 24);

    double g(double tau) const;
    double g_deriv(int j, double tau) const;
    double f(double sigma) const;
    double f_deriv(int k, double sigma) const;

    double ghat(double t) const;
    double ghat_inner() const;     // ghat == 0 for |t| <= inner
    double ghat_outer() const;     // ghat == 0 for |t| >= outer (cutoff for gaussian)
    double ghat_integral() const;  // integral of ghat over (0, inf)

    double lambda() const { return lambda_; }
    int max_order() const { return k_max_; }
    Kind kind() const { return kind_; }
    bool admissible() const { return kind_ == Kind::bump; }
    const BumpSpec& spec() const { return spec_; }

    // The pair (g_l, f_l) with f_l(sigma) = f(sigma / l); l >= 1.
    TestFunctionPair scaled(double l) const;

  private:
    TestFunctionPair() = default;
    friend TestFunctionPair build_pair(const BumpSpec&, int);

    Kind kind_ = Kind::bump;
    BumpSpec spec_;
    int k_max_ = 24;
    double lambda_ = 1.0;
    double ghat_integral_ = 0.0;  // unscaled
};

TestFunctionPair build_pair(const BumpSpec& spec, int k_max);
TestFunctionPair scale(const TestFunctionPair& pair, double lambda);

// C_{k,n} = integral over R^n of f^{(k)}(|xi|^2) d xi, computed by radial
// quadrature and cross-checked against the Fourier-side route calibrated on
// the Gaussian identity; throws if the two routes disagree beyond 1e-6.
double momentum_integral(const TestFunctionPair& pair, int k, int n);

// k-th derivative of z -> cos(sqrt(z)) for z >= 0 (entire through 0).
double cos_sqrt_deriv(int k, double z);

}  // namespace resolab
