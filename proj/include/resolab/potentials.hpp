#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace resolab {

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

double sphere_area(int n);  // area of S^{n-1} in R^n
double ball_volume(int n);  // volume of the unit ball in R^n

// Superexponential decay certificate: |V(x)| <= A exp(-B |x|^{1+eps}).
struct DecayCertificate {
    double eps = 1.0;
    double A = 1.0;
    double B = 1.0;

    // Smallest L with A exp(-B L^{1+eps}) <= tol.
    double radius_for(double tol) const;
};

// A radial profile R(r): nonnegative, strictly decreasing where positive,
// with access to R' and the inverse of the decreasing branch.
class RadialProfile {
  public:
    RadialProfile(std::function<double(double)> eval,
                  std::function<double(double)> deriv, double max_value,
                  DecayCertificate cert);

    double operator()(double r) const { return eval_(r); }
    double deriv(double r) const { return deriv_(r); }
    // Inverse on the monotone decreasing branch; s in (0, max_value].
    double inverse(double s) const;
    double max_value() const { return max_value_; }
    double effective_radius(double tol) const { return cert_.radius_for(tol); }
    const DecayCertificate& certificate() const { return cert_; }

  private:
    std::function<double(double)> eval_;
    std::function<double(double)> deriv_;
    double max_value_;
    DecayCertificate cert_;
};

RadialProfile make_gaussian_profile(double amplitude, double width);

struct GaussianBump {
    double amplitude = 1.0;
    double width = 1.0;
    double center = 0.0;
};

// A potential on R^n given by closures plus metadata. Immutable after
// construction; evaluation is reentrant.
class PotentialField {
  public:
    static PotentialField radial(RadialProfile profile, int n,
                                 std::vector<double> center);
    // Sum of 1-D Gaussian bumps; generically not radial about any point.
    static PotentialField gaussian_mixture_1d(std::vector<GaussianBump> bumps);
    // V = height on [0, width], 0 elsewhere (n = 1). Not smooth; used as a
    // resonance test problem with analytically known scattering.
    static PotentialField square_barrier_1d(double height, double width);
    static PotentialField zero_1d();

    int dimension() const { return n_; }
    double operator()(std::span<const double> x) const;
    std::vector<double> gradient(std::span<const double> x) const;

    // 1-D conveniences (dimension() == 1 required).
    double operator()(double x) const;
    double deriv(double x) const;

    double max_value() const { return max_value_; }
    const DecayCertificate& certificate() const { return cert_; }
    double support_radius(double tol) const;

    bool is_radial() const { return profile_.has_value(); }
    const RadialProfile& profile() const;
    const std::vector<double>& center() const { return center_; }

    // Breakpoints of reduced smoothness (square barrier edges); ODE
    // integrations split at these.
    const std::vector<double>& breakpoints_1d() const { return breakpoints_; }

  private:
    PotentialField() = default;

    int n_ = 1;
    std::function<double(std::span<const double>)> eval_;
    std::function<std::vector<double>(std::span<const double>)> grad_;
    double max_value_ = 0.0;
    DecayCertificate cert_;
    std::optional<RadialProfile> profile_;
    std::vector<double> center_;
    std::vector<double> breakpoints_;
};

PotentialField radialize(const RadialProfile& profile, int n,
                         std::vector<double> center);
PotentialField make_asymmetric_field(const std::vector<GaussianBump>& bumps);

// The level set {V = s} with |grad V| attached at each preimage.
// For n = 1: explicit preimage points; for radial fields: one sphere radius.
struct LevelSetOracle {
    double level = 0.0;
    bool degenerate = false;     // s at (numerically) critical value
    bool spherical = false;      // radial representation (single radius)
    std::vector<double> preimages;   // n = 1 points, or {radius}
    std::vector<double> grad_norms;  // |grad V| at each preimage
    int count() const { return static_cast<int>(preimages.size()); }
    double sum_inv_grad() const;
    double sum_grad() const;
};

LevelSetOracle level_set_oracle(const PotentialField& field, double s);

}  // namespace resolab
