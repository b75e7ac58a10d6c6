#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "resolab/inversion.hpp"
#include "resolab/moments.hpp"
#include "resolab/potentials.hpp"

#include <cmath>
#include <numbers>

using namespace resolab;
namespace {
// V = e^{-x^2}: mu(s) = 2 sqrt(ln(1/s))
double gaussian_mu(double s) { return 2.0 * std::sqrt(std::log(1.0 / s)); }
}

TEST_CASE("level grid is increasing and spans the requested range") {
    auto g = level_grid(2.0, 50, 1e-2);
    REQUIRE(g.size() == 50);
    CHECK(g.front() == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(g.back() == doctest::Approx(2.0).epsilon(1e-12));
    for (size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("moment inversion recovers the gaussian distribution function") {
    auto f = PotentialField::gaussian_mixture_1d({{1.0, 1.0, 0.0}});
    auto table = direct_moments(f, 1, 40);
    auto grid = level_grid(1.0, 200);
    auto mu = moments_to_distribution(table, grid);
    CHECK(!mu.ill_posed);
    // monotone nonincreasing by construction
    for (size_t i = 1; i < mu.mu.size(); ++i) CHECK(mu.mu[i] <= mu.mu[i - 1] + 1e-12);
    double sup = 0.0;
    for (double s = 0.05; s <= 0.95; s += 0.005)
        sup = std::max(sup, std::abs(mu(s) - gaussian_mu(s)));
    CHECK(sup <= 1e-3);
}

TEST_CASE("oracle densities satisfy n = 1 equality a b = 4 for radial fields") {
    auto f = PotentialField::gaussian_mixture_1d({{1.0, 1.0, 0.0}});
    auto levels = level_grid(1.0, 40, 5e-3);
    levels.pop_back();  // drop the critical top level
    auto d = oracle_densities(f, levels);
    auto cert = cs_certificate(d);
    CHECK(cert.verdict == "RADIAL-CONSISTENT");
    CHECK(cert.sup_defect <= 1e-6);
}

TEST_CASE("asymmetric two-bump field fails the certificate") {
    auto f = make_asymmetric_field({{1.0, 1.0, -1.2}, {0.55, 0.6, 1.4}});
    auto levels = level_grid(f.max_value(), 40, 5e-3);
    levels.pop_back();
    auto d = oracle_densities(f, levels);
    auto cert = cs_certificate(d);
    CHECK(cert.verdict == "NON-RADIAL");
    CHECK(cert.sup_defect > 0.1);
}

TEST_CASE("certificate defect is nonnegative for any field (lower bound)") {
    auto f = make_asymmetric_field({{0.9, 0.7, -0.8}, {0.8, 1.1, 0.9}});
    auto levels = level_grid(f.max_value(), 30, 1e-2);
    levels.pop_back();
    auto d = oracle_densities(f, levels);
    auto cert = cs_certificate(d);
    for (double v : cert.defect) CHECK(v >= -1e-7);
}

TEST_CASE("profile reconstruction from the exact distribution") {
    // feed the exact mu on a grid, recover R(r) ~ e^{-r^2}
    std::vector<double> s, mu;
    auto grid = level_grid(1.0, 200);
    for (double v : grid) {
        if (v >= 1.0) break;
        s.push_back(v);
        mu.push_back(gaussian_mu(v));
    }
    s.push_back(1.0);
    mu.push_back(0.0);
    DistributionFunction dist;
    dist.s = s;
    dist.mu = mu;
    dist.density.resize(s.size() - 1);
    for (size_t i = 0; i + 1 < s.size(); ++i)
        dist.density[i] = -(mu[i + 1] - mu[i]) / (s[i + 1] - s[i]);
    auto prof = distribution_to_profile(dist, 1);
    for (double r : {0.1, 0.5, 1.0, 1.8})
        CHECK(prof(r) == doctest::Approx(std::exp(-r * r)).epsilon(2e-4));
}

TEST_CASE("flowline reconstruction locates a translated gaussian") {
    auto prof = make_gaussian_profile(1.0, 1.0);
    auto target = PotentialField::gaussian_mixture_1d({{1.0, 1.0, 2.0}});
    auto rep = reconstruct_field_1d(prof, target);
    CHECK(rep.x0 == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(rep.sup_error <= 1e-4);
}
