// Randomized invariant checks with fixed seeds.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "resolab/inversion.hpp"
#include "resolab/moments.hpp"
#include "resolab/potentials.hpp"
#include "resolab/resonances.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace resolab;
using cplx = std::complex<double>;

TEST_CASE("mirror symmetry of the wronskian under random sampling") {
    std::mt19937 rng(20260826);
    std::uniform_real_distribution<double> re(0.2, 10.0), im(-4.0, -0.1);
    auto f = PotentialField::square_barrier_1d(1.0, 1.0);
    SpectralProblem p(f, 1.0);
    for (int i = 0; i < 12; ++i) {
        cplx lam(re(rng), im(rng));
        cplx w = wronskian(p, lam);
        cplx wm = wronskian(p, -std::conj(lam));
        CHECK(std::abs(wm - std::conj(w)) <= 1e-8 * (1.0 + std::abs(w)));
    }
}

TEST_CASE("mu is nonincreasing for random gaussian fields") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> amp(0.4, 2.0), wid(0.5, 1.6);
    for (int trial = 0; trial < 4; ++trial) {
        auto f = PotentialField::gaussian_mixture_1d({{amp(rng), wid(rng), 0.0}});
        auto table = direct_moments(f, 1, 30);
        auto mu = moments_to_distribution(table, level_grid(f.max_value(), 120));
        for (size_t i = 1; i < mu.mu.size(); ++i)
            CHECK(mu.mu[i] <= mu.mu[i - 1] + 1e-12);
        CHECK(mu.mu.back() >= -1e-12);
    }
}

TEST_CASE("cauchy-schwarz lower bound holds for random two-bump fields") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> amp(0.5, 1.2), wid(0.5, 1.4),
        pos(0.6, 1.8);
    for (int trial = 0; trial < 4; ++trial) {
        auto f = make_asymmetric_field(
            {{amp(rng), wid(rng), -pos(rng)}, {amp(rng), wid(rng), pos(rng)}});
        auto levels = level_grid(f.max_value(), 25, 2e-2);
        levels.pop_back();
        auto d = oracle_densities(f, levels);
        // a(s) b(s) >= P0^2 = 4 pointwise (n = 1 isoperimetric bound,
        // with >= 2 preimages per regular level)
        for (size_t i = 0; i < d.s.size(); ++i)
            CHECK(d.a[i] * d.b[i] >= 4.0 - 1e-7);
    }
}

TEST_CASE("moments are invariant under translation of the field") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> shift(-3.0, 3.0);
    auto base = PotentialField::gaussian_mixture_1d({{1.0, 0.9, 0.0}});
    auto t0 = direct_moments(base, 1, 8);
    for (int trial = 0; trial < 3; ++trial) {
        double c = shift(rng);
        auto f = PotentialField::gaussian_mixture_1d({{1.0, 0.9, c}});
        auto t = direct_moments(f, 1, 8);
        for (int k = 1; k <= 8; ++k) {
            CHECK(t.M_at(k) == doctest::Approx(t0.M_at(k)).epsilon(1e-9));
            CHECK(t.N_at(k) == doctest::Approx(t0.N_at(k)).epsilon(1e-9));
        }
    }
}

TEST_CASE("field gradients agree with finite differences at random points") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> x(-2.5, 2.5), amp(0.3, 1.5),
        wid(0.4, 1.5), pos(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        auto f = make_asymmetric_field(
            {{amp(rng), wid(rng), pos(rng)}, {amp(rng), wid(rng), pos(rng)}});
        for (int i = 0; i < 6; ++i) {
            double p = x(rng);
            double fd = (f(p + 1e-6) - f(p - 1e-6)) / 2e-6;
            CHECK(f.deriv(p) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("reconstruction is exact up to translation for random shifts") {
    std::mt19937 rng(555);
    std::uniform_real_distribution<double> shift(-2.0, 2.0);
    auto prof = make_gaussian_profile(1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        double c = shift(rng);
        auto target = PotentialField::gaussian_mixture_1d({{1.0, 1.0, c}});
        auto rep = reconstruct_field_1d(prof, target);
        CHECK(rep.x0 == doctest::Approx(c).epsilon(1e-5));
        CHECK(rep.sup_error <= 1e-4);
    }
}
