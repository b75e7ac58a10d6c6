#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "resolab/potentials.hpp"
#include "resolab/testfns.hpp"
#include "resolab/trace.hpp"

#include <cmath>

using namespace resolab;

namespace {
PotentialField unit_gaussian() {
    return PotentialField::gaussian_mixture_1d({{1.0, 1.0, 0.0}});
}
}

TEST_CASE("invariants vanish on the zero field") {
    auto f = PotentialField::zero_1d();
    auto pair = build_pair(BumpSpec{1.0, 3.0}, 16);
    CHECK(direct_leading(f, pair) == 0.0);
    CHECK(direct_subleading(f, pair) == 0.0);
}

TEST_CASE("standard-pair invariants on the unit gaussian (series route)") {
    // frozen: convergent Taylor-collapse values, terms below 1e-15 by k = 13
    auto f = unit_gaussian();
    auto pair = build_pair(BumpSpec{1.0, 3.0}, 16);
    CHECK(direct_leading(f, pair) ==
          doctest::Approx(-0.524198977747).epsilon(1e-9));
    CHECK(direct_subleading(f, pair) ==
          doctest::Approx(-0.305392850155).epsilon(1e-9));
}

TEST_CASE("invariants scale like the collapsed series") {
    // frozen sums of lambda^{1/2-k} C_k M_k / k! at lambda = 4 and 64
    auto f = unit_gaussian();
    auto pair = build_pair(BumpSpec{1.0, 3.0}, 16);
    CHECK(direct_leading(f, pair.scaled(4.0)) ==
          doctest::Approx(-0.356205593835).epsilon(1e-10));
    CHECK(direct_leading(f, pair.scaled(64.0)) ==
          doctest::Approx(-0.097763583444).epsilon(1e-10));
}

TEST_CASE("wide-pair invariants agree with independent quadrature") {
    // pair (1,12): momentum integrals beyond k = 17 fail their self-check, so
    // the series tail is uncertified and the 2-d quadrature fallback runs.
    // References: independent dblquad for I1; h-extrapolated Birman-Krein
    // traces for I2/12 (the c2 coefficient).
    auto f = unit_gaussian();
    auto pair = build_pair(BumpSpec{1.0, 12.0}, 30);
    CHECK(direct_leading(f, pair) ==
          doctest::Approx(-0.5794206672).epsilon(5e-4));
    CHECK(direct_subleading(f, pair) / 12.0 ==
          doctest::Approx(-4.2864).epsilon(2e-3));
}

TEST_CASE("spectral shift trace matches the box-diagonalization oracle") {
    // frozen: eigensum of g(sqrt E_V) - g(sqrt E_0) on [-20,20] with a
    // Richardson-extrapolated finite-difference Laplacian agrees to ~1e-6
    auto f = unit_gaussian();
    auto pair = build_pair(BumpSpec{1.0, 12.0}, 30);
    SpectralProblem prob(f, 1.0);
    CHECK(spectral_shift_trace(prob, pair) ==
          doctest::Approx(-0.403656673660).epsilon(2e-6));
}
