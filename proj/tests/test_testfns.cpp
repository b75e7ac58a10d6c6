#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "resolab/testfns.hpp"

#include <cmath>
#include <numbers>

using namespace resolab;
namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("cos_sqrt_deriv closed form and series agree through the seam") {
    // k = 0 is cos(sqrt(z)); derivatives checked by central differences in z
    for (double z : {0.01, 0.2, 0.26, 1.0, 9.0, 400.0}) {
        CHECK(cos_sqrt_deriv(0, z) ==
              doctest::Approx(std::cos(std::sqrt(z))).epsilon(1e-12));
        double dz = 1e-5 * (1.0 + z);
        double fd = (cos_sqrt_deriv(0, z + dz) - cos_sqrt_deriv(0, z - dz)) /
                    (2.0 * dz);
        CHECK(cos_sqrt_deriv(1, z) == doctest::Approx(fd).epsilon(1e-7));
        fd = (cos_sqrt_deriv(1, z + dz) - cos_sqrt_deriv(1, z - dz)) /
             (2.0 * dz);
        CHECK(cos_sqrt_deriv(2, z) == doctest::Approx(fd).epsilon(1e-6));
    }
    // at z = 0: d^k/dz^k cos(sqrt z) = (-1)^k k! / (2k)!
    CHECK(cos_sqrt_deriv(0, 0.0) == doctest::Approx(1.0));
    CHECK(cos_sqrt_deriv(1, 0.0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(cos_sqrt_deriv(2, 0.0) == doctest::Approx(2.0 / 24.0).epsilon(1e-12));
}

TEST_CASE("bump ghat support and symmetry") {
    auto pair = build_pair(BumpSpec{1.0, 3.0}, 24);
    CHECK(pair.admissible());
    CHECK(pair.ghat(0.5) == doctest::Approx(0.0));
    CHECK(pair.ghat(1.0) == doctest::Approx(0.0));
    CHECK(pair.ghat(3.0) == doctest::Approx(0.0));
    CHECK(pair.ghat(2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
    CHECK(pair.ghat_inner() == doctest::Approx(1.0));
    CHECK(pair.ghat_outer() == doctest::Approx(3.0));
    CHECK(pair.ghat_integral() > 0.0);
}

TEST_CASE("g is the cosine transform of ghat") {
    auto pair = build_pair(BumpSpec{1.0, 3.0}, 24);
    // g(0) = (1/pi) integral of ghat over (0, inf) ... times 2? fixed by the
    // pair's own normalization: f(tau^2) = g(tau) must hold
    for (double tau : {0.0, 0.7, 2.5, 10.0}) {
        CHECK(pair.f(tau * tau) == doctest::Approx(pair.g(tau)).epsilon(1e-11));
    }
    // even in tau
    CHECK(pair.g(-1.3) == doctest::Approx(pair.g(1.3)).epsilon(1e-13));
    // slow honest decay: |g(10)| is ~2e-3, not below 1e-8
    CHECK(std::abs(pair.g(10.0)) > 1e-4);
    CHECK(std::abs(pair.g(10.0)) < 1e-2);
}

TEST_CASE("g derivatives match finite differences") {
    auto pair = build_pair(BumpSpec{1.0, 3.0}, 24);
    for (double tau : {0.3, 1.1, 4.0}) {
        double d = 1e-5;
        double fd = (pair.g(tau + d) - pair.g(tau - d)) / (2.0 * d);
        CHECK(pair.g_deriv(1, tau) == doctest::Approx(fd).epsilon(1e-8));
    }
    // g even means g'(0) = 0
    CHECK(pair.g_deriv(1, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("f derivatives match finite differences through sigma = 0") {
    auto pair = build_pair(BumpSpec{1.0, 3.0}, 24);
    for (double s : {0.0, 0.4, 2.0}) {
        double d = 1e-5;
        double fd = (pair.f(s + d) - pair.f(std::abs(s - d))) / (2.0 * d);
        if (s == 0.0) fd = (pair.f(d) - pair.f(0.0)) / d;  // one-sided
        CHECK(pair.f_deriv(1, s) == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("scaled pair dilates f and g consistently") {
    auto pair = build_pair(BumpSpec{1.0, 3.0}, 24);
    auto p4 = pair.scaled(4.0);
    CHECK(p4.lambda() == doctest::Approx(4.0));
    for (double s : {0.1, 1.0, 7.0})
        CHECK(p4.f(s) == doctest::Approx(pair.f(s / 4.0)).epsilon(1e-12));
    for (double tau : {0.5, 2.0})
        CHECK(p4.g(tau) == doctest::Approx(pair.g(tau / 2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(pair.scaled(0.5), TestFnError);
}

TEST_CASE("gaussian pair momentum integrals hit the exact identity") {
    auto pair = TestFunctionPair::gaussian();
    CHECK(!pair.admissible());
    for (int n : {1, 3}) {
        double target = std::pow(kPi, 0.5 * n);
        for (int k = n; k <= n + 3; ++k) {
            double sign = (k % 2 == 0) ? 1.0 : -1.0;
            CHECK(momentum_integral(pair, k, n) ==
                  doctest::Approx(sign * target).epsilon(1e-10));
        }
    }
}

TEST_CASE("bump momentum integrals are nonzero and consistent across routes") {
    auto pair = build_pair(BumpSpec{1.0, 3.0}, 24);
    // internal cross-check of the two routes throws on disagreement
    for (int k : {1, 3, 6}) {
        double c = momentum_integral(pair, k, 1);
        CHECK(std::abs(c) > 1e-8);
    }
    double c33 = momentum_integral(pair, 3, 3);
    CHECK(std::abs(c33) > 1e-8);
    CHECK_THROWS_AS(momentum_integral(pair, 0, 1), TestFnError);
    CHECK_THROWS_AS(momentum_integral(pair, 2, 3), TestFnError);
}
