#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "resolab/potentials.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace resolab;
namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("sphere area and ball volume, low dimensions") {
    CHECK(sphere_area(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sphere_area(2) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
    CHECK(sphere_area(3) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
    CHECK(ball_volume(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(ball_volume(2) == doctest::Approx(kPi).epsilon(1e-14));
    CHECK(ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));
}

TEST_CASE("decay certificate radius") {
    DecayCertificate c{1.0, 2.0, 0.5};  // 2 exp(-0.5 L^2)
    double L = c.radius_for(1e-10);
    CHECK(2.0 * std::exp(-0.5 * L * L) <= 1.000001e-10);
    CHECK(2.0 * std::exp(-0.5 * (0.99 * L) * (0.99 * L)) > 1e-10);
}

TEST_CASE("gaussian mixture evaluation and derivative") {
    auto f = PotentialField::gaussian_mixture_1d({{1.5, 0.7, -0.3}});
    CHECK(f.dimension() == 1);
    for (double x : {-1.0, -0.3, 0.0, 0.9, 2.4}) {
        double u = (x + 0.3) / 0.7;
        CHECK(f(x) == doctest::Approx(1.5 * std::exp(-u * u)).epsilon(1e-13));
        double fd = (f(x + 1e-6) - f(x - 1e-6)) / 2e-6;
        CHECK(f.deriv(x) == doctest::Approx(fd).epsilon(1e-7));
    }
    CHECK(f.max_value() == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("square barrier breakpoints and values") {
    auto f = PotentialField::square_barrier_1d(2.0, 0.5);
    CHECK(f(0.25) == doctest::Approx(2.0));
    CHECK(f(-0.1) == doctest::Approx(0.0));
    CHECK(f(0.6) == doctest::Approx(0.0));
    REQUIRE(f.breakpoints_1d().size() == 2);
    CHECK(f.breakpoints_1d()[0] == doctest::Approx(0.0));
    CHECK(f.breakpoints_1d()[1] == doctest::Approx(0.5));
    CHECK(f.max_value() == doctest::Approx(2.0));
}

TEST_CASE("radial field and profile inverse round trip") {
    auto prof = make_gaussian_profile(1.0, 1.0);
    auto f = PotentialField::radial(prof, 3, {0.0, 0.0, 0.0});
    CHECK(f.is_radial());
    CHECK(f.dimension() == 3);
    std::vector<double> x{0.3, -0.4, 0.5};
    double r2 = 0.3 * 0.3 + 0.4 * 0.4 + 0.5 * 0.5;
    CHECK(f(x) == doctest::Approx(std::exp(-r2)).epsilon(1e-13));
    // inverse of the decreasing branch
    for (double s : {0.9, 0.5, 0.1, 1e-3}) {
        double r = prof.inverse(s);
        CHECK(prof(r) == doctest::Approx(s).epsilon(1e-10));
    }
}

TEST_CASE("gradient matches finite differences in 3d") {
    auto prof = make_gaussian_profile(2.0, 1.3);
    auto f = PotentialField::radial(prof, 3, {0.1, -0.2, 0.0});
    std::vector<double> x{0.4, 0.3, -0.6};
    auto g = f.gradient(x);
    REQUIRE(g.size() == 3);
    for (int i = 0; i < 3; ++i) {
        auto xp = x, xm = x;
        xp[i] += 1e-6;
        xm[i] -= 1e-6;
        double fd = (f(std::span<const double>(xp)) -
                     f(std::span<const double>(xm))) / 2e-6;
        CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("level set oracle on the standard gaussian") {
    auto f = PotentialField::gaussian_mixture_1d({{1.0, 1.0, 0.0}});
    double s = std::exp(-1.0);
    auto o = level_set_oracle(f, s);
    REQUIRE(o.count() == 2);
    CHECK(!o.degenerate);
    // preimages at +-1, |V'| = 2 e^{-1} there
    CHECK(std::abs(o.preimages[0]) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(o.preimages[1]) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(o.sum_inv_grad() == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
    CHECK(o.sum_grad() == doctest::Approx(4.0 * std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("level set oracle respects the field center") {
    auto f = PotentialField::gaussian_mixture_1d({{1.0, 1.0, 2.0}});
    auto o = level_set_oracle(f, std::exp(-1.0));
    REQUIRE(o.count() == 2);
    double lo = std::min(o.preimages[0], o.preimages[1]);
    double hi = std::max(o.preimages[0], o.preimages[1]);
    CHECK(lo == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(hi == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("asymmetric two-bump field is not radial") {
    auto f = make_asymmetric_field({{1.0, 1.0, -1.0}, {0.6, 0.5, 1.2}});
    CHECK(!f.is_radial());
    CHECK(f.dimension() == 1);
    CHECK(f(-1.0) > f(2.5));
}
