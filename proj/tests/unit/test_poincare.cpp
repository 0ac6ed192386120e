#include <cmath>

#include "doctest.h"
#include "tippingscope/models.hpp"
#include "tippingscope/poincare.hpp"

using namespace tippingscope;
using models::PeriodicModel;
using models::Split;
using poincare::PoincareOptions;
using poincare::Stability;

namespace {

// the exact fixed point of the linear family x' = d x + cos t + lambda
double linear_fixed_point(double d, double lambda)
{
    return -d / (d * d + 1.0) - lambda / d;
}

odeint::ScalarField parabola_minus()
{
    odeint::ScalarField f;  // x' = -x^2: saddle-node equilibrium at 0
    f.rhs = [](double, double x) { return -x * x; };
    f.d1 = [](double, double x) { return -2.0 * x; };
    return f;
}

odeint::ScalarField square_shift()
{
    odeint::ScalarField f;  // x' = x^2 - 1: equilibria at -1 and +1
    f.rhs = [](double, double x) { return x * x - 1.0; };
    f.d1 = [](double, double x) { return 2.0 * x; };
    return f;
}

} // namespace

TEST_SUITE("poincare") {

TEST_CASE("linear family: one repulsive fixed point at the closed form")
{
    PeriodicModel pm;  // g = 0, lambda = 0
    const auto fps = poincare::find_fixed_points(pm.field());
    REQUIRE(fps.count() == 1);
    CHECK(std::fabs(fps.points[0].x_star - linear_fixed_point(0.1, 0.0))
          <= 1e-9);
    CHECK(fps.points[0].multiplier
          == doctest::Approx(std::exp(0.1 * 2.0 * M_PI)).epsilon(1e-8));
    CHECK(fps.points[0].stability == Stability::Repulsive);
    CHECK(!fps.anomaly);
}

TEST_CASE("autonomous equilibria with divergence inside the scan window")
{
    const auto f = square_shift();

    // starting far out diverges within one period and is witnessed as such
    const auto far = poincare::period_map(f, 3.0);
    CHECK(far.diverged);
    CHECK(far.escape_direction == 1);
    CHECK_THROWS_AS((void)poincare::period_map_derivative(f, 3.0), Divergence);

    // interior starts complete; the map fixes the equilibria
    const auto at = poincare::period_map(f, -1.0);
    REQUIRE(!at.diverged);
    CHECK(at.value == doctest::Approx(-1.0).epsilon(1e-10));

    PoincareOptions opt;
    opt.window_lo = -3.0;
    opt.window_hi = 3.0;
    const auto fps = poincare::find_fixed_points(f, opt);
    REQUIRE(fps.count() == 2);
    CHECK(fps.points[0].x_star == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(fps.points[1].x_star == doctest::Approx(1.0).epsilon(1e-8));
    // multipliers exp(-+ 4 pi) from f_x = 2x at the equilibria
    CHECK(fps.points[0].multiplier
          == doctest::Approx(std::exp(-4.0 * M_PI)).epsilon(1e-6));
    CHECK(fps.points[1].multiplier
          == doctest::Approx(std::exp(4.0 * M_PI)).epsilon(1e-4));
    CHECK(fps.points[0].stability == Stability::Attractive);
    CHECK(fps.points[1].stability == Stability::Repulsive);
}

TEST_CASE("saddle-node equilibrium classifies neutral")
{
    const auto fps = poincare::find_fixed_points(parabola_minus());
    REQUIRE(fps.count() == 1);
    CHECK(std::fabs(fps.points[0].x_star) <= 1e-8);
    CHECK(fps.points[0].multiplier == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(fps.points[0].stability == Stability::Neutral);
}

TEST_CASE("concave split at the upper threshold has the two known points")
{
    const auto mu_plus = -0.1 / std::sqrt(1.01);  // closed form for d = 0.1
    PeriodicModel pm;
    pm.g_minus = 0.005;

    PoincareOptions opt;
    opt.expect_concave_or_convex = true;
    const auto fps =
        poincare::find_fixed_points(pm.split_field(Split::Minus, mu_plus), opt);
    REQUIRE(fps.count() == 2);
    CHECK(!fps.anomaly);
    // pinned regression values for this configuration
    CHECK(fps.points[0].x_star == doctest::Approx(1.08254078).epsilon(1e-6));
    CHECK(fps.points[1].x_star == doctest::Approx(3.70551027).epsilon(1e-6));
    CHECK(fps.points[0].multiplier
          == doctest::Approx(1.57582784).epsilon(1e-5));
    CHECK(fps.points[1].multiplier
          == doctest::Approx(0.52563317).epsilon(1e-5));
    CHECK(fps.points[0].stability == Stability::Repulsive);
    CHECK(fps.points[1].stability == Stability::Attractive);

    // the multiplier matches a direct derivative evaluation at the point
    const double direct = poincare::period_map_derivative(
        pm.split_field(Split::Minus, mu_plus), fps.points[0].x_star);
    CHECK(direct == doctest::Approx(fps.points[0].multiplier).epsilon(1e-9));
}

TEST_CASE("concave split far below its saddle-node has no fixed points")
{
    PeriodicModel pm;
    pm.g_minus = 0.005;
    PoincareOptions opt;
    opt.expect_concave_or_convex = true;
    const auto fps =
        poincare::find_fixed_points(pm.split_field(Split::Minus, -0.3), opt);
    CHECK(fps.count() == 0);
    CHECK(!fps.anomaly);
}

TEST_CASE("window that misses both fixed points is reported, not guessed")
{
    const auto mu_plus = -0.1 / std::sqrt(1.01);
    PeriodicModel pm;
    pm.g_minus = 0.005;
    PoincareOptions opt;
    opt.window_lo = 10.0;  // both points sit below 10
    opt.window_hi = 20.0;
    opt.expect_concave_or_convex = true;
    CHECK_THROWS_AS(poincare::find_fixed_points(
                        pm.split_field(Split::Minus, mu_plus), opt),
                    WindowTooSmall);
}

TEST_CASE("scan parameter validation")
{
    PeriodicModel pm;
    PoincareOptions coarse;
    coarse.n_scan = 8;
    CHECK_THROWS_AS(poincare::find_fixed_points(pm.field(), coarse),
                    InvalidConfig);

    PoincareOptions empty;
    empty.window_lo = 5.0;
    empty.window_hi = 5.0;
    CHECK_THROWS_AS(poincare::find_fixed_points(pm.field(), empty),
                    InvalidConfig);
}

TEST_CASE("fixed-point location is deterministic")
{
    PeriodicModel pm;
    const auto a = poincare::find_fixed_points(pm.field());
    const auto b = poincare::find_fixed_points(pm.field());
    REQUIRE(a.count() == b.count());
    CHECK(a.points[0].x_star == b.points[0].x_star);
    CHECK(a.points[0].multiplier == b.points[0].multiplier);
}

} // TEST_SUITE
