#include <cmath>

#include "doctest.h"
#include "tippingscope/odeint.hpp"

using namespace tippingscope;
using odeint::IntegratorConfig;
using odeint::ScalarField;
using odeint::Trajectory;
using odeint::TrajectoryStatus;

namespace {

ScalarField linear(double rate)
{
    ScalarField f;
    f.rhs = [rate](double, double x) { return rate * x; };
    f.d1 = [rate](double, double) { return rate; };
    return f;
}

ScalarField quadratic()
{
    ScalarField f;
    f.rhs = [](double, double x) { return x * x; };
    f.d1 = [](double, double x) { return 2.0 * x; };
    return f;
}

} // namespace

TEST_SUITE("odeint") {

TEST_CASE("exponential decay matches the closed form")
{
    const auto traj = odeint::integrate(linear(-1.0), 0.0, 1.0, 5.0);
    CHECK(traj.status == TrajectoryStatus::Completed);
    CHECK(traj.forward());
    CHECK(traj.t_start == doctest::Approx(0.0));
    CHECK(traj.t_final == doctest::Approx(5.0));
    CHECK(std::fabs(traj.x_final - std::exp(-5.0)) <= 1e-12);
    CHECK(std::fabs(traj.sample(2.5) - std::exp(-2.5)) <= 1e-11);
    CHECK(std::fabs(odeint::sample(traj, 2.5) - traj.sample(2.5)) == 0.0);
}

TEST_CASE("growth over one unit reproduces e")
{
    const auto traj = odeint::integrate(linear(1.0), 0.0, 1.0, 1.0);
    CHECK(std::fabs(traj.x_final - 2.718281828459045) <= 1e-11);
}

TEST_CASE("pure time dependence integrates to the sine")
{
    ScalarField f;
    f.rhs = [](double t, double) { return std::cos(t); };
    f.d1 = [](double, double) { return 0.0; };
    const auto traj = odeint::integrate(f, 0.0, 0.0, 10.0);
    CHECK(std::fabs(traj.x_final - std::sin(10.0)) <= 1e-10);
    CHECK(std::fabs(traj.sample(0.5 * M_PI) - 1.0) <= 1e-10);
}

TEST_CASE("dense output agrees with the closed form between steps")
{
    // x' = x cos t has solution exp(sin t)
    ScalarField f;
    f.rhs = [](double t, double x) { return x * std::cos(t); };
    f.d1 = [](double t, double) { return std::cos(t); };
    const auto traj = odeint::integrate(f, 0.0, 1.0, 10.0);
    for (const double t : {0.37, 1.234, 4.0, 7.077, 9.99})
        CHECK(std::fabs(traj.sample(t) - std::exp(std::sin(t)))
              <= doctest::Approx(1e-10));
}

TEST_CASE("backward integration covers the span and samples")
{
    const auto traj = odeint::integrate(linear(1.0), 0.0, 1.0, -3.0);
    CHECK(traj.status == TrajectoryStatus::Completed);
    CHECK(!traj.forward());
    CHECK(traj.t_lo() == doctest::Approx(-3.0));
    CHECK(traj.t_hi() == doctest::Approx(0.0));
    CHECK(std::fabs(traj.x_final - std::exp(-3.0)) <= 1e-12);
    CHECK(std::fabs(traj.sample(-1.5) - std::exp(-1.5)) <= 1e-11);
}

TEST_CASE("forward blow-up trips the guard with direction +1")
{
    // x' = x^2 from x(0) = 1 reaches the 1e7 guard just before t = 1
    const auto traj = odeint::integrate(quadratic(), 0.0, 1.0, 2.0);
    CHECK(traj.status == TrajectoryStatus::BlewUp);
    CHECK(traj.escape_direction == 1);
    CHECK(std::fabs(traj.t_escape - 1.0) <= 1e-3);
    CHECK(traj.t_final == doctest::Approx(traj.t_escape));
    CHECK(traj.x_final >= 1e7);
}

TEST_CASE("backward blow-up trips the guard with direction -1")
{
    // x' = x^2 from x(0) = -1 solves x = -1/(1+t), unbounded at t = -1
    const auto traj = odeint::integrate(quadratic(), 0.0, -1.0, -2.0);
    CHECK(traj.status == TrajectoryStatus::BlewUp);
    CHECK(traj.escape_direction == -1);
    CHECK(std::fabs(traj.t_escape + 1.0) <= 1e-3);
    CHECK(traj.x_final <= -1e7);
}

TEST_CASE("sampling outside the covered span throws")
{
    const auto traj = odeint::integrate(linear(-1.0), 0.0, 1.0, 2.0);
    CHECK_THROWS_AS((void)traj.sample(2.5), OutOfRange);
    CHECK_THROWS_AS((void)traj.sample(-0.5), OutOfRange);
}

TEST_CASE("step underflow surfaces instead of spinning")
{
    IntegratorConfig cfg;
    cfg.abs_tol = 1e-14;
    cfg.rel_tol = 1e-14;
    cfg.h_init = 0.05;
    cfg.h_min = 0.04;  // a stiff field needs far smaller steps than this
    CHECK_THROWS_AS(odeint::integrate(linear(-1e6), 0.0, 1.0, 1.0, cfg),
                    StepUnderflow);
}

TEST_CASE("non-finite field evaluations are reported")
{
    ScalarField f;
    f.rhs = [](double t, double) { return std::sqrt(1.0 - t); };
    f.d1 = [](double, double) { return 0.0; };
    // the driver shrinks toward the singular time until the step underflows
    CHECK_THROWS_AS(odeint::integrate(f, 0.0, 0.0, 2.0), StepUnderflow);
    // a direct step into the non-finite region reports the evaluation itself
    CHECK_THROWS_AS(odeint::step_embedded(f, 0.5, 0.0, 1.0),
                    NonFiniteEvaluation);

    ScalarField nan_field;
    nan_field.rhs = [](double, double) {
        return std::numeric_limits<double>::quiet_NaN();
    };
    nan_field.d1 = [](double, double) { return 0.0; };
    // non-finite at the starting point is diagnosed before any stepping
    CHECK_THROWS_AS(odeint::integrate(nan_field, 0.0, 0.0, 1.0),
                    NonFiniteEvaluation);
}

TEST_CASE("config validation rejects nonsense")
{
    IntegratorConfig bad_tol;
    bad_tol.abs_tol = -1.0;
    CHECK_THROWS_AS(bad_tol.validate(), InvalidConfig);

    IntegratorConfig bad_steps;
    bad_steps.h_min = 1.0;
    bad_steps.h_init = 0.1;
    CHECK_THROWS_AS(bad_steps.validate(), InvalidConfig);

    IntegratorConfig bad_guard;
    bad_guard.x_guard = 0.0;
    CHECK_THROWS_AS(bad_guard.validate(), InvalidConfig);

    CHECK_THROWS_AS(odeint::step_embedded(linear(1.0), 0.0, 1.0, 0.0),
                    InvalidConfig);
}

TEST_CASE("integrating along a trajectory matches closed-form integrals")
{
    const auto traj = odeint::integrate(linear(-1.0), 0.0, 1.0, 5.0);
    const double minus_five = odeint::integrate_along(
        traj, [](double, double) { return -1.0; }, 0.0, 5.0);
    CHECK(std::fabs(minus_five + 5.0) <= 1e-12);

    // integral of x(t) = e^{-t} over [0,5]
    const double mass = odeint::integrate_along(
        traj, [](double, double x) { return x; }, 0.0, 5.0);
    CHECK(std::fabs(mass - (1.0 - std::exp(-5.0))) <= 1e-9);

    // signed: swapping the endpoints flips the sign
    const double swapped = odeint::integrate_along(
        traj, [](double, double x) { return x; }, 5.0, 0.0);
    CHECK(std::fabs(mass + swapped) <= 1e-12);

    CHECK_THROWS_AS(odeint::integrate_along(
                        traj, [](double, double) { return 1.0; }, -1.0, 5.0),
                    OutOfRange);
}

TEST_CASE("repeated runs are bit-identical")
{
    const auto a = odeint::integrate(quadratic(), 0.0, 0.5, 1.0);
    const auto b = odeint::integrate(quadratic(), 0.0, 0.5, 1.0);
    REQUIRE(a.segments.size() == b.segments.size());
    CHECK(a.x_final == b.x_final);
    CHECK(a.sample(0.77) == b.sample(0.77));
}

} // TEST_SUITE
