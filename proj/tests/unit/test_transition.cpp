#include <cmath>

#include "doctest.h"
#include "tippingscope/transition.hpp"

using namespace tippingscope;
using models::AlleePredationModel;
using models::TransitionModel;
using transition::Branch;
using transition::RunClass;

namespace {

TransitionModel perturbed(double rho)
{
    TransitionModel tm;
    tm.rho = rho;
    return tm;
}

} // namespace

TEST_SUITE("transition") {

TEST_CASE("past equation has the pinned equilibrium structure")
{
    const auto past = transition::past_limits(AlleePredationModel{});
    REQUIRE(past.roots.size() == 3);
    CHECK(std::fabs(past.roots[0].y) <= 1e-10);
    CHECK(past.roots[1].y == doctest::Approx(3.302051).epsilon(1e-5));
    CHECK(past.roots[2].y == doctest::Approx(8.780456).epsilon(1e-5));
    CHECK(past.roots[0].h_y == doctest::Approx(-0.022333).epsilon(1e-4));
    CHECK(past.roots[1].h_y == doctest::Approx(0.009283).epsilon(1e-4));
    CHECK(past.roots[2].h_y == doctest::Approx(-0.010864).epsilon(1e-4));
    CHECK(past.roots[0].stability == poincare::Stability::Attractive);
    CHECK(past.roots[1].stability == poincare::Stability::Repulsive);
    CHECK(past.roots[2].stability == poincare::Stability::Attractive);

    AlleePredationModel heavy;
    heavy.D0 = 60.0;  // predation kills the upper equilibria
    CHECK_THROWS_AS(transition::past_limits(heavy), UnexpectedRootCount);
}

TEST_CASE("upper pullback solution hits its pinned values")
{
    const auto at0 =
        transition::pullback_solution(perturbed(0.0), Branch::Upper, 0.0);
    CHECK(at0.x_final == doctest::Approx(8.1871731476).epsilon(1e-6));

    const auto far =
        transition::pullback_solution(perturbed(0.0), Branch::Upper, 1e5);
    CHECK(far.x_final == doctest::Approx(8.7806599318).epsilon(1e-5));

    const auto bitten =
        transition::pullback_solution(perturbed(0.28), Branch::Upper, 0.0);
    CHECK(bitten.x_final == doctest::Approx(5.5049295537).epsilon(1e-5));
    const auto bitten_far =
        transition::pullback_solution(perturbed(0.28), Branch::Upper, 1e5);
    CHECK(bitten_far.x_final == doctest::Approx(6.0605204628).epsilon(1e-5));
}

TEST_CASE("lower pullback branch is exactly zero")
{
    const auto lower =
        transition::pullback_solution(perturbed(0.28), Branch::Lower, 50.0);
    CHECK(lower.x_final == 0.0);
    for (const double t : {-1e4, -17.0, 0.0, 49.0})
        CHECK(lower.sample(t) == 0.0);
}

TEST_CASE("stronger perturbations push the upper solution down")
{
    const double u0 =
        transition::pullback_solution(perturbed(0.0), Branch::Upper, 0.0)
            .x_final;
    const double u1 =
        transition::pullback_solution(perturbed(0.1), Branch::Upper, 0.0)
            .x_final;
    const double u2 =
        transition::pullback_solution(perturbed(0.28), Branch::Upper, 0.0)
            .x_final;
    CHECK(u0 >= u1 - 1e-8);
    CHECK(u1 >= u2 - 1e-8);
    CHECK(u0 - u2 > 1.0);  // the effect is macroscopic, not just monotone
}

TEST_CASE("classification tracks below the threshold and tips above it")
{
    CHECK(transition::classify_run(perturbed(0.0), 0.0, 1e5, 1e-3)
          == RunClass::Tracking);
    CHECK(transition::classify_run(perturbed(0.28), 0.28, 1e5, 1e-3)
          == RunClass::Tracking);
    CHECK(transition::classify_run(perturbed(0.4), 0.4, 1e5, 1e-3)
          == RunClass::Tipping);
}

TEST_CASE("bisection brackets the critical perturbation size")
{
    TransitionModel tm;
    const auto report =
        transition::locate_tipping(tm, 0.28, 0.35, 0.01, 1e5, 1e-3);
    CHECK(report.rho_lo < report.rho_hi);
    CHECK(report.rho_hi - report.rho_lo <= 0.01 + 1e-12);
    // the desk-scale threshold sits near 0.3014 at this horizon
    CHECK(report.rho_lo <= 0.3014);
    CHECK(report.rho_hi >= 0.3013);
    CHECK(report.rho_lo >= 0.29);
    CHECK(report.rho_hi <= 0.31);
    CHECK(report.horizon == 1e5);
    CHECK(report.epsilon == 1e-3);
    REQUIRE(report.rho_values.size() == report.classifications.size());

    // every probe obeys the monotone boundary
    double max_tracking = 0.0, min_tipping = 1.0;
    for (std::size_t i = 0; i < report.rho_values.size(); ++i) {
        if (report.classifications[i] == RunClass::Tracking)
            max_tracking = std::max(max_tracking, report.rho_values[i]);
        else
            min_tipping = std::min(min_tipping, report.rho_values[i]);
    }
    CHECK(max_tracking < min_tipping);
    CHECK(max_tracking == doctest::Approx(report.rho_lo));
    CHECK(min_tipping == doctest::Approx(report.rho_hi));

    CHECK_THROWS_AS(transition::locate_tipping(tm, 0.4, 0.5, 0.01, 1e5, 1e-3),
                    BadBracket);
}

TEST_CASE("finite-time exponent of a linear field is its rate")
{
    odeint::ScalarField f;
    f.rhs = [](double, double x) { return -x; };
    f.d1 = [](double, double) { return -1.0; };
    const auto traj = odeint::integrate(f, 0.0, 1.0, 5.0);
    CHECK(transition::finite_time_exponent(f, traj, 0.0, 5.0)
          == doctest::Approx(-1.0).epsilon(1e-12));
}

} // TEST_SUITE
