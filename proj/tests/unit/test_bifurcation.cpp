#include <cmath>
#include <vector>

#include "doctest.h"
#include "tippingscope/bifurcation.hpp"
#include "tippingscope/models.hpp"

using namespace tippingscope;
using models::AlleePredationModel;
using models::Decomposition;
using models::PeriodicModel;

namespace {

double cosine(double t) { return std::cos(t); }

// closed form of the bounded solution of x' = 0.1 x + cos t + lambda
double bounded_closed(double d, double lambda, double t)
{
    return (-d * std::cos(t) + std::sin(t)) / (d * d + 1.0) - lambda / d;
}

Decomposition power_six()
{
    Decomposition dec;  // g(x) = -x^6/2, so g_xxx = -60 x^3
    dec.c = [](double) { return 0.0; };
    dec.d = [](double) { return 1.0; };
    dec.g = [](double, double x) { return -0.5 * std::pow(x, 6); };
    dec.g_x = [](double, double x) { return -3.0 * std::pow(x, 5); };
    dec.g_xx = [](double, double x) { return -15.0 * std::pow(x, 4); };
    dec.g_xxx = [](double, double x) { return -60.0 * x * x * x; };
    return dec;
}

} // namespace

TEST_SUITE("bifurcation") {

TEST_CASE("bounded linear solution matches its closed form")
{
    const auto d = [](double) { return 0.1; };
    for (const double lambda : {0.0, 0.3, -0.2}) {
        for (const double t : {0.0, 0.5 * M_PI, 2.2}) {
            const auto r = bifurcation::bounded_linear_solution(
                cosine, d, lambda, t);
            CHECK(std::fabs(r.value - bounded_closed(0.1, lambda, t)) <= 1e-9);
            CHECK(r.truncation_bound >= 0.0);
            CHECK(r.truncation_bound <= 1e-9);
        }
    }
}

TEST_CASE("bounded solution is affine in lambda")
{
    const auto d = [](double) { return 0.1; };
    const std::vector<double> lambdas{-0.2, -0.1, 0.0, 0.1, 0.2};
    std::vector<double> values;
    for (const double l : lambdas)
        values.push_back(
            bifurcation::bounded_linear_solution(cosine, d, l, 0.0).value);
    // slope from the endpoints, then every interior point must sit on the line
    const double slope = (values.back() - values.front())
                         / (lambdas.back() - lambdas.front());
    CHECK(slope == doctest::Approx(-10.0).epsilon(1e-9));  // -1/d
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double fit = values.front() + slope * (lambdas[i] - lambdas[0]);
        CHECK(std::fabs(values[i] - fit) <= 1e-10);
    }
}

TEST_CASE("non-decaying kernels are rejected")
{
    const auto d = [](double) { return -0.1; };
    CHECK_THROWS_AS(
        bifurcation::bounded_linear_solution(cosine, d, 0.0, 0.0),
        NonDecayingKernel);
}

TEST_CASE("quadrature thresholds agree with the cosine closed form")
{
    const auto quad =
        bifurcation::compute_mu(cosine, [](double) { return 0.1; });
    const auto closed = bifurcation::mu_closed_form_cosine(0.1);
    CHECK(closed.method == bifurcation::MuMethod::ClosedFormCosine);
    CHECK(quad.method == bifurcation::MuMethod::Quadrature);
    CHECK(closed.mu_minus == doctest::Approx(0.1 / std::sqrt(1.01)));
    CHECK(closed.mu_plus == doctest::Approx(-0.1 / std::sqrt(1.01)));
    CHECK(std::fabs(quad.mu_minus - closed.mu_minus) <= 1e-9);
    CHECK(std::fabs(quad.mu_plus - closed.mu_plus) <= 1e-9);
    CHECK(quad.mu_plus <= quad.mu_minus);
}

TEST_CASE("adding a constant to the forcing shifts both thresholds")
{
    const auto d = [](double) { return 0.1; };
    const auto base = bifurcation::compute_mu(cosine, d);
    const auto shifted = bifurcation::compute_mu(
        [](double t) { return std::cos(t) + 0.2; }, d);
    CHECK(shifted.mu_minus == doctest::Approx(base.mu_minus - 0.2).epsilon(1e-7));
    CHECK(shifted.mu_plus == doctest::Approx(base.mu_plus - 0.2).epsilon(1e-7));
}

TEST_CASE("saddle-node parameters of the symmetric cubic family")
{
    PeriodicModel pm;
    pm.g_minus = 0.05;
    pm.g_plus = 0.05;
    poincare::PoincareOptions opt;  // coarser scan: counts are robust to it
    opt.n_scan = 64;
    opt.integ.abs_tol = 1e-10;
    opt.integ.rel_tol = 1e-10;
    const auto pair = bifurcation::find_lambda_pair(pm, -0.5, 0.5, 1e-6, opt);
    // pinned regression values; the symmetry lambda_plus = -lambda_minus is exact
    CHECK(pair.lambda_minus == doctest::Approx(-0.00556707).epsilon(5e-4));
    CHECK(pair.lambda_plus == doctest::Approx(0.00556707).epsilon(5e-4));
    CHECK(std::fabs(pair.lambda_minus + pair.lambda_plus) <= 2e-6);
    CHECK(pair.bracket_width <= 1e-6 * 1.01);

    // a bracket that does not straddle the count change is refused
    CHECK_THROWS_AS(bifurcation::find_lambda_pair(pm, 0.5, 1.0, 1e-6, opt),
                    BadBracket);
}

TEST_CASE("strong symmetric nonlinearity lands in the last order case")
{
    PeriodicModel pm;
    pm.g_minus = 0.5;
    pm.g_plus = 0.5;
    const auto r = bifurcation::classify_order(pm);
    CHECK(r.order == bifurcation::OrderCase::O5);
    CHECK(r.evidence.minus_at_mu_plus == 0);
    CHECK(r.evidence.plus_at_mu_minus == 0);
    CHECK(r.evidence.minus_at_zero == 0);
    CHECK(r.evidence.plus_at_zero == 0);
    CHECK(r.mu.mu_minus == doctest::Approx(0.1 / std::sqrt(1.01)).epsilon(1e-7));
}

TEST_CASE("inflection curve of a translated odd cubic is flat")
{
    odeint::ScalarField h;  // h(w,y) = -(y-1)^3 + (y-1): inflection at y = 1
    h.rhs = [](double, double y) { return -std::pow(y - 1, 3) + (y - 1); };
    h.d1 = [](double, double y) { return -3.0 * (y - 1) * (y - 1) + 1.0; };
    h.d2 = [](double, double y) { return -6.0 * (y - 1); };
    h.d3 = [](double, double) { return -6.0; };

    const auto curve =
        bifurcation::inflection_curve(h, {0.0, 1.0, 2.0, M_PI}, 10.0);
    REQUIRE(curve.size() == 4);
    for (const auto& pt : curve) {
        REQUIRE(pt.ok);
        CHECK(pt.b == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(pt.h_y == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(pt.h_yyy == doctest::Approx(-6.0));
    }

    odeint::ScalarField no_d2;
    no_d2.rhs = h.rhs;
    no_d2.d1 = h.d1;
    CHECK_THROWS_AS(bifurcation::inflection_curve(no_d2, {0.0}, 10.0),
                    InvalidConfig);

    odeint::ScalarField convex;  // strictly positive curvature: no root at all
    convex.rhs = [](double, double y) { return y * y + y * y * y * y / 12.0; };
    convex.d1 = [](double, double y) { return 2.0 * y + y * y * y / 3.0; };
    convex.d2 = [](double, double y) { return 2.0 + y * y; };
    const auto missing = bifurcation::inflection_curve(convex, {0.0}, 10.0);
    REQUIRE(missing.size() == 1);
    CHECK(!missing[0].ok);
}

TEST_CASE("inflection curve of the seasonal model at pinned phases")
{
    AlleePredationModel am;
    const auto curve = bifurcation::inflection_curve(
        am, {0.0, 0.5 * M_PI, M_PI, 1.5 * M_PI});
    REQUIRE(curve.size() == 4);
    const double expected[] = {3.226832, 3.019921, 4.207453, 4.691021};
    for (int i = 0; i < 4; ++i) {
        REQUIRE(curve[i].ok);
        CHECK(curve[i].b == doctest::Approx(expected[i]).epsilon(1e-5));
        CHECK(curve[i].h_y > 0.0);
        CHECK(curve[i].h_yyy < 0.0);
    }
}

TEST_CASE("pivot derivative agrees with a finite difference of the value")
{
    AlleePredationModel am;
    models::DriverOrbit dr;
    const auto pivot = bifurcation::inflection_pivot(am, dr);
    for (const double t : {-5.0, 0.0, 3.0}) {
        const double h = 1e-4;
        const double fd =
            (pivot.value(t + h) - pivot.value(t - h)) / (2.0 * h);
        CHECK(pivot.derivative(t) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("frozen-slice classification in the three-root regime")
{
    AlleePredationModel am;
    const auto rc = bifurcation::classify_region(am.field_at(39.3, 39.2));
    CHECK(rc.n_roots == 3);
    CHECK(rc.concave_convex);
    CHECK(!rc.d_concave);
    CHECK(!rc.near_degenerate);

    // strong predation removes the upper equilibria
    const auto collapsed =
        bifurcation::classify_region(am.field_at(39.3, 45.0));
    CHECK(collapsed.n_roots == 1);
}

TEST_CASE("frozen-slice classification of synthetic fields")
{
    odeint::ScalarField cubic;  // y(1-y)(y-0.2): d-concave, concave-convex
    cubic.rhs = [](double, double y) { return y * (1 - y) * (y - 0.2); };
    cubic.d1 = [](double, double y) { return -3 * y * y + 2.4 * y - 0.2; };
    cubic.d2 = [](double, double y) { return -6 * y + 2.4; };
    cubic.d3 = [](double, double) { return -6.0; };
    const auto rc = bifurcation::classify_region(cubic, 2.0);
    CHECK(rc.n_roots == 3);
    CHECK(rc.concave_convex);
    CHECK(rc.d_concave);
    CHECK(!rc.near_degenerate);

    odeint::ScalarField grazing;  // -(y-1)^2 touches zero tangentially
    grazing.rhs = [](double, double y) { return -(y - 1) * (y - 1); };
    grazing.d1 = [](double, double y) { return -2.0 * (y - 1); };
    grazing.d2 = [](double, double) { return -2.0; };
    grazing.d3 = [](double, double) { return 0.0; };
    const auto tangent = bifurcation::classify_region(grazing, 3.0);
    CHECK(tangent.n_roots == 0);
    CHECK(tangent.near_degenerate);

    odeint::ScalarField thin;
    thin.rhs = cubic.rhs;
    thin.d1 = cubic.d1;
    CHECK_THROWS_AS(bifurcation::classify_region(thin, 2.0), InvalidConfig);
    CHECK_THROWS_AS(bifurcation::classify_region(cubic, 0.0), InvalidConfig);
    CHECK_THROWS_AS(bifurcation::classify_region(cubic, 2.0, 32),
                    InvalidConfig);
}

TEST_CASE("concavity band of g_x for an even power nonlinearity")
{
    // g_xxx = -60 x^3 <= 0 exactly on x >= 0
    const auto band =
        bifurcation::dconcavity_band(power_six(), {0.0, 1.0}, 30.0);
    REQUIRE(band.alpha.size() == 2);
    for (int i = 0; i < 2; ++i) {
        CHECK(std::fabs(band.alpha[i]) <= 1e-12);
        CHECK(band.beta[i] == 30.0);
        CHECK(std::fabs(band.alpha_star[i]) <= 1e-12);
        CHECK(band.beta_star[i] == 30.0);
        CHECK(band.alpha[i] <= band.alpha_star[i]);
        CHECK(band.beta_star[i] <= band.beta[i]);
    }
}

TEST_CASE("concavity band with interior edges")
{
    Decomposition dec = power_six();
    dec.g_xxx = [](double, double x) { return x * x - 1.0; };  // band [-1, 1]
    const auto band = bifurcation::dconcavity_band(dec, {0.0}, 30.0);
    CHECK(band.alpha[0] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(band.beta[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(band.alpha_star[0] == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(band.beta_star[0] == doctest::Approx(1.0).epsilon(1e-6));

    Decomposition open = power_six();
    open.g_xxx = [](double, double) { return 1.0; };  // violated at the center
    const auto zero = bifurcation::dconcavity_band(open, {0.0}, 30.0);
    CHECK(zero.alpha[0] == 0.0);
    CHECK(zero.beta[0] == 0.0);
    CHECK(zero.alpha_star[0] == 0.0);
    CHECK(zero.beta_star[0] == 0.0);

    Decomposition no_third = power_six();
    no_third.g_xxx = nullptr;
    CHECK_THROWS_AS(bifurcation::dconcavity_band(no_third, {0.0}, 30.0),
                    InvalidConfig);
    CHECK_THROWS_AS(bifurcation::dconcavity_band(power_six(), {0.0}, 0.0),
                    InvalidConfig);
}

} // TEST_SUITE
