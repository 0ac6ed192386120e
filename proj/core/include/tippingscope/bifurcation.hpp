#pragma once
#include <functional>
#include <vector>

#include "errors.hpp"
#include "models.hpp"
#include "odeint.hpp"
#include "poincare.hpp"

namespace tippingscope::bifurcation {

/// Bounded solution of the linear family at one time, with the certified
/// truncation error of the improper integral.
struct BoundedSolutionResult {
    double value = 0;
    double truncation_bound = 0;  ///< exp(−d̄·horizon)·sup|c+λ|/d̄
};

/// b_λ(t) = −∫_t^{t+horizon} exp(∫_s^t d)·(c(s)+λ) ds by composite
/// Gauss-Legendre quadrature.  horizon ≤ 0 selects it automatically so that
/// the kernel decays below 1e-13.  Throws NonDecayingKernel when the kernel
/// fails to decay by 1e-12 over the horizon (the mean of d is not positive
/// enough).
BoundedSolutionResult bounded_linear_solution(
    const std::function<double(double)>& c,
    const std::function<double(double)>& d,
    double lambda, double t, double horizon = 0);

enum class MuMethod { Quadrature, ClosedFormCosine };

/// The parameter thresholds at which the bounded solution of the linear
/// family touches zero from each side.
struct MuPair {
    double mu_minus = 0;
    double mu_plus = 0;  ///< always ≤ mu_minus
    MuMethod method = MuMethod::Quadrature;
};

/// μ₋ = −min over phases, μ⁺ = −max over phases, of the truncated ratio
/// ∫₀^∞ e^{∫_s^0 d} c(ω+s) ds / ∫₀^∞ e^{∫_s^0 d} ds.  The phase grid covers
/// one period [0, 2π) and is refined near the extrema to 1e-8.
MuPair compute_mu(const std::function<double(double)>& c,
                  const std::function<double(double)>& d,
                  int omega_grid = 128, double horizon = 0);

/// Exact values ±d/√(d²+1) for c = cosine and constant d > 0.
MuPair mu_closed_form_cosine(double d);

/// Saddle-node parameter values of the two auxiliary split families.
struct LambdaPair {
    double lambda_minus = 0;  ///< T_λ⁻ has 2 fixed points above, 0 below
    double lambda_plus = 0;   ///< T_λ⁺ has 2 fixed points below, 0 above
    double bracket_width = 0;
};

/// Bisection on the fixed-point count of the split period maps over
/// [lambda_lo, lambda_hi].  Throws BadBracket when an endpoint pair does not
/// straddle the count change.
LambdaPair find_lambda_pair(const models::PeriodicModel& family,
                            double lambda_lo, double lambda_hi, double tol,
                            const poincare::PoincareOptions& opt = {});

enum class OrderCase { O1, O2, O3, O4, O5 };

/// The four fixed-point counts behind an order classification.
struct OrderEvidence {
    std::size_t minus_at_mu_plus = 0;  ///< count of T⁻ at λ = μ⁺
    std::size_t plus_at_mu_minus = 0;  ///< count of T⁺ at λ = μ₋
    std::size_t minus_at_zero = 0;     ///< consulted only to split O4/O5
    std::size_t plus_at_zero = 0;
};

struct OrderResult {
    OrderCase order = OrderCase::O1;
    OrderEvidence evidence;
    MuPair mu;
};

/// Classifies the relative order of λ₋, λ⁺, μ₋, μ⁺ from fixed-point counts:
/// (2,2)→O1, (0,2)→O2, (2,0)→O3; (0,0) splits into O4 (both maps have two
/// fixed points at λ=0) and O5 (both have none).  Throws AmbiguousOrder with
/// the evidence embedded in the message for any other combination.
OrderResult classify_order(const models::PeriodicModel& family,
                           const poincare::PoincareOptions& opt = {});

/// One sample of the inflection curve y = 𝔟(ω), the root of h_yy(ω,·).
struct InflectionPoint {
    double omega = 0;
    double b = 0;      ///< 𝔟(ω), valid when ok
    double h_y = 0;    ///< h_y(ω, 𝔟(ω))
    double h_yyy = 0;  ///< h_yyy(ω, 𝔟(ω))
    bool ok = false;   ///< bracket found on (0, y_max]
};

/// Root of h_yy(ω,·) on (0, y_max] per grid phase, to 1e-10, with the
/// first- and third-derivative samples used by the concavity checks.
/// Missing brackets are reported per point (ok = false), not thrown.
std::vector<InflectionPoint> inflection_curve(
    const models::AlleePredationModel& model,
    const std::vector<double>& omega_grid, double y_max = 50.0);

/// Same computation for a caller-supplied field h(ω, y), with the phase in
/// the time slot.  Requires d2; d1/d3 samples are NaN when the field lacks
/// those derivatives.
std::vector<InflectionPoint> inflection_curve(
    const odeint::ScalarField& h,
    const std::vector<double>& omega_grid, double y_max = 50.0);

/// The inflection curve as a pivot for decompositions along the driver:
/// value(t) = 𝔟(ω̄(t)) and derivative(t) = 𝔟̇(ω̄(t))·(1 − cos ω̄(t)) with
/// 𝔟̇ = −h_yyω/h_yyy by the implicit function theorem.
struct PivotCurve {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

/// Builds the pivot curve for a model along a driver orbit.  Each evaluation
/// solves h_yy(ω,·) = 0 afresh; throws NoBracket if the root escapes
/// (0, y_max].
PivotCurve inflection_pivot(const models::AlleePredationModel& model,
                            const models::DriverOrbit& driver,
                            double y_max = 50.0);

/// Root structure and concavity of one frozen-parameter slice.
struct RegionClass {
    int n_roots = 0;             ///< roots of h on [0, y_max], tangencies excluded
    bool concave_convex = false; ///< h_yy has exactly one sign change, + to −
    bool d_concave = false;      ///< h_yyy ≤ 0 throughout the probe interval
    bool near_degenerate = false;///< an extremum of h grazes zero (tangency)
};

/// Classifies the autonomous slice y' = h(y) given by a frozen field (the
/// field must supply d2 and d3).  Roots are counted by a dense sign-change
/// scan refined by bisection.
RegionClass classify_region(const odeint::ScalarField& frozen,
                            double y_max = 60.0, int n_probe = 2048);

/// D-concavity band edges per phase: the largest interval [alpha, beta]
/// around 0 on which g_x(ω,·) is concave, and the strict variant.
struct DConcavityBand {
    std::vector<double> omega_grid;
    std::vector<double> alpha;       ///< ≤ 0, capped at −x_max
    std::vector<double> beta;        ///< ≥ 0, capped at +x_max
    std::vector<double> alpha_star;  ///< strict edges, alpha ≤ alpha* ≤ 0
    std::vector<double> beta_star;   ///< 0 ≤ beta* ≤ beta
};

/// Outward scan from 0 for the first sign violation of g_xxx ≤ 0 (band) and
/// g_xxx ≤ −1e-12 (strict band), refined by bisection; needs dec.g_xxx.
DConcavityBand dconcavity_band(const models::Decomposition& dec,
                               const std::vector<double>& omega_grid,
                               double x_max);

} // namespace tippingscope::bifurcation
