#pragma once
#include <functional>
#include <utility>

#include "errors.hpp"
#include "odeint.hpp"

namespace tippingscope::models {

/// Which part of the nonlinearity a decomposition carries.
enum class Variant { Full, ConcaveLinear, LinearConvex };

/// Additive decomposition f(t,x) = c(t) + d(t)·x + g(t,x) of a scalar field,
/// normalized so that g(t,0) = 0 and g_x(t,0) = 0.  The external parameter
/// lambda enters additively through `field`.
struct Decomposition {
    std::function<double(double)> c;               ///< inhomogeneous term
    std::function<double(double)> d;               ///< linear coefficient
    std::function<double(double, double)> g;       ///< nonlinearity, g(t,0)=0
    std::function<double(double, double)> g_x;     ///< dg/dx, g_x(t,0)=0
    std::function<double(double, double)> g_xx;    ///< optional
    std::function<double(double, double)> g_xxx;   ///< optional
    Variant variant = Variant::Full;

    /// Assembled field x' = c(t) + d(t)·x + g(t,x) + lambda.
    odeint::ScalarField field(double lambda = 0.0) const;
};

/// Rewrites a field in decomposed form about a moving pivot curve:
///   c(t) = f(t, pivot(t)) − pivot'(t),  d(t) = f_x(t, pivot(t)),
///   g(t,x) = f(t, x + pivot(t)) − pivot'(t) − c(t) − d(t)·x.
/// If pivot_dot is empty the derivative is taken by central differences
/// (h = 1e-4).  The field must supply d1; d2/d3 are carried through when
/// present.
Decomposition make_decomposition(const odeint::ScalarField& f,
                                 std::function<double(double)> pivot,
                                 std::function<double(double)> pivot_dot = {});

/// Splits g into its nonpositive and nonnegative parts g⁻ = min(0,g) and
/// g⁺ = max(0,g), so that g = g⁻ + g⁺ pointwise.  Requires the Full variant.
std::pair<Decomposition, Decomposition> split_g(const Decomposition& dec);

/// Selector for the auxiliary concave-linear / linear-convex equations.
enum class Split { Minus, Plus, Full };

/// The 2π-periodic cubic family  x' = d·x + cos(t + phase) + g(x) + lambda
/// with g(x) = −g_plus·x³ on x ≤ 0 and −g_minus·x³ on x ≥ 0 (concave above
/// zero, convex below for nonnegative coefficients).
struct PeriodicModel {
    double d       = 0.1;
    double g_minus = 0.0;  ///< cubic coefficient acting on x ≥ 0
    double g_plus  = 0.0;  ///< cubic coefficient acting on x ≤ 0
    double lambda  = 0.0;
    double phase   = 0.0;

    void validate() const;  ///< throws InvalidModel on d ≤ 0 or negative cubics

    double g(double x) const;
    double g_x(double x) const;
    double g_xx(double x) const;
    double g_xxx(double x) const;
    double rhs(double t, double x) const;

    /// Full field at the stored lambda.
    odeint::ScalarField field() const;
    /// Full field with lambda overridden.
    odeint::ScalarField field_at(double lambda) const;
    /// Field with g replaced by g⁻ (Minus), g⁺ (Plus), or kept (Full).
    odeint::ScalarField split_field(Split which, double lambda) const;
    /// Decomposition with c(t) = cos(t+phase) + stored lambda, constant d.
    Decomposition decomposition() const;
};

/// Quasi-cubic population model with seasonal capacity and Holling type III
/// predation, written in the driver phase ω:
///   h(ω,y) = r·y·(1 − y/K̃(ω))·(y − S)/K̃(ω) − Δ̃(ω)·y²/(b + y²),
///   K̃(ω) = K0 + K1·cos ω,  Δ̃(ω) = D0 + D1·sin ω.
struct AlleePredationModel {
    double r  = 3.0;    ///< intrinsic growth rate
    double S  = 0.3;    ///< cooperation (Allee) threshold
    double b  = 620.0;  ///< predator handling constant
    double K0 = 39.3;   ///< carrying-capacity mean
    double K1 = 1.0;    ///< carrying-capacity amplitude
    double D0 = 39.2;   ///< predation mean
    double D1 = 1.0;    ///< predation amplitude

    void validate() const;  ///< throws InvalidModel unless K0 > K1 > 0, D0 > D1 > 0

    double K(double omega) const;
    double Delta(double omega) const;

    double rhs(double omega, double y) const;
    double rhs_y(double omega, double y) const;
    double rhs_yy(double omega, double y) const;
    double rhs_yyy(double omega, double y) const;
    /// Mixed derivative ∂ω(h_yy); used for the inflection-curve slope.
    double rhs_yy_omega(double omega, double y) const;

    /// Autonomous field y' = h(ω, y) at frozen phase ω.
    odeint::ScalarField frozen_field(double omega) const;
    /// Autonomous field with capacity and predation frozen at explicit values.
    odeint::ScalarField field_at(double K_value, double Delta_value) const;
};

/// Anchored orbit of the driver ODE ω' = 1 − cos ω, solved in closed form:
/// −cot(ω/2) = t + C gives ω̄(t) = π + 2·arctan(t + C).  ω̄ increases
/// strictly from 0 (t → −∞) to 2π (t → +∞).
struct DriverOrbit {
    double t_ref     = -2e5;  ///< anchor time
    double omega_ref = 1e-5;  ///< anchor phase, must lie in (0, 2π)

    /// Integration constant C; throws InvalidAnchor if omega_ref ∉ (0, 2π).
    double offset() const;
};

/// ω̄(t) for the anchored orbit.
double driver_omega(const DriverOrbit& orbit, double t);
/// ω̄'(t) = 1 − cos ω̄(t) = 2 / (1 + (t + C)²), evaluated in closed form.
double driver_omega_dot(const DriverOrbit& orbit, double t);

/// Transition profile Γ(t) = 15·arctan(t+10)/π − 14·arctan(t−10)/π + 1/2;
/// positive, with limits 0 at −∞ and 1 at +∞ and a hump of height ≈ 14.08
/// near t ≈ 0.174.
double gamma(double t);

/// The time-dependent perturbed model
///   y' = h(ω̄(t), y) − ρ·Γ(t)·f(y),   f(y) = y²/(b+y²) for y ≥ 0,
/// with f ≡ 0 on y < 0 when clamp_negative (keeps y = 0 invariant and the
/// structure of nonnegative solutions unchanged).
struct TransitionModel {
    AlleePredationModel base;
    double rho = 0.0;           ///< perturbation size, ≥ 0
    bool clamp_negative = true;
    DriverOrbit driver;

    void validate() const;  ///< base must validate and rho ≥ 0

    double predation_f(double y) const;
    double predation_f_y(double y) const;
    double predation_f_yy(double y) const;
    double predation_f_yyy(double y) const;

    double rhs(double t, double y) const;
    odeint::ScalarField field() const;
};

} // namespace tippingscope::models
