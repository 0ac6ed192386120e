#include "tippingscope/models.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace tippingscope::models {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// central difference used when an analytic pivot derivative is unavailable
std::function<double(double)> differentiate(std::function<double(double)> fn)
{
    return [fn = std::move(fn)](double t) {
        const double h = 1e-4;
        return (fn(t + h) - fn(t - h)) / (2.0 * h);
    };
}

} // namespace

// ---- Decomposition ----------------------------------------------------------

odeint::ScalarField Decomposition::field(double lambda) const
{
    odeint::ScalarField f;
    f.rhs = [c = c, d = d, g = g, lambda](double t, double x) {
        return c(t) + d(t) * x + g(t, x) + lambda;
    };
    f.d1 = [d = d, g_x = g_x](double t, double x) { return d(t) + g_x(t, x); };
    if (g_xx)
        f.d2 = g_xx;
    if (g_xxx)
        f.d3 = g_xxx;
    return f;
}

Decomposition make_decomposition(const odeint::ScalarField& f,
                                 std::function<double(double)> pivot,
                                 std::function<double(double)> pivot_dot)
{
    if (!pivot)
        pivot = [](double) { return 0.0; };
    if (!pivot_dot)
        pivot_dot = differentiate(pivot);

    Decomposition dec;
    dec.variant = Variant::Full;
    dec.c = [rhs = f.rhs, pivot, pivot_dot](double t) {
        return rhs(t, pivot(t)) - pivot_dot(t);
    };
    dec.d = [d1 = f.d1, pivot](double t) { return d1(t, pivot(t)); };
    // g(t,x) = f(t, x+p(t)) − p'(t) − c(t) − d(t)·x; the p' terms cancel, so
    // evaluate directly against f to avoid subtracting p' twice
    dec.g = [rhs = f.rhs, d1 = f.d1, pivot](double t, double x) {
        const double p = pivot(t);
        return rhs(t, x + p) - rhs(t, p) - d1(t, p) * x;
    };
    dec.g_x = [d1 = f.d1, pivot](double t, double x) {
        const double p = pivot(t);
        return d1(t, x + p) - d1(t, p);
    };
    if (f.d2)
        dec.g_xx = [d2 = f.d2, pivot](double t, double x) {
            return d2(t, x + pivot(t));
        };
    if (f.d3)
        dec.g_xxx = [d3 = f.d3, pivot](double t, double x) {
            return d3(t, x + pivot(t));
        };
    return dec;
}

std::pair<Decomposition, Decomposition> split_g(const Decomposition& dec)
{
    if (dec.variant != Variant::Full)
        throw InvalidModel("split_g expects a Full decomposition");

    Decomposition minus = dec, plus = dec;
    minus.variant = Variant::ConcaveLinear;
    plus.variant = Variant::LinearConvex;

    minus.g = [g = dec.g](double t, double x) { return std::min(0.0, g(t, x)); };
    plus.g = [g = dec.g](double t, double x) { return std::max(0.0, g(t, x)); };
    minus.g_x = [g = dec.g, g_x = dec.g_x](double t, double x) {
        return g(t, x) < 0 ? g_x(t, x) : 0.0;
    };
    plus.g_x = [g = dec.g, g_x = dec.g_x](double t, double x) {
        return g(t, x) > 0 ? g_x(t, x) : 0.0;
    };
    if (dec.g_xx) {
        minus.g_xx = [g = dec.g, g_xx = dec.g_xx](double t, double x) {
            return g(t, x) < 0 ? g_xx(t, x) : 0.0;
        };
        plus.g_xx = [g = dec.g, g_xx = dec.g_xx](double t, double x) {
            return g(t, x) > 0 ? g_xx(t, x) : 0.0;
        };
    }
    if (dec.g_xxx) {
        minus.g_xxx = [g = dec.g, g_xxx = dec.g_xxx](double t, double x) {
            return g(t, x) < 0 ? g_xxx(t, x) : 0.0;
        };
        plus.g_xxx = [g = dec.g, g_xxx = dec.g_xxx](double t, double x) {
            return g(t, x) > 0 ? g_xxx(t, x) : 0.0;
        };
    }
    return {minus, plus};
}

// ---- PeriodicModel ----------------------------------------------------------

void PeriodicModel::validate() const
{
    if (!(d > 0))
        throw InvalidModel("periodic model requires d > 0");
    if (g_minus < 0 || g_plus < 0)
        throw InvalidModel("cubic coefficients g_minus, g_plus must be >= 0");
}

double PeriodicModel::g(double x) const
{
    const double coeff = x >= 0 ? g_minus : g_plus;
    return -coeff * x * x * x;
}

double PeriodicModel::g_x(double x) const
{
    const double coeff = x >= 0 ? g_minus : g_plus;
    return -3.0 * coeff * x * x;
}

double PeriodicModel::g_xx(double x) const
{
    const double coeff = x >= 0 ? g_minus : g_plus;
    return -6.0 * coeff * x;
}

double PeriodicModel::g_xxx(double x) const
{
    const double coeff = x >= 0 ? g_minus : g_plus;
    return -6.0 * coeff;
}

double PeriodicModel::rhs(double t, double x) const
{
    return d * x + std::cos(t + phase) + g(x) + lambda;
}

odeint::ScalarField PeriodicModel::field() const { return field_at(lambda); }

odeint::ScalarField PeriodicModel::field_at(double lam) const
{
    return split_field(Split::Full, lam);
}

odeint::ScalarField PeriodicModel::split_field(Split which, double lam) const
{
    validate();
    PeriodicModel m = *this;
    m.lambda = lam;
    switch (which) {
    case Split::Full:
        return odeint::ScalarField{
            [m](double t, double x) { return m.rhs(t, x); },
            [m](double, double x) { return m.d + m.g_x(x); },
            [m](double, double x) { return m.g_xx(x); },
            [m](double, double x) { return m.g_xxx(x); }};
    case Split::Minus:
        // keep only g⁻ = min(0, g): the cubic acting on x ≥ 0
        return odeint::ScalarField{
            [m](double t, double x) {
                const double gm = x >= 0 ? -m.g_minus * x * x * x : 0.0;
                return m.d * x + std::cos(t + m.phase) + gm + m.lambda;
            },
            [m](double, double x) {
                return m.d + (x >= 0 ? -3.0 * m.g_minus * x * x : 0.0);
            },
            [m](double, double x) { return x >= 0 ? -6.0 * m.g_minus * x : 0.0; },
            [m](double, double x) { return x >= 0 ? -6.0 * m.g_minus : 0.0; }};
    case Split::Plus:
    default:
        // keep only g⁺ = max(0, g): the cubic acting on x ≤ 0
        return odeint::ScalarField{
            [m](double t, double x) {
                const double gp = x <= 0 ? -m.g_plus * x * x * x : 0.0;
                return m.d * x + std::cos(t + m.phase) + gp + m.lambda;
            },
            [m](double, double x) {
                return m.d + (x <= 0 ? -3.0 * m.g_plus * x * x : 0.0);
            },
            [m](double, double x) { return x <= 0 ? -6.0 * m.g_plus * x : 0.0; },
            [m](double, double x) { return x <= 0 ? -6.0 * m.g_plus : 0.0; }};
    }
}

Decomposition PeriodicModel::decomposition() const
{
    validate();
    PeriodicModel m = *this;
    Decomposition dec;
    dec.variant = Variant::Full;
    dec.c = [m](double t) { return std::cos(t + m.phase) + m.lambda; };
    dec.d = [m](double) { return m.d; };
    dec.g = [m](double, double x) { return m.g(x); };
    dec.g_x = [m](double, double x) { return m.g_x(x); };
    dec.g_xx = [m](double, double x) { return m.g_xx(x); };
    dec.g_xxx = [m](double, double x) { return m.g_xxx(x); };
    return dec;
}

// ---- AlleePredationModel ----------------------------------------------------

void AlleePredationModel::validate() const
{
    if (!(K0 > K1) || !(K1 > 0) || !(D0 > D1) || !(D1 > 0))
        throw InvalidModel("capacity/predation amplitudes must satisfy "
                           "K0 > K1 > 0 and D0 > D1 > 0");
    if (!(r > 0) || !(S > 0) || !(b > 0))
        throw InvalidModel("r, S, b must be positive");
}

double AlleePredationModel::K(double omega) const { return K0 + K1 * std::cos(omega); }

double AlleePredationModel::Delta(double omega) const { return D0 + D1 * std::sin(omega); }

double AlleePredationModel::rhs(double omega, double y) const
{
    const double k = K(omega);
    const double logistic = r * y * (1.0 - y / k) * (y - S) / k;
    const double predation = Delta(omega) * y * y / (b + y * y);
    return logistic - predation;
}

double AlleePredationModel::rhs_y(double omega, double y) const
{
    const double k = K(omega);
    // logistic part written as (r/k²)(−y³ + (k+S)y² − kSy)
    const double p_y = (r / (k * k)) * (-3.0 * y * y + 2.0 * (k + S) * y - k * S);
    const double den = b + y * y;
    const double q_y = 2.0 * Delta(omega) * b * y / (den * den);
    return p_y - q_y;
}

double AlleePredationModel::rhs_yy(double omega, double y) const
{
    const double k = K(omega);
    const double p_yy = (r / (k * k)) * (-6.0 * y + 2.0 * (k + S));
    const double den = b + y * y;
    const double q_yy = 2.0 * Delta(omega) * b * (b - 3.0 * y * y) / (den * den * den);
    return p_yy - q_yy;
}

double AlleePredationModel::rhs_yyy(double omega, double y) const
{
    const double k = K(omega);
    const double p_yyy = -6.0 * r / (k * k);
    const double den = b + y * y;
    const double q_yyy =
        -24.0 * Delta(omega) * b * y * (b - y * y) / (den * den * den * den);
    return p_yyy - q_yyy;
}

double AlleePredationModel::rhs_yy_omega(double omega, double y) const
{
    const double k = K(omega);
    const double dk = -K1 * std::sin(omega);   // K̃'(ω)
    const double dd = D1 * std::cos(omega);    // Δ̃'(ω)
    const double p_yy_omega = (2.0 * r / (k * k * k)) * (6.0 * y - k - 2.0 * S) * dk;
    const double den = b + y * y;
    const double q_yy_omega = 2.0 * b * (b - 3.0 * y * y) / (den * den * den) * dd;
    return p_yy_omega - q_yy_omega;
}

odeint::ScalarField AlleePredationModel::frozen_field(double omega) const
{
    validate();
    return field_at(K(omega), Delta(omega));
}

odeint::ScalarField AlleePredationModel::field_at(double K_value, double Delta_value) const
{
    AlleePredationModel frozen = *this;
    // freeze by zeroing the oscillation and moving the mean to the request
    frozen.K0 = K_value;
    frozen.D0 = Delta_value;
    frozen.K1 = 0.0;
    frozen.D1 = 0.0;
    return odeint::ScalarField{
        [frozen](double, double y) { return frozen.rhs(0.0, y); },
        [frozen](double, double y) { return frozen.rhs_y(0.0, y); },
        [frozen](double, double y) { return frozen.rhs_yy(0.0, y); },
        [frozen](double, double y) { return frozen.rhs_yyy(0.0, y); }};
}

// ---- Driver and transition profile ------------------------------------------

double DriverOrbit::offset() const
{
    if (!(omega_ref > 0) || !(omega_ref < kTwoPi))
        throw InvalidAnchor("driver anchor phase must lie in (0, 2*pi), got " +
                            std::to_string(omega_ref));
    // separable solution of ω' = 1 − cos ω:  −cot(ω/2) = t + C
    return -1.0 / std::tan(0.5 * omega_ref) - t_ref;
}

double driver_omega(const DriverOrbit& orbit, double t)
{
    const double u = t + orbit.offset();
    // ω̄ = π + 2·arctan(u) inverts −cot(ω/2) = u on (0, 2π)
    return 3.14159265358979323846 + 2.0 * std::atan(u);
}

double driver_omega_dot(const DriverOrbit& orbit, double t)
{
    const double u = t + orbit.offset();
    return 2.0 / (1.0 + u * u);
}

double gamma(double t)
{
    constexpr double pi = 3.14159265358979323846;
    return 15.0 * std::atan(t + 10.0) / pi - 14.0 * std::atan(t - 10.0) / pi + 0.5;
}

// ---- TransitionModel --------------------------------------------------------

void TransitionModel::validate() const
{
    base.validate();
    if (rho < 0)
        throw InvalidModel("perturbation size rho must be >= 0");
    driver.offset();  // anchors outside (0, 2π) throw here
}

double TransitionModel::predation_f(double y) const
{
    if (clamp_negative && y < 0)
        return 0.0;
    return y * y / (base.b + y * y);
}

double TransitionModel::predation_f_y(double y) const
{
    if (clamp_negative && y < 0)
        return 0.0;
    const double den = base.b + y * y;
    return 2.0 * base.b * y / (den * den);
}

double TransitionModel::predation_f_yy(double y) const
{
    if (clamp_negative && y < 0)
        return 0.0;
    const double den = base.b + y * y;
    return 2.0 * base.b * (base.b - 3.0 * y * y) / (den * den * den);
}

double TransitionModel::predation_f_yyy(double y) const
{
    if (clamp_negative && y < 0)
        return 0.0;
    const double den = base.b + y * y;
    return -24.0 * base.b * y * (base.b - y * y) / (den * den * den * den);
}

double TransitionModel::rhs(double t, double y) const
{
    const double omega = driver_omega(driver, t);
    return base.rhs(omega, y) - rho * gamma(t) * predation_f(y);
}

odeint::ScalarField TransitionModel::field() const
{
    validate();
    TransitionModel m = *this;
    // cache the driver's integration constant: these lambdas run millions of
    // times over 10⁶-unit horizons
    const double C = driver.offset();
    constexpr double pi = 3.14159265358979323846;
    const auto omega_at = [C](double t) { return pi + 2.0 * std::atan(t + C); };
    return odeint::ScalarField{
        [m, omega_at](double t, double y) {
            return m.base.rhs(omega_at(t), y) - m.rho * gamma(t) * m.predation_f(y);
        },
        [m, omega_at](double t, double y) {
            return m.base.rhs_y(omega_at(t), y) -
                   m.rho * gamma(t) * m.predation_f_y(y);
        },
        [m, omega_at](double t, double y) {
            return m.base.rhs_yy(omega_at(t), y) -
                   m.rho * gamma(t) * m.predation_f_yy(y);
        },
        [m, omega_at](double t, double y) {
            return m.base.rhs_yyy(omega_at(t), y) -
                   m.rho * gamma(t) * m.predation_f_yyy(y);
        }};
}

} // namespace tippingscope::models
