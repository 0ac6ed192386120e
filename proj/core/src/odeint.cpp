#include "tippingscope/odeint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tippingscope::odeint {

namespace {

// ---- Dormand-Prince 5(4) tableau (FSAL) ------------------------------------

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0,       a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0,      a42 = -56.0 / 15.0,      a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0,  a62 = -355.0 / 33.0,     a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0,     a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0,     a73 = 500.0 / 1113.0,    a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

// difference between the 5th- and 4th-order weights
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// dense-output weights for the 4th-order continuous extension
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

// step-size controller constants (PI control)
constexpr double kSafety  = 0.9;
constexpr double kBeta    = 0.04;
constexpr double kExpo1   = 0.2 - kBeta * 0.75;
constexpr double kFacMin  = 0.2;   // max shrink factor per step
constexpr double kFacMax  = 10.0;  // max growth factor per step

struct Stages {
    double k1, k2, k3, k4, k5, k6, k7;
    double x_high;
    bool finite;
};

// evaluates the seven stages of one DP5 step; k1 may be supplied (FSAL)
Stages run_stages(const ScalarField& f, double t, double x, double h,
                  const double* k1_cached)
{
    Stages s{};
    s.k1 = k1_cached ? *k1_cached : f.rhs(t, x);
    s.k2 = f.rhs(t + c2 * h, x + h * (a21 * s.k1));
    s.k3 = f.rhs(t + c3 * h, x + h * (a31 * s.k1 + a32 * s.k2));
    s.k4 = f.rhs(t + c4 * h, x + h * (a41 * s.k1 + a42 * s.k2 + a43 * s.k3));
    s.k5 = f.rhs(t + c5 * h, x + h * (a51 * s.k1 + a52 * s.k2 + a53 * s.k3 + a54 * s.k4));
    s.k6 = f.rhs(t + h, x + h * (a61 * s.k1 + a62 * s.k2 + a63 * s.k3 + a64 * s.k4 + a65 * s.k5));
    s.x_high = x + h * (a71 * s.k1 + a73 * s.k3 + a74 * s.k4 + a75 * s.k5 + a76 * s.k6);
    s.k7 = f.rhs(t + h, s.x_high);
    s.finite = std::isfinite(s.k1) && std::isfinite(s.k2) && std::isfinite(s.k3) &&
               std::isfinite(s.k4) && std::isfinite(s.k5) && std::isfinite(s.k6) &&
               std::isfinite(s.k7) && std::isfinite(s.x_high);
    return s;
}

double error_estimate(const Stages& s, double h)
{
    return h * (e1 * s.k1 + e3 * s.k3 + e4 * s.k4 + e5 * s.k5 + e6 * s.k6 + e7 * s.k7);
}

TrajectorySegment make_segment(double t, double x, double h, const Stages& s)
{
    TrajectorySegment seg;
    seg.t0 = t;
    seg.h  = h;
    const double dx = s.x_high - x;
    seg.r1 = x;
    seg.r2 = dx;
    seg.r3 = h * s.k1 - dx;
    seg.r4 = dx - h * s.k7 - seg.r3;
    seg.r5 = h * (d1 * s.k1 + d3 * s.k3 + d4 * s.k4 + d5 * s.k5 + d6 * s.k6 + d7 * s.k7);
    return seg;
}

// first time within the accepted segment at which |x| crosses the guard,
// found by bisection on the dense interpolant
double locate_guard_crossing(const TrajectorySegment& seg, double guard)
{
    double lo = 0.0, hi = 1.0;  // theta
    for (int i = 0; i < 80 && hi - lo > 1e-14; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std::fabs(seg.eval(seg.t0 + mid * seg.h)) > guard)
            hi = mid;
        else
            lo = mid;
    }
    return seg.t0 + hi * seg.h;
}

// 7-point Gauss-Legendre nodes/weights on [-1,1]
constexpr double kGlNode[7] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
     0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double kGlWeight[7] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694,
    0.3818300505051189, 0.2797053914892767, 0.1294849661688697};

} // namespace

void IntegratorConfig::validate() const
{
    if (!(abs_tol > 0) || !(rel_tol > 0))
        throw InvalidConfig("integrator tolerances must be positive");
    if (!(h_min > 0) || !(h_min <= h_init) || !(h_init <= h_max))
        throw InvalidConfig("integrator steps must satisfy 0 < h_min <= h_init <= h_max");
    if (!(x_guard > 0))
        throw InvalidConfig("x_guard must be positive");
}

StepResult step_embedded(const ScalarField& f, double t, double x, double h)
{
    if (!(h > 0) && !(h < 0))
        throw InvalidConfig("step_embedded requires a nonzero step");
    if (!std::isfinite(t) || !std::isfinite(x))
        throw NonFiniteEvaluation("step_embedded called with non-finite state");
    const Stages s = run_stages(f, t, x, h, nullptr);
    if (!s.finite)
        throw NonFiniteEvaluation("vector field returned a non-finite value at t=" +
                                  std::to_string(t));
    return {s.x_high, error_estimate(s, h)};
}

Trajectory integrate(const ScalarField& f, double t0, double x0, double t1,
                     const IntegratorConfig& cfg)
{
    cfg.validate();
    if (t1 == t0)
        throw InvalidConfig("integrate requires t1 != t0");
    if (!std::isfinite(x0))
        throw NonFiniteEvaluation("initial state is not finite");

    Trajectory traj;
    traj.t_start = t0;
    traj.x_start = x0;

    const double dir = (t1 > t0) ? 1.0 : -1.0;
    const double span = std::fabs(t1 - t0);

    if (std::fabs(x0) > cfg.x_guard) {
        traj.status = TrajectoryStatus::BlewUp;
        traj.t_escape = t0;
        traj.escape_direction = x0 > 0 ? 1 : -1;
        traj.t_final = t0;
        traj.x_final = x0;
        return traj;
    }

    double t = t0, x = x0;
    double h = dir * std::min(cfg.h_init, std::min(cfg.h_max, span));
    double facold = 1e-4;
    bool rejected = false;
    double k1 = f.rhs(t, x);
    if (!std::isfinite(k1))
        throw NonFiniteEvaluation("vector field is not finite at the initial point");

    // generous cap: a smooth scalar problem never needs this many steps, and
    // a pathological field should fail loudly instead of spinning forever
    const long max_steps = 200000000L;

    for (long n = 0; n < max_steps; ++n) {
        if ((t - t1) * dir >= 0)
            break;

        // clamp the trial step to the remaining span
        double remaining = t1 - t;
        if (std::fabs(h) > std::fabs(remaining))
            h = remaining;

        const Stages s = run_stages(f, t, x, h, &k1);
        if (!s.finite) {
            // treat like a rejected step: shrink hard and retry
            h *= 0.1;
            if (std::fabs(h) < cfg.h_min)
                throw StepUnderflow("field became non-finite and the step underflowed at t=" +
                                    std::to_string(t));
            continue;
        }

        const double sc = cfg.abs_tol +
                          cfg.rel_tol * std::max(std::fabs(x), std::fabs(s.x_high));
        const double err = std::fabs(error_estimate(s, h)) / sc;

        const double fac11 = std::pow(std::max(err, 1e-30), kExpo1);
        if (err <= 1.0) {
            // accepted
            facold = std::max(err, 1e-4);
            TrajectorySegment seg = make_segment(t, x, h, s);
            traj.segments.push_back(seg);

            t = t + h;
            x = s.x_high;
            k1 = s.k7;  // FSAL

            if (std::fabs(x) > cfg.x_guard) {
                traj.status = TrajectoryStatus::BlewUp;
                traj.t_escape = locate_guard_crossing(seg, cfg.x_guard);
                traj.escape_direction = x > 0 ? 1 : -1;
                traj.t_final = t;
                traj.x_final = x;
                return traj;
            }

            if ((t - t1) * dir >= 0)
                break;  // span covered; skip the controller for the stub step

            double fac = fac11 / std::pow(facold, kBeta);
            fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac / kSafety));
            double h_new = h / fac;
            if (rejected)  // no growth directly after a rejection
                h_new = dir * std::min(std::fabs(h_new), std::fabs(h));
            if (std::fabs(h_new) > cfg.h_max)
                h_new = dir * cfg.h_max;
            h = h_new;
            rejected = false;
        }
        else {
            rejected = true;
            double fac = std::min(1.0 / kFacMin, fac11 / kSafety);
            h = h / fac;
        }

        if (std::fabs(h) < cfg.h_min)
            throw StepUnderflow("required step below h_min at t=" + std::to_string(t) +
                                " (stiffness or blow-up steeper than x_guard can witness)");
    }

    traj.status = TrajectoryStatus::Completed;
    traj.t_final = t1;
    traj.x_final = x;
    return traj;
}

double Trajectory::sample(double t) const
{
    if (segments.empty())
        throw OutOfRange("trajectory holds no segments");
    const double lo = t_lo(), hi = t_hi();
    const double slack = 1e-9 * (1.0 + std::fabs(lo) + std::fabs(hi));
    if (t < lo - slack || t > hi + slack)
        throw OutOfRange("sample time " + std::to_string(t) + " outside [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
    t = std::clamp(t, lo, hi);

    // binary search for the segment whose [t0, t0+h] (direction-aware) holds t
    const bool fwd = forward();
    std::size_t a = 0, b = segments.size() - 1;
    while (a < b) {
        const std::size_t mid = (a + b) / 2;
        const TrajectorySegment& seg = segments[mid];
        const double t_end = seg.t0 + seg.h;
        if (fwd ? (t <= t_end) : (t >= t_end))
            b = mid;
        else
            a = mid + 1;
    }
    return segments[a].eval(t);
}

double sample(const Trajectory& traj, double t) { return traj.sample(t); }

double integrate_along(const Trajectory& traj,
                       const std::function<double(double, double)>& w,
                       double ta, double tb)
{
    if (traj.segments.empty())
        throw OutOfRange("trajectory holds no segments");
    const double lo = std::min(ta, tb), hi = std::max(ta, tb);
    const double slack = 1e-9 * (1.0 + std::fabs(traj.t_lo()) + std::fabs(traj.t_hi()));
    if (lo < traj.t_lo() - slack || hi > traj.t_hi() + slack)
        throw OutOfRange("integration window not covered by the trajectory");

    double total = 0.0;
    for (const TrajectorySegment& seg : traj.segments) {
        const double s_lo = std::min(seg.t0, seg.t0 + seg.h);
        const double s_hi = std::max(seg.t0, seg.t0 + seg.h);
        const double p_lo = std::max(s_lo, lo), p_hi = std::min(s_hi, hi);
        if (p_hi <= p_lo)
            continue;
        const double mid = 0.5 * (p_lo + p_hi), half = 0.5 * (p_hi - p_lo);
        double acc = 0.0;
        for (int i = 0; i < 7; ++i) {
            const double tt = mid + half * kGlNode[i];
            acc += kGlWeight[i] * w(tt, seg.eval(tt));
        }
        total += acc * half;
    }
    return (tb >= ta) ? total : -total;
}

} // namespace tippingscope::odeint
