#pragma once
#include <functional>
#include <vector>

#include "errors.hpp"

namespace tippingscope::odeint {

/// A time-dependent scalar vector field f(t,x) together with its partial
/// derivatives in x.  `rhs` and `d1` are required by the integrator and the
/// stability machinery; `d2`/`d3` are optional and only consulted by the
/// curvature analyses (inflection curves, d-concavity bands).
struct ScalarField {
    std::function<double(double, double)> rhs;  ///< f(t,x)
    std::function<double(double, double)> d1;   ///< df/dx
    std::function<double(double, double)> d2;   ///< d2f/dx2 (may be empty)
    std::function<double(double, double)> d3;   ///< d3f/dx3 (may be empty)
};

/// Tolerances and guards for the adaptive integrator.
struct IntegratorConfig {
    double abs_tol = 1e-12;  ///< absolute error target (state units)
    double rel_tol = 1e-12;  ///< relative error target
    double h_init  = 1e-4;   ///< first trial step (clamped to the span)
    double h_min   = 1e-14;  ///< below this the controller reports StepUnderflow
    double h_max   = 1e3;    ///< step cap for quiescent stretches
    double x_guard = 1e7;    ///< |x| beyond which the run is declared blown up

    void validate() const;   ///< throws InvalidConfig on nonsensical values
};

enum class TrajectoryStatus { Completed, BlewUp };

/// One accepted integrator step stored as the dense-output polynomial of the
/// embedded pair.  Evaluation uses theta = (t - t0)/h in [0,1]; h is signed,
/// so the same layout serves forward and backward runs.
struct TrajectorySegment {
    double t0 = 0, h = 0;
    double r1 = 0, r2 = 0, r3 = 0, r4 = 0, r5 = 0;

    double eval(double t) const {
        const double theta  = (t - t0) / h;
        const double theta1 = 1.0 - theta;
        return r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
    }
};

/// Adaptive-step solution with dense interpolation and a blow-up flag.
/// Segments are contiguous and ordered in integration direction.
struct Trajectory {
    std::vector<TrajectorySegment> segments;
    TrajectoryStatus status = TrajectoryStatus::Completed;
    double t_escape = 0;        ///< valid when status == BlewUp
    int escape_direction = 0;   ///< +1 -> +inf, -1 -> -inf (BlewUp only)
    double t_start = 0;         ///< requested start time
    double t_final = 0;         ///< time actually reached (escape time if blown up)
    double x_start = 0;
    double x_final = 0;

    bool forward() const { return t_final >= t_start; }
    double t_lo() const { return forward() ? t_start : t_final; }
    double t_hi() const { return forward() ? t_final : t_start; }

    /// Interpolated state; throws OutOfRange outside the covered span.
    double sample(double t) const;
};

/// Result of a single raw embedded step (no step-size control).
struct StepResult {
    double x_high;   ///< higher-order estimate at t+h
    double err_est;  ///< difference between the pair's two estimates
};

/// One Dormand-Prince 5(4) step of size h from (t,x); throws
/// NonFiniteEvaluation if the field returns a non-finite value.
StepResult step_embedded(const ScalarField& f, double t, double x, double h);

/// Integrate x' = f(t,x) from (t0,x0) to t1 (backward if t1 < t0).  The
/// result either covers the full span (Completed) or stops at the first time
/// |x| exceeds cfg.x_guard (BlewUp).  Throws StepUnderflow when the error
/// controller would need a step below cfg.h_min.
Trajectory integrate(const ScalarField& f, double t0, double x0, double t1,
                     const IntegratorConfig& cfg = {});

/// Free-function form of Trajectory::sample.
double sample(const Trajectory& traj, double t);

/// Integral of w(t, x(t)) dt along the dense solution from ta to tb (signed).
/// Used for stability multipliers and finite-time exponents.  Throws
/// OutOfRange if [ta,tb] is not covered by the trajectory.
double integrate_along(const Trajectory& traj,
                       const std::function<double(double, double)>& w,
                       double ta, double tb);

} // namespace tippingscope::odeint
