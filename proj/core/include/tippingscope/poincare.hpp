#pragma once
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "odeint.hpp"

namespace tippingscope::poincare {

enum class Stability { Attractive, Repulsive, Neutral };

/// Value of the period map at one starting state: either the state after one
/// period or a divergence witness (the blow-up guard tripped inside the
/// period, with the escape direction).
struct MapValue {
    bool diverged = false;
    double value = 0;          ///< T(x0), valid when !diverged
    int escape_direction = 0;  ///< ±1 when diverged
};

struct FixedPoint {
    double x_star = 0;
    double multiplier = 0;  ///< T'(x*) > 0
    Stability stability = Stability::Neutral;
};

/// Fixed points of a period map over a scan window, sorted ascending.
struct FixedPointSet {
    std::vector<FixedPoint> points;
    double window_lo = 0;
    double window_hi = 0;
    /// True when more than two roots were found although the map is a
    /// concave or convex split, for which theory forbids a third root.
    bool anomaly = false;

    std::size_t count() const { return points.size(); }
};

/// Scan parameters for fixed-point location.
struct PoincareOptions {
    double window_lo = -30.0;  ///< scan window for initial states
    double window_hi = 30.0;
    int n_scan = 200;          ///< uniform scan intervals (≥ 16)
    double fp_tol = 1e-10;     ///< bisection tolerance in x
    double mult_tol = 1e-6;    ///< |T'(x*) − 1| band classified Neutral
    /// When the map comes from a concave-linear or linear-convex split,
    /// a strictly concave/convex map admits at most two fixed points;
    /// find_fixed_points then flags a third root as an anomaly and uses an
    /// interior-extremum search to distinguish "no roots" from "window too
    /// small" when the scan sees no sign change.
    bool expect_concave_or_convex = false;
    odeint::IntegratorConfig integ;
};

/// T(x0): the solution of the 2π-periodic field at t = 2π starting from
/// (0, x0), or a divergence witness if the guard trips inside the period.
MapValue period_map(const odeint::ScalarField& f, double x0,
                    const odeint::IntegratorConfig& cfg = {});

/// T'(x0) = exp ∫₀^{2π} f_x(s, x(s)) ds along the dense solution.
/// Throws Divergence if the trajectory does not complete the period.
double period_map_derivative(const odeint::ScalarField& f, double x0,
                             const odeint::IntegratorConfig& cfg = {});

/// Locates fixed points of the period map by a uniform scan of
/// G(x) = T(x) − x refined by bisection.  Divergent scan points contribute
/// the sign of their escape direction.  Throws WindowTooSmall when the scan
/// and the extremum fallback cannot decide whether roots lie outside the
/// window (concave/convex splits only).
FixedPointSet find_fixed_points(const odeint::ScalarField& f,
                                const PoincareOptions& opt = {});

} // namespace tippingscope::poincare
