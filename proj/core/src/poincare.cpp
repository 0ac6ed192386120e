#include "tippingscope/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tippingscope::poincare {

namespace {

constexpr double kPeriod = 6.283185307179586476925286766559;  // 2π

// G(x) = T(x) − x collapsed to a comparable value: divergent starts count as
// ±∞ in the escape direction so sign scans and bisection work uniformly
struct GValue {
    bool divergent;
    double g;     // finite value when !divergent
    int sign;     // −1, 0, +1
};

GValue eval_g(const odeint::ScalarField& f, double x,
              const odeint::IntegratorConfig& cfg)
{
    const MapValue mv = period_map(f, x, cfg);
    if (mv.diverged)
        return {true, 0.0, mv.escape_direction};
    const double g = mv.value - x;
    return {false, g, g > 0 ? 1 : (g < 0 ? -1 : 0)};
}

// bisection of a sign change of G on [lo, hi] down to fp_tol
double refine_root(const odeint::ScalarField& f, double lo, int sign_lo,
                   double hi, const PoincareOptions& opt)
{
    double a = lo, b = hi;
    for (int i = 0; i < 200 && b - a > opt.fp_tol; ++i) {
        const double mid = 0.5 * (a + b);
        const GValue gm = eval_g(f, mid, opt.integ);
        if (gm.sign == 0)
            return mid;
        if (gm.sign == sign_lo)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

Stability classify(double multiplier, double mult_tol)
{
    if (multiplier < 1.0 - mult_tol)
        return Stability::Attractive;
    if (multiplier > 1.0 + mult_tol)
        return Stability::Repulsive;
    return Stability::Neutral;
}

} // namespace

MapValue period_map(const odeint::ScalarField& f, double x0,
                    const odeint::IntegratorConfig& cfg)
{
    const odeint::Trajectory traj = odeint::integrate(f, 0.0, x0, kPeriod, cfg);
    MapValue mv;
    if (traj.status == odeint::TrajectoryStatus::BlewUp) {
        mv.diverged = true;
        mv.escape_direction = traj.escape_direction;
    } else {
        mv.value = traj.x_final;
    }
    return mv;
}

double period_map_derivative(const odeint::ScalarField& f, double x0,
                             const odeint::IntegratorConfig& cfg)
{
    const odeint::Trajectory traj = odeint::integrate(f, 0.0, x0, kPeriod, cfg);
    if (traj.status == odeint::TrajectoryStatus::BlewUp)
        throw Divergence("period map diverged from x0 = " + std::to_string(x0) +
                         " (escape at t = " + std::to_string(traj.t_escape) + ")");
    return std::exp(odeint::integrate_along(traj, f.d1, 0.0, kPeriod));
}

FixedPointSet find_fixed_points(const odeint::ScalarField& f,
                                const PoincareOptions& opt)
{
    if (opt.n_scan < 16)
        throw InvalidConfig("n_scan must be at least 16");
    if (!(opt.window_lo < opt.window_hi))
        throw InvalidConfig("scan window is empty");

    const int n = opt.n_scan;
    const double lo = opt.window_lo, hi = opt.window_hi;

    std::vector<GValue> grid(n + 1);
    std::vector<double> xs(n + 1);
    for (int i = 0; i <= n; ++i) {
        xs[i] = lo + (hi - lo) * i / n;
        grid[i] = eval_g(f, xs[i], opt.integ);
    }

    std::vector<double> roots;
    for (int i = 0; i <= n; ++i)
        if (!grid[i].divergent && grid[i].sign == 0)
            roots.push_back(xs[i]);
    for (int i = 0; i < n; ++i) {
        if (grid[i].sign == 0 || grid[i + 1].sign == 0)
            continue;
        if (grid[i].sign * grid[i + 1].sign < 0)
            roots.push_back(refine_root(f, xs[i], grid[i].sign, xs[i + 1], opt));
    }

    // same sign everywhere: for a concave/convex split the extremum of G
    // decides between "genuinely no roots" and "window too small"
    if (roots.empty() && opt.expect_concave_or_convex) {
        int common = 0;
        bool mixed = false;
        for (const GValue& gv : grid) {
            if (common == 0)
                common = gv.sign;
            else if (gv.sign != common)
                mixed = true;
        }
        if (!mixed && common != 0) {
            // index of the finite grid value extremal against the common sign
            int j = -1;
            for (int i = 0; i <= n; ++i) {
                if (grid[i].divergent)
                    continue;
                if (j < 0 || common * grid[i].g < common * grid[j].g)
                    j = i;
            }
            if (j <= 0 || j >= n)
                throw WindowTooSmall(
                    "scan of T(x) - x found no sign change and its extremum "
                    "sits on the window boundary; enlarge the window");
            // ternary search for the interior extremum of common·G (unimodal
            // for concave/convex maps)
            double a = xs[j - 1], b = xs[j + 1];
            for (int it = 0; it < 200 && b - a > 1e-12 * (1.0 + std::fabs(a)); ++it) {
                const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
                const GValue g1 = eval_g(f, m1, opt.integ);
                const GValue g2 = eval_g(f, m2, opt.integ);
                const double v1 = g1.divergent ? common * 1e300 : common * g1.g;
                const double v2 = g2.divergent ? common * 1e300 : common * g2.g;
                if (v1 > v2)
                    a = m1;
                else
                    b = m2;
            }
            const double x_e = 0.5 * (a + b);
            const GValue ge = eval_g(f, x_e, opt.integ);
            if (!ge.divergent && ge.sign == 0) {
                roots.push_back(x_e);  // tangency: a single (neutral) root
            } else if (!ge.divergent && ge.sign != common) {
                // the extremum dips through zero: one root on each side
                roots.push_back(refine_root(f, xs[j - 1], common, x_e, opt));
                roots.push_back(refine_root(f, x_e, ge.sign, xs[j + 1], opt));
            }
            // extremum strictly on the common side: genuinely no roots
        }
    }

    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double x, double y) {
                                return std::fabs(x - y) < 10.0 * opt.fp_tol;
                            }),
                roots.end());

    FixedPointSet set;
    set.window_lo = lo;
    set.window_hi = hi;
    for (double r : roots) {
        FixedPoint fp;
        fp.x_star = r;
        fp.multiplier = period_map_derivative(f, r, opt.integ);
        fp.stability = classify(fp.multiplier, opt.mult_tol);
        set.points.push_back(fp);
    }
    if (opt.expect_concave_or_convex && set.points.size() > 2)
        set.anomaly = true;
    return set;
}

} // namespace tippingscope::poincare
