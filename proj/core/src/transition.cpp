#include "tippingscope/transition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace tippingscope::transition {

namespace {

// roots of a scalar function on [lo, hi] by uniform scan + bisection; exact
// zeros at grid nodes are kept as roots, near-zero results are snapped to 0
// when the function vanishes there exactly (the invariant axis)
std::vector<double> scan_roots(const std::function<double(double)>& fn,
                               double lo, double hi, int n_scan, double tol)
{
    std::vector<double> roots;
    double prev = fn(lo);
    double prev_x = lo;
    if (prev == 0.0)
        roots.push_back(lo);
    for (int i = 1; i <= n_scan; ++i) {
        const double x = lo + (hi - lo) * i / n_scan;
        const double cur = fn(x);
        if (cur == 0.0) {
            roots.push_back(x);
        } else if (prev != 0.0 && (prev > 0) != (cur > 0)) {
            double a = prev_x, b = x;
            const bool a_pos = prev > 0;
            for (int k = 0; k < 200 && b - a > tol; ++k) {
                const double m = 0.5 * (a + b);
                const double fm = fn(m);
                if (fm == 0.0) { a = b = m; break; }
                if ((fm > 0) == a_pos)
                    a = m;
                else
                    b = m;
            }
            roots.push_back(0.5 * (a + b));
        }
        prev = cur;
        prev_x = x;
    }
    for (double& r : roots)
        if (std::fabs(r) < 1e-9 && fn(0.0) == 0.0)
            r = 0.0;
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double x, double y) { return std::fabs(x - y) < 1e-8; }),
                roots.end());
    return roots;
}

poincare::Stability stability_from_slope(double h_y)
{
    if (h_y < -1e-9)
        return poincare::Stability::Attractive;
    if (h_y > 1e-9)
        return poincare::Stability::Repulsive;
    return poincare::Stability::Neutral;
}

// a once-below, always-below level for the upper solution.  At phases where
// the frozen equation has three equilibria {0, m, u}, the field is negative
// on (0, m); at phases inside a fold band (no positive equilibria) it is
// negative on all of (0, ∞).  With rho ≥ 0 the transition term only pushes
// further down, so any solution under half the smallest middle equilibrium
// keeps decaying toward the axis and can never recover — a certain-tipping
// floor for the early exit.  Returns 0 (exit disabled) if no phase has the
// three-equilibria structure.
double decay_floor(const models::AlleePredationModel& base)
{
    double lowest = std::numeric_limits<double>::infinity();
    const int n_omega = 64;
    for (int j = 0; j < n_omega; ++j) {
        const double omega = 6.283185307179586 * j / n_omega;
        const auto h = [&](double y) { return base.rhs(omega, y); };
        const std::vector<double> roots = scan_roots(h, 0.0, 60.0, 600, 1e-10);
        if (roots.size() >= 3)
            lowest = std::min(lowest, roots[1]);
    }
    return std::isfinite(lowest) ? 0.5 * lowest : 0.0;
}

} // namespace

PastLimits past_limits(const models::AlleePredationModel& base)
{
    base.validate();
    const auto h = [&](double y) { return base.rhs(0.0, y); };
    const std::vector<double> roots = scan_roots(h, -5.0, 60.0, 1300, 1e-10);
    if (roots.size() != 3)
        throw UnexpectedRootCount("expected 3 equilibria of the past equation, "
                                  "found " + std::to_string(roots.size()));
    PastLimits past;
    for (const double r : roots) {
        PastRoot root;
        root.y = r;
        root.h_y = base.rhs_y(0.0, r);
        root.stability = stability_from_slope(root.h_y);
        past.roots.push_back(root);
    }
    return past;
}

odeint::Trajectory pullback_solution(const models::TransitionModel& model,
                                     Branch which, double t_end,
                                     const PullbackOptions& opt)
{
    model.validate();
    if (!(opt.t_past < t_end))
        throw InvalidConfig("t_past must precede t_end");
    if (!(models::gamma(opt.t_past) < 1e-4) ||
        !(models::driver_omega(model.driver, opt.t_past) < 1e-3))
        throw InvalidConfig("t_past is not deep enough in the past: the "
                            "transition profile or the driver phase has left "
                            "its asymptotic regime");

    const PastLimits past = past_limits(model.base);
    const double x_init =
        which == Branch::Lower ? past.roots.front().y : past.roots.back().y;

    const odeint::ScalarField f = model.field();
    odeint::Trajectory main = odeint::integrate(f, opt.t_past, x_init, t_end, opt.integ);

    if (opt.certify && main.status == odeint::TrajectoryStatus::Completed) {
        const double t_cmp = std::min(0.0, t_end);
        const odeint::Trajectory check = odeint::integrate(
            f, opt.t_past - opt.cert_offset, x_init, t_cmp, opt.integ);
        if (check.status != odeint::TrajectoryStatus::Completed)
            throw NotConverged("certification run blew up although the main "
                               "run completed");
        const double gap = std::fabs(main.sample(t_cmp) - check.x_final);
        if (gap > opt.cert_tol)
            throw NotConverged("pullback starts disagree by " +
                               std::to_string(gap) + " at the comparison time; "
                               "move t_past further into the past");
    }
    return main;
}

RunClass classify_run(const models::TransitionModel& model, double rho,
                      double horizon, double epsilon,
                      const PullbackOptions& opt)
{
    if (!(horizon > 0) || !(epsilon > 0))
        throw InvalidConfig("horizon and epsilon must be positive");
    models::TransitionModel m = model;
    m.rho = rho;
    m.validate();

    const double floor_level = decay_floor(m.base);

    // the lower pullback solution is the invariant axis y ≡ 0, so tracking
    // reduces to the upper solution staying ε-separated from 0 at the horizon
    odeint::Trajectory to_now = pullback_solution(m, Branch::Upper, 0.0, opt);
    if (to_now.status != odeint::TrajectoryStatus::Completed)
        throw Divergence("upper pullback solution left the admissible range");
    double x = to_now.x_final;
    if (x < floor_level)
        return RunClass::Tipping;

    const odeint::ScalarField f = m.field();
    const int chunks = 64;
    double t = 0.0;
    for (int k = 1; k <= chunks; ++k) {
        const double t_next = horizon * k / chunks;
        const odeint::Trajectory leg = odeint::integrate(f, t, x, t_next, opt.integ);
        if (leg.status != odeint::TrajectoryStatus::Completed)
            throw Divergence("upper solution left the admissible range during "
                             "the forward run");
        x = leg.x_final;
        t = t_next;
        if (x < floor_level)
            return RunClass::Tipping;  // decay to the axis is now certain
    }
    return x >= epsilon ? RunClass::Tracking : RunClass::Tipping;
}

TippingReport locate_tipping(const models::TransitionModel& model,
                             double rho_lo, double rho_hi, double tol,
                             double horizon, double epsilon,
                             const PullbackOptions& opt)
{
    if (!(rho_lo < rho_hi))
        throw BadBracket("rho bracket is empty or degenerate");
    if (!(tol > 0))
        throw BadBracket("bracket tolerance must be positive");

    TippingReport rep;
    rep.horizon = horizon;
    rep.epsilon = epsilon;

    const auto probe = [&](double rho) {
        const RunClass c = classify_run(model, rho, horizon, epsilon, opt);
        rep.rho_values.push_back(rho);
        rep.classifications.push_back(c);
        return c;
    };

    if (probe(rho_lo) != RunClass::Tracking)
        throw BadBracket("lower endpoint rho = " + std::to_string(rho_lo) +
                         " does not track");
    if (probe(rho_hi) != RunClass::Tipping)
        throw BadBracket("upper endpoint rho = " + std::to_string(rho_hi) +
                         " does not tip");

    double a = rho_lo, b = rho_hi;
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if (probe(mid) == RunClass::Tracking)
            a = mid;
        else
            b = mid;
    }
    rep.rho_lo = a;
    rep.rho_hi = b;
    return rep;
}

double finite_time_exponent(const odeint::ScalarField& f,
                            const odeint::Trajectory& traj,
                            double t0, double t1)
{
    if (t0 == t1)
        throw InvalidConfig("exponent window is empty");
    return odeint::integrate_along(traj, f.d1, t0, t1) / (t1 - t0);
}

} // namespace tippingscope::transition
