#include "tippingscope/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tippingscope::bifurcation {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// 7-point Gauss-Legendre nodes/weights on [-1,1]
constexpr double kGlNode[7] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
     0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double kGlWeight[7] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694,
    0.3818300505051189, 0.2797053914892767, 0.1294849661688697};

double gl7(const std::function<double(double)>& fn, double a, double b)
{
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < 7; ++k)
        acc += kGlWeight[k] * fn(mid + half * kGlNode[k]);
    return acc * half;
}

struct KernelResult {
    double integral_c = 0;    // ∫₀^H e^{−D(s)}·c(t+s) ds, D(s) = ∫₀^s d(t+l) dl
    double integral_one = 0;  // ∫₀^H e^{−D(s)} ds
    double decay = 1;         // e^{−D(H)}
    double c_sup = 0;         // sup |c| over the quadrature nodes
    double d_mean = 0;        // D(H)/H
};

// composite Gauss-Legendre evaluation of the exponential-kernel integrals;
// panels of width ≤ 0.5 with the kernel exponent re-integrated per node
KernelResult kernel_quadrature(const std::function<double(double)>& c,
                               const std::function<double(double)>& d,
                               double t, double horizon)
{
    const int n_panels = std::max(1, static_cast<int>(std::ceil(horizon / 0.5)));
    const double w = horizon / n_panels;

    KernelResult res;
    double big_d = 0.0;  // accumulated D at the current panel start
    for (int p = 0; p < n_panels; ++p) {
        const double p_lo = t + p * w;
        const double mid = p_lo + 0.5 * w, half = 0.5 * w;
        double panel_c = 0.0, panel_one = 0.0;
        for (int j = 0; j < 7; ++j) {
            const double s = mid + half * kGlNode[j];
            const double dj = big_d + gl7(d, p_lo, s);
            const double kern = std::exp(-dj);
            const double cv = c(s);
            res.c_sup = std::max(res.c_sup, std::fabs(cv));
            panel_c += kGlWeight[j] * kern * cv;
            panel_one += kGlWeight[j] * kern;
        }
        res.integral_c += panel_c * half;
        res.integral_one += panel_one * half;
        big_d += gl7(d, p_lo, p_lo + w);
    }
    res.decay = std::exp(-big_d);
    res.d_mean = big_d / horizon;
    return res;
}

// truncation horizon such that the kernel decays below 1e-13, from a sampled
// mean of d ahead of t
double auto_horizon(const std::function<double(double)>& d, double t)
{
    const double window = 100.0;
    const double d_bar = gl7(d, t, t + window) / window;  // coarse but adequate
    if (!(d_bar > 1e-6))
        throw NonDecayingKernel(
            "sampled mean of d is not positive; the improper integral of the "
            "linear family does not converge");
    return std::min(1e5, std::max(60.0, 30.2 / d_bar));
}

// golden-section minimization of fn on [a, b] down to x-tolerance
double golden_min(const std::function<double(double)>& fn, double a, double b,
                  double x_tol)
{
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = fn(x1), f2 = fn(x2);
    while (b - a > x_tol) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = fn(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = fn(x2);
        }
    }
    return 0.5 * (a + b);
}

// first root of fn on [lo, hi] located by uniform scan + bisection
double first_sign_change(const std::function<double(double)>& fn, double lo,
                         double hi, int n_scan, double tol)
{
    double prev = fn(lo);
    if (prev == 0.0)
        return lo;
    for (int i = 1; i <= n_scan; ++i) {
        const double x = lo + (hi - lo) * i / n_scan;
        const double cur = fn(x);
        if (cur == 0.0)
            return x;
        if ((prev > 0) != (cur > 0)) {
            double a = lo + (hi - lo) * (i - 1) / n_scan, b = x;
            const bool prev_pos = prev > 0;
            for (int k = 0; k < 200 && b - a > tol; ++k) {
                const double m = 0.5 * (a + b);
                const double fm = fn(m);
                if (fm == 0.0)
                    return m;
                if ((fm > 0) == prev_pos)
                    a = m;
                else
                    b = m;
            }
            return 0.5 * (a + b);
        }
        prev = cur;
    }
    throw NoBracket("no sign change on [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
}

} // namespace

// ---- linear family ----------------------------------------------------------

BoundedSolutionResult bounded_linear_solution(
    const std::function<double(double)>& c,
    const std::function<double(double)>& d,
    double lambda, double t, double horizon)
{
    if (horizon <= 0)
        horizon = auto_horizon(d, t);
    const KernelResult k = kernel_quadrature(c, d, t, horizon);
    if (k.decay > 1e-12)
        throw NonDecayingKernel(
            "kernel decayed only to " + std::to_string(k.decay) +
            " over the horizon; mean of d too small for a bounded solution");
    BoundedSolutionResult res;
    res.value = -(k.integral_c + lambda * k.integral_one);
    res.truncation_bound = k.decay * (k.c_sup + std::fabs(lambda)) / k.d_mean;
    return res;
}

MuPair compute_mu(const std::function<double(double)>& c,
                  const std::function<double(double)>& d,
                  int omega_grid, double horizon)
{
    if (omega_grid < 8)
        throw InvalidConfig("omega grid must have at least 8 points");
    if (horizon <= 0)
        horizon = auto_horizon(d, 0.0);

    // ratio whose extrema over the phase give −μ₋ (min) and −μ⁺ (max)
    const auto ratio = [&](double omega) {
        const KernelResult k = kernel_quadrature(c, d, omega, horizon);
        if (k.decay > 1e-12)
            throw NonDecayingKernel("kernel failed to decay over the horizon");
        return k.integral_c / k.integral_one;
    };

    int j_min = 0, j_max = 0;
    std::vector<double> values(omega_grid);
    for (int j = 0; j < omega_grid; ++j) {
        values[j] = ratio(kTwoPi * j / omega_grid);
        if (values[j] < values[j_min]) j_min = j;
        if (values[j] > values[j_max]) j_max = j;
    }

    // refine both extrema inside their neighbor brackets (wrapping allowed:
    // the ratio is 2π-periodic for periodic coefficients)
    const double step = kTwoPi / omega_grid;
    const double om_min = golden_min(
        ratio, kTwoPi * j_min / omega_grid - step,
        kTwoPi * j_min / omega_grid + step, 1e-5);
    const double om_max = golden_min(
        [&](double om) { return -ratio(om); },
        kTwoPi * j_max / omega_grid - step,
        kTwoPi * j_max / omega_grid + step, 1e-5);

    MuPair mu;
    mu.method = MuMethod::Quadrature;
    mu.mu_minus = -ratio(om_min);
    mu.mu_plus = -ratio(om_max);
    return mu;
}

MuPair mu_closed_form_cosine(double d)
{
    if (!(d > 0))
        throw InvalidConfig("closed form requires constant d > 0");
    const double v = d / std::sqrt(d * d + 1.0);
    return {v, -v, MuMethod::ClosedFormCosine};
}

// ---- split-family saddle-node values ----------------------------------------

namespace {

std::size_t split_count(const models::PeriodicModel& family, models::Split which,
                        double lambda, const poincare::PoincareOptions& opt)
{
    poincare::PoincareOptions o = opt;
    o.expect_concave_or_convex = true;
    return poincare::find_fixed_points(family.split_field(which, lambda), o).count();
}

} // namespace

LambdaPair find_lambda_pair(const models::PeriodicModel& family,
                            double lambda_lo, double lambda_hi, double tol,
                            const poincare::PoincareOptions& opt)
{
    if (!(lambda_lo < lambda_hi) || !(tol > 0))
        throw BadBracket("lambda search interval is empty");

    // concave-linear side: counts step 0 → 2 as λ increases through λ₋
    const std::size_t minus_lo = split_count(family, models::Split::Minus, lambda_lo, opt);
    const std::size_t minus_hi = split_count(family, models::Split::Minus, lambda_hi, opt);
    if (minus_lo != 0 || minus_hi < 2)
        throw BadBracket("concave-linear family: expected 0 fixed points at the "
                         "lower end and 2 at the upper end, got " +
                         std::to_string(minus_lo) + " and " + std::to_string(minus_hi));
    double a = lambda_lo, b = lambda_hi;
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if (split_count(family, models::Split::Minus, mid, opt) >= 1)
            b = mid;
        else
            a = mid;
    }
    LambdaPair pair;
    pair.lambda_minus = 0.5 * (a + b);
    pair.bracket_width = b - a;

    // linear-convex side: counts step 2 → 0 as λ increases through λ⁺
    const std::size_t plus_lo = split_count(family, models::Split::Plus, lambda_lo, opt);
    const std::size_t plus_hi = split_count(family, models::Split::Plus, lambda_hi, opt);
    if (plus_lo < 2 || plus_hi != 0)
        throw BadBracket("linear-convex family: expected 2 fixed points at the "
                         "lower end and 0 at the upper end, got " +
                         std::to_string(plus_lo) + " and " + std::to_string(plus_hi));
    a = lambda_lo;
    b = lambda_hi;
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if (split_count(family, models::Split::Plus, mid, opt) >= 1)
            a = mid;
        else
            b = mid;
    }
    pair.lambda_plus = 0.5 * (a + b);
    pair.bracket_width = std::max(pair.bracket_width, b - a);
    return pair;
}

OrderResult classify_order(const models::PeriodicModel& family,
                           const poincare::PoincareOptions& opt)
{
    family.validate();
    const double phase = family.phase;
    const auto c = [phase](double t) { return std::cos(t + phase); };
    const auto d = [dd = family.d](double) { return dd; };

    OrderResult res;
    res.mu = compute_mu(c, d);

    OrderEvidence& ev = res.evidence;
    ev.minus_at_mu_plus = split_count(family, models::Split::Minus, res.mu.mu_plus, opt);
    ev.plus_at_mu_minus = split_count(family, models::Split::Plus, res.mu.mu_minus, opt);

    const auto ambiguous = [&]() -> AmbiguousOrder {
        return AmbiguousOrder(
            "fixed-point counts do not match any admissible ordering: "
            "minus@mu_plus=" + std::to_string(ev.minus_at_mu_plus) +
            ", plus@mu_minus=" + std::to_string(ev.plus_at_mu_minus) +
            ", minus@0=" + std::to_string(ev.minus_at_zero) +
            ", plus@0=" + std::to_string(ev.plus_at_zero));
    };

    if (ev.minus_at_mu_plus == 2 && ev.plus_at_mu_minus == 2)
        res.order = OrderCase::O1;
    else if (ev.minus_at_mu_plus == 0 && ev.plus_at_mu_minus == 2)
        res.order = OrderCase::O2;
    else if (ev.minus_at_mu_plus == 2 && ev.plus_at_mu_minus == 0)
        res.order = OrderCase::O3;
    else if (ev.minus_at_mu_plus == 0 && ev.plus_at_mu_minus == 0) {
        // both auxiliary maps lose their fixed points between the μ values;
        // the counts at λ = 0 separate the remaining two orderings
        ev.minus_at_zero = split_count(family, models::Split::Minus, 0.0, opt);
        ev.plus_at_zero = split_count(family, models::Split::Plus, 0.0, opt);
        if (ev.minus_at_zero == 2 && ev.plus_at_zero == 2)
            res.order = OrderCase::O4;
        else if (ev.minus_at_zero == 0 && ev.plus_at_zero == 0)
            res.order = OrderCase::O5;
        else
            throw ambiguous();
    } else {
        throw ambiguous();
    }
    return res;
}

// ---- inflection curve --------------------------------------------------------

namespace {

// root of the second derivative of a field at one phase on (y_lo, y_hi]
double curvature_root(const odeint::ScalarField& field, double omega,
                      double y_lo, double y_hi, int n_scan)
{
    if (!field.d2)
        throw InvalidConfig("field supplies no second derivative");
    const auto h_yy = [&](double y) { return field.d2(omega, y); };
    return first_sign_change(h_yy, y_lo, y_hi, n_scan, 1e-10);
}

} // namespace

std::vector<InflectionPoint> inflection_curve(
    const models::AlleePredationModel& model,
    const std::vector<double>& omega_grid, double y_max)
{
    model.validate();
    std::vector<InflectionPoint> curve;
    curve.reserve(omega_grid.size());
    for (const double omega : omega_grid) {
        InflectionPoint pt;
        pt.omega = omega;
        try {
            // start the scan just above 0: h_yy(ω,0) is a valid sample but the
            // root of interest lies strictly inside (0, y_max]
            pt.b = curvature_root(model.frozen_field(omega), omega, 0.0,
                                  y_max, 400);
            pt.h_y = model.rhs_y(omega, pt.b);
            pt.h_yyy = model.rhs_yyy(omega, pt.b);
            pt.ok = true;
        } catch (const NoBracket&) {
            pt.ok = false;
        }
        curve.push_back(pt);
    }
    return curve;
}

std::vector<InflectionPoint> inflection_curve(
    const odeint::ScalarField& h,
    const std::vector<double>& omega_grid, double y_max)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<InflectionPoint> curve;
    curve.reserve(omega_grid.size());
    for (const double omega : omega_grid) {
        InflectionPoint pt;
        pt.omega = omega;
        try {
            pt.b = curvature_root(h, omega, 0.0, y_max, 400);
            pt.h_y = h.d1 ? h.d1(omega, pt.b) : nan;
            pt.h_yyy = h.d3 ? h.d3(omega, pt.b) : nan;
            pt.ok = true;
        } catch (const NoBracket&) {
            pt.ok = false;
        }
        curve.push_back(pt);
    }
    return curve;
}

PivotCurve inflection_pivot(const models::AlleePredationModel& model,
                            const models::DriverOrbit& driver, double y_max)
{
    model.validate();
    const double C = driver.offset();
    const auto omega_at = [C](double t) { return kPi + 2.0 * std::atan(t + C); };
    const auto solve_b = [model, y_max](double omega) {
        return curvature_root(model.frozen_field(omega), omega, 0.0, y_max,
                              400);
    };

    PivotCurve pivot;
    pivot.value = [omega_at, solve_b](double t) { return solve_b(omega_at(t)); };
    pivot.derivative = [model, omega_at, solve_b, C](double t) {
        const double omega = omega_at(t);
        const double b = solve_b(omega);
        // implicit function theorem on h_yy(ω, 𝔟(ω)) = 0, then the chain rule
        // through the driver
        const double b_dot = -model.rhs_yy_omega(omega, b) / model.rhs_yyy(omega, b);
        const double u = t + C;
        return b_dot * 2.0 / (1.0 + u * u);
    };
    return pivot;
}

// ---- frozen-slice classification ---------------------------------------------

RegionClass classify_region(const odeint::ScalarField& frozen, double y_max,
                            int n_probe)
{
    if (!frozen.d2 || !frozen.d3)
        throw InvalidConfig("classify_region needs second and third derivatives");
    if (!(y_max > 0) || n_probe < 64)
        throw InvalidConfig("probe interval or resolution too small");

    std::vector<double> h(n_probe + 1);
    double h_scale = 0.0;
    for (int i = 0; i <= n_probe; ++i) {
        h[i] = frozen.rhs(0.0, y_max * i / n_probe);
        h_scale = std::max(h_scale, std::fabs(h[i]));
    }

    RegionClass rc;

    // roots: exact zeros at nodes plus sign changes between nonzero nodes;
    // consecutive zero nodes collapse into one root
    int last_sign = 0;
    bool prev_zero = false;
    for (int i = 0; i <= n_probe; ++i) {
        const int s = h[i] > 0 ? 1 : (h[i] < 0 ? -1 : 0);
        if (s == 0) {
            if (!prev_zero)
                ++rc.n_roots;
            prev_zero = true;
            last_sign = 0;
            continue;
        }
        prev_zero = false;
        if (last_sign != 0 && s != last_sign)
            ++rc.n_roots;
        last_sign = s;
    }

    // tangency guard: a local extremum that grazes zero without crossing
    for (int i = 1; i < n_probe; ++i) {
        if (h[i] == 0.0 || h[i - 1] == 0.0 || h[i + 1] == 0.0)
            continue;
        const int s = h[i] > 0 ? 1 : -1;
        if ((h[i - 1] > 0) != (h[i] > 0) || (h[i + 1] > 0) != (h[i] > 0))
            continue;  // handled as a crossing
        const bool dip = s * h[i] <= s * h[i - 1] && s * h[i] <= s * h[i + 1];
        if (dip && std::fabs(h[i]) < 1e-6 * h_scale) {
            // refine the extremum before deciding it grazes zero
            double a = y_max * (i - 1) / n_probe, b = y_max * (i + 1) / n_probe;
            for (int k = 0; k < 120 && b - a > 1e-12 * y_max; ++k) {
                const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
                if (s * frozen.rhs(0.0, m1) > s * frozen.rhs(0.0, m2))
                    a = m1;
                else
                    b = m2;
            }
            if (std::fabs(frozen.rhs(0.0, 0.5 * (a + b))) < 1e-9 * h_scale)
                rc.near_degenerate = true;
        }
    }

    // concavity change: exactly one sign flip of h_yy, positive to negative
    int flips = 0, first_dir = 0, prev = 0;
    for (int i = 0; i <= n_probe; ++i) {
        const double v = frozen.d2(0.0, y_max * i / n_probe);
        const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
        if (s == 0)
            continue;
        if (prev != 0 && s != prev) {
            ++flips;
            if (flips == 1)
                first_dir = s;
        }
        prev = s;
    }
    rc.concave_convex = (flips == 1 && first_dir == -1);

    // d-concavity: h_yyy ≤ 0 throughout the probe interval
    rc.d_concave = true;
    for (int i = 0; i <= n_probe && rc.d_concave; ++i)
        if (frozen.d3(0.0, y_max * i / n_probe) > 0)
            rc.d_concave = false;

    return rc;
}

// ---- d-concavity band ---------------------------------------------------------

namespace {

// largest |x| ≤ x_max such that pred holds at every sample of (0, x] signed by
// `direction`; the first failing sample is refined by bisection
double band_edge(const std::function<bool(double)>& pred, double direction,
                 double x_max, int n_scan)
{
    for (int k = 1; k <= n_scan; ++k) {
        const double x = direction * x_max * k / n_scan;
        if (!pred(x)) {
            double ok = direction * x_max * (k - 1) / n_scan;  // pred holds here (or x=0)
            double bad = x;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (ok + bad);
                if (pred(mid))
                    ok = mid;
                else
                    bad = mid;
            }
            return ok;
        }
    }
    return direction * x_max;
}

} // namespace

DConcavityBand dconcavity_band(const models::Decomposition& dec,
                               const std::vector<double>& omega_grid,
                               double x_max)
{
    if (!dec.g_xxx)
        throw InvalidConfig("d-concavity band needs the third derivative of g");
    if (!(x_max > 0))
        throw InvalidConfig("x_max must be positive");

    constexpr int kScan = 1024;
    constexpr double kStrictMargin = 1e-12;

    DConcavityBand band;
    band.omega_grid = omega_grid;
    for (const double omega : omega_grid) {
        const auto loose = [&](double x) { return dec.g_xxx(omega, x) <= 0.0; };
        const auto strict = [&](double x) {
            return dec.g_xxx(omega, x) <= -kStrictMargin;
        };
        // the loose band must contain 0: check the center sample explicitly
        if (!loose(0.0)) {
            band.alpha.push_back(0.0);
            band.beta.push_back(0.0);
            band.alpha_star.push_back(0.0);
            band.beta_star.push_back(0.0);
            continue;
        }
        band.beta.push_back(band_edge(loose, +1.0, x_max, kScan));
        band.alpha.push_back(band_edge(loose, -1.0, x_max, kScan));
        band.beta_star.push_back(band_edge(strict, +1.0, x_max, kScan));
        band.alpha_star.push_back(band_edge(strict, -1.0, x_max, kScan));
    }
    return band;
}

} // namespace tippingscope::bifurcation
