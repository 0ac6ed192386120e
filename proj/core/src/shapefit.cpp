#include "tippingscope/shapefit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tippingscope::shapefit {

namespace {

// index of the piece containing x: the last k with breaks[k] <= x, clamped so
// evaluation slightly outside the breakpoint range extrapolates the end pieces
std::size_t piece_index(const std::vector<double>& breaks, double x)
{
    if (x <= breaks.front())
        return 0;
    const std::size_t n_pieces = breaks.size() - 1;
    std::size_t k = std::upper_bound(breaks.begin(), breaks.end(), x) - breaks.begin();
    k -= 1;
    return std::min(k, n_pieces - 1);
}

} // namespace

double PiecewiseCubic::eval(double x) const
{
    const std::size_t k = piece_index(breaks, x);
    const double u = x - breaks[k];
    const auto& c = coef[k];
    return c[0] + u * (c[1] + u * (c[2] + u * c[3]));
}

double PiecewiseCubic::deriv(double x) const
{
    const std::size_t k = piece_index(breaks, x);
    const double u = x - breaks[k];
    const auto& c = coef[k];
    return c[1] + u * (2.0 * c[2] + 3.0 * c[3] * u);
}

double PiecewiseCubic::deriv2(double x) const
{
    const std::size_t k = piece_index(breaks, x);
    const double u = x - breaks[k];
    const auto& c = coef[k];
    return 2.0 * c[2] + 6.0 * c[3] * u;
}

double SplineBasis::M(int i, double t) const
{
    if (i <= 0 || i >= size())
        throw OutOfRange("basis index " + std::to_string(i) +
                         " has no curvature profile");
    if (t <= knots.front())
        return m_at_knots[i].front();
    if (t >= knots.back())
        return m_at_knots[i].back();
    const std::size_t k = piece_index(knots, t);
    const double w = (t - knots[k]) / (knots[k + 1] - knots[k]);
    return (1.0 - w) * m_at_knots[i][k] + w * m_at_knots[i][k + 1];
}

SplineBasis build_basis(double a, double b, int m, int n)
{
    if (!(0 < a && a < b))
        throw InvalidGeometry("inflection point must satisfy 0 < a < b");
    if (m < 0 || n < 0)
        throw InvalidGeometry("interior knot counts must be nonnegative");

    SplineBasis s;
    s.a = a;
    s.b = b;
    s.m = m;
    s.n = n;

    const double h = a / (m + 1);
    const double ht = (b - a) / (n + 1);
    const int n_knots = m + n + 3;
    s.knots.resize(n_knots);
    for (int i = 0; i <= m + 1; ++i)
        s.knots[i] = i * h;
    s.knots[m + 1] = a;  // exact, not (m+1)·h
    for (int j = 1; j <= n + 1; ++j)
        s.knots[m + 1 + j] = a + j * ht;
    s.knots[m + n + 2] = b;

    // curvature profiles: piecewise linear between knots, pinned by one value
    //   C₁: boundary wedge 2/h at t₀          (area +1 over [t₀, t₁])
    //   C_i, 2 ≤ i ≤ m+1: hat 1/h at t_{i−1}  (area +1 over two intervals)
    //   C_i, m+2 ≤ i ≤ m+n+1: hat −1/h̃ at t_i (area −1)
    //   C_{m+n+2}: boundary wedge −2/h̃ at b   (area −1)
    const int p = s.size();
    s.m_at_knots.assign(p, std::vector<double>(n_knots, 0.0));
    s.m_at_knots[1][0] = 2.0 / h;
    for (int i = 2; i <= m + 1; ++i)
        s.m_at_knots[i][i - 1] = 1.0 / h;
    for (int i = m + 2; i <= m + n + 1; ++i)
        s.m_at_knots[i][i] = -1.0 / ht;
    s.m_at_knots[m + n + 2][m + n + 2] = -2.0 / ht;

    // double integration: with M linear on each interval, C is the exact cubic
    // c0 + c1·u + (M₀/2)u² + (ΔM/Δt/6)u³ where c0, c1 carry the running
    // value and first integral across intervals
    s.C.resize(p);
    for (int i = 0; i < p; ++i) {
        PiecewiseCubic pc;
        pc.breaks = s.knots;
        pc.coef.resize(n_knots - 1);
        if (i == 0) {
            // C₀(x) = x
            for (int k = 0; k + 1 < n_knots; ++k)
                pc.coef[k] = {s.knots[k], 1.0, 0.0, 0.0};
        } else {
            double value = 0.0, first = 0.0;
            for (int k = 0; k + 1 < n_knots; ++k) {
                const double dx = s.knots[k + 1] - s.knots[k];
                const double m0 = s.m_at_knots[i][k];
                const double slope = (s.m_at_knots[i][k + 1] - m0) / dx;
                pc.coef[k] = {value, first, m0 / 2.0, slope / 6.0};
                value += first * dx + m0 * dx * dx / 2.0 + slope * dx * dx * dx / 6.0;
                first += m0 * dx + slope * dx * dx / 2.0;
            }
        }
        s.C[i] = std::move(pc);
    }
    return s;
}

GrowthDataset ingest_generations(
    const std::vector<std::pair<double, double>>& rows)
{
    GrowthDataset data;
    for (const auto& [p_t, p_t1] : rows) {
        if (!(p_t > 0))
            throw NonPositiveCurrentGeneration(
                "current generation must be positive, got " +
                std::to_string(p_t));
        if (p_t1 < 0)
            throw OutOfRange("next generation cannot be negative, got " +
                             std::to_string(p_t1));
        if (p_t1 == 0) {
            ++data.excluded_rows;  // extinction carries no finite growth rate
            continue;
        }
        data.x.push_back(p_t);
        data.y.push_back(p_t * std::log(p_t1 / p_t));
    }
    return data;
}

double SplineFit::eval(double x) const
{
    if (x < 0.0 || x > basis.b)
        throw OutOfDomain("x = " + std::to_string(x) +
                          " is outside the spline domain [0, " +
                          std::to_string(basis.b) + "]");
    return theta.eval(x);
}

double SplineFit::deriv(double x) const
{
    if (x < 0.0 || x > basis.b)
        throw OutOfDomain("x is outside the spline domain");
    return theta.deriv(x);
}

double SplineFit::deriv2(double x) const
{
    if (x < 0.0 || x > basis.b)
        throw OutOfDomain("x is outside the spline domain");
    return theta.deriv2(x);
}

SplineFit fit(const SplineBasis& basis, const GrowthDataset& data, double lb)
{
    const int p = basis.size();
    const std::size_t n_rows = data.x.size();
    if (n_rows != data.y.size())
        throw InvalidConfig("dataset has mismatched x/y lengths");
    if (static_cast<int>(n_rows) < p)
        throw RankDeficient("need at least " + std::to_string(p) +
                            " data points for " + std::to_string(p) +
                            " coefficients, got " + std::to_string(n_rows));

    // canonical row order makes the fit invariant under input permutation,
    // bit for bit: summation order in the normal equations is fixed
    std::vector<std::size_t> order(n_rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (data.x[i] != data.x[j])
            return data.x[i] < data.x[j];
        return data.y[i] < data.y[j];
    });

    Eigen::MatrixXd A(n_rows, p);
    Eigen::VectorXd y(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const double xi = data.x[order[r]];
        if (xi < 0.0 || xi > basis.b)
            throw OutOfDomain("data point x = " + std::to_string(xi) +
                              " lies outside [0, " + std::to_string(basis.b) + "]");
        for (int j = 0; j < p; ++j)
            A(r, j) = basis.C[j].eval(xi);
        y(r) = data.y[order[r]];
    }

    if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(A).rank() < p)
        throw RankDeficient("design matrix is rank deficient: data do not "
                            "determine all " + std::to_string(p) +
                            " coefficients");

    // shift the bound to zero: β_i = α_i − lb for i ≥ 1, β₀ = α₀ free
    Eigen::VectorXd y_shift = y;
    if (lb != 0.0)
        y_shift -= lb * A.rightCols(p - 1).rowwise().sum();

    // Lawson-Hanson with index 0 permanently passive (unconstrained)
    std::vector<char> passive(p, 0);
    passive[0] = 1;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);

    const auto solve_passive = [&]() {
        int n_passive = 0;
        for (int j = 0; j < p; ++j)
            n_passive += passive[j];
        Eigen::MatrixXd Ap(n_rows, n_passive);
        int col = 0;
        for (int j = 0; j < p; ++j)
            if (passive[j])
                Ap.col(col++) = A.col(j);
        const Eigen::VectorXd sol = Ap.colPivHouseholderQr().solve(y_shift);
        Eigen::VectorXd full = Eigen::VectorXd::Zero(p);
        col = 0;
        for (int j = 0; j < p; ++j)
            if (passive[j])
                full(j) = sol(col++);
        return full;
    };

    beta = solve_passive();
    const double w_scale = (A.transpose() * y_shift).cwiseAbs().maxCoeff();
    const double w_tol = 1e-10 * std::max(1.0, w_scale);

    for (int outer = 0; outer < 3 * p + 10; ++outer) {
        const Eigen::VectorXd w = A.transpose() * (y_shift - A * beta);
        int entering = -1;
        double best = w_tol;
        for (int j = 1; j < p; ++j)
            if (!passive[j] && w(j) > best) {
                best = w(j);
                entering = j;
            }
        if (entering < 0)
            break;  // KKT satisfied: all bound gradients push into the bound
        passive[entering] = 1;

        for (int inner = 0; inner < p + 5; ++inner) {
            const Eigen::VectorXd trial = solve_passive();
            double step = 1.0;
            bool blocked = false;
            for (int j = 1; j < p; ++j)
                if (passive[j] && trial(j) <= 0.0) {
                    const double frac = beta(j) / (beta(j) - trial(j));
                    step = std::min(step, frac);
                    blocked = true;
                }
            if (!blocked) {
                beta = trial;
                break;
            }
            beta += step * (trial - beta);
            const double scale = std::max(1.0, beta.cwiseAbs().maxCoeff());
            for (int j = 1; j < p; ++j)
                if (passive[j] && beta(j) <= 1e-12 * scale) {
                    passive[j] = 0;
                    beta(j) = 0.0;
                }
        }
    }

    SplineFit out;
    out.basis = basis;
    out.lb = lb;
    out.alpha.resize(p);
    out.alpha[0] = beta(0);
    for (int j = 1; j < p; ++j) {
        out.alpha[j] = beta(j) + lb;
        if (beta(j) == 0.0)
            out.active_set.push_back(j);
    }

    Eigen::VectorXd alpha_vec(p);
    for (int j = 0; j < p; ++j)
        alpha_vec(j) = out.alpha[j];
    out.sse = (y - A * alpha_vec).squaredNorm();

    // assemble θ = Σ α_i C_i piece by piece so later evaluations are cheap
    const std::size_t n_pieces = basis.knots.size() - 1;
    out.theta.breaks = basis.knots;
    out.theta.coef.assign(n_pieces, {0.0, 0.0, 0.0, 0.0});
    for (int j = 0; j < p; ++j)
        for (std::size_t k = 0; k < n_pieces; ++k)
            for (int c = 0; c < 4; ++c)
                out.theta.coef[k][c] += out.alpha[j] * basis.C[j].coef[k][c];
    return out;
}

std::vector<double> spline_roots(const SplineFit& fit)
{
    const double b = fit.basis.b;
    const int n_scan = 1000;
    std::vector<double> roots;
    double prev_x = b / n_scan;
    double prev = fit.theta.eval(prev_x);
    if (prev == 0.0)
        roots.push_back(prev_x);
    for (int i = 2; i <= n_scan; ++i) {
        const double x = b * i / n_scan;
        const double cur = fit.theta.eval(x);
        if (cur == 0.0) {
            roots.push_back(x);
        } else if (prev != 0.0 && (prev > 0) != (cur > 0)) {
            double lo = prev_x, hi = x;
            const bool lo_pos = prev > 0;
            for (int k = 0; k < 200 && hi - lo > 1e-10; ++k) {
                const double mid = 0.5 * (lo + hi);
                const double fm = fit.theta.eval(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if ((fm > 0) == lo_pos)
                    lo = mid;
                else
                    hi = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev = cur;
        prev_x = x;
    }
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double u, double v) { return std::fabs(u - v) < 1e-8; }),
                roots.end());
    return roots;
}

std::optional<double> allee_threshold(const std::vector<double>& roots)
{
    // with the structural root at 0 the spline has three roots exactly when
    // two positive crossings exist; the middle of the three is the first
    if (roots.size() == 2)
        return roots.front();
    return std::nullopt;
}

} // namespace tippingscope::shapefit
