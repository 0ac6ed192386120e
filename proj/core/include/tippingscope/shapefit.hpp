#pragma once
#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace tippingscope::shapefit {

/// Piecewise cubic with breakpoints, evaluated in the local variable
/// u = x − breaks[k]:  c0 + c1·u + c2·u² + c3·u³ on piece k.
struct PiecewiseCubic {
    std::vector<double> breaks;               ///< ascending, breaks.front() = 0
    std::vector<std::array<double, 4>> coef;  ///< one row per piece

    double eval(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;
};

/// Concave-convex cubic spline basis on [0, b] with inflection at a:
/// basis functions C₀(x) = x and C_i(x) = ∫₀ˣ∫₀ʸ M_i(t) dt dy, where the
/// M_i are piecewise-linear bumps — nonnegative with unit integral on the
/// convex side [0, a], nonpositive with integral −1 on the concave side
/// [a, b].  Any combination with nonnegative coefficients on i ≥ 1 is
/// convex on [0, a] and concave on [a, b].
struct SplineBasis {
    double a = 0, b = 0;
    int m = 0, n = 0;
    std::vector<double> knots;        ///< t₀ … t_{m+n+2}, t_{m+1} = a, last = b
    std::vector<PiecewiseCubic> C;    ///< C₀ … C_{m+n+2} as exact cubics

    int size() const { return m + n + 3; }
    /// Second derivative M_i(t) of basis function i ≥ 1 (piecewise linear).
    double M(int i, double t) const;

private:
    std::vector<std::vector<double>> m_at_knots;  ///< M_i values at the knots
    friend SplineBasis build_basis(double a, double b, int m, int n);
};

/// Builds the knot sequence t_i = i·h on [0,a] (h = a/(m+1)) and
/// t_{m+1+j} = a + j·h̃ on [a,b] (h̃ = (b−a)/(n+1)), the hat profiles M_i,
/// and their exact double integrals C_i.  Throws InvalidGeometry unless
/// 0 < a < b, m ≥ 0, n ≥ 0.
SplineBasis build_basis(double a, double b, int m, int n);

/// Scatter data (population size, growth rate) for spline regression.
struct GrowthDataset {
    std::vector<double> x;  ///< population sizes, ≥ 0
    std::vector<double> y;  ///< growth rates
    int excluded_rows = 0;  ///< extinction rows dropped during ingestion
};

/// Transforms raw generation pairs (P_t, P_t1) into growth-rate points
/// (P_t, P_t·ln(P_t1/P_t)).  Rows with P_t1 = 0 (extinction) are dropped and
/// counted; P_t ≤ 0 throws NonPositiveCurrentGeneration.
GrowthDataset ingest_generations(
    const std::vector<std::pair<double, double>>& rows);

/// Result of the bounded-variable least-squares fit θ = Σ α_i C_i.
struct SplineFit {
    SplineBasis basis;
    std::vector<double> alpha;    ///< α₀ free; α_i ≥ lb for i ≥ 1
    double lb = 0;                ///< lower bound applied to i ≥ 1
    double sse = 0;               ///< sum of squared errors at the solution
    std::vector<int> active_set;  ///< indices i ≥ 1 held at the bound
    PiecewiseCubic theta;         ///< assembled spline, exact cubics

    double eval(double x) const;    ///< θ(x); throws OutOfDomain outside [0, b]
    double deriv(double x) const;
    double deriv2(double x) const;
};

/// Minimizes Σ_j (y_j − θ(x_j))² over α with α_i ≥ lb for i ≥ 1 and α₀
/// free, by a Lawson-Hanson active-set solve after shifting the bound to
/// zero.  Throws RankDeficient when the design matrix loses column rank.
SplineFit fit(const SplineBasis& basis, const GrowthDataset& data,
              double lb = 0.0);

/// Ascending roots of θ on (0, b] (x = 0 excluded: θ(0) = 0 always), by
/// sign-change scan on a 10³ grid refined by bisection to 1e-10.
std::vector<double> spline_roots(const SplineFit& fit);

/// The cooperation (Allee) threshold: the middle of the three roots of θ on
/// [0, b] — the structural root at 0 plus the two crossings returned by
/// spline_roots().  Takes the spline_roots() output and returns its first
/// element when it has exactly two, nullopt otherwise.
std::optional<double> allee_threshold(const std::vector<double>& roots);

} // namespace tippingscope::shapefit
