// Microbenchmarks for the hot numerical kernels: one period of integration,
// the period map and its derivative, fixed-point location, the bounded
// linear solution, threshold quadrature, frozen-slice classification, and
// the shape-constrained fit.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "tippingscope/bifurcation.hpp"
#include "tippingscope/models.hpp"
#include "tippingscope/odeint.hpp"
#include "tippingscope/poincare.hpp"
#include "tippingscope/shapefit.hpp"
#include "tippingscope/transition.hpp"

using namespace tippingscope;

namespace {

models::PeriodicModel reference_periodic()
{
    models::PeriodicModel pm;
    pm.g_minus = 0.005;
    return pm;
}

void bm_integrate_period(benchmark::State& state)
{
    const auto f = reference_periodic().split_field(models::Split::Minus,
                                                    -0.0995);
    for (auto _ : state) {
        const auto traj = odeint::integrate(f, 0.0, 2.0, 2.0 * M_PI);
        benchmark::DoNotOptimize(traj.x_final);
    }
}
BENCHMARK(bm_integrate_period);

void bm_period_map(benchmark::State& state)
{
    const auto f = reference_periodic().split_field(models::Split::Minus,
                                                    -0.0995);
    for (auto _ : state) {
        const auto v = poincare::period_map(f, 2.0);
        benchmark::DoNotOptimize(v.value);
    }
}
BENCHMARK(bm_period_map);

void bm_period_map_derivative(benchmark::State& state)
{
    const auto f = reference_periodic().split_field(models::Split::Minus,
                                                    -0.0995);
    for (auto _ : state) {
        const double m = poincare::period_map_derivative(f, 2.0);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(bm_period_map_derivative);

void bm_find_fixed_points(benchmark::State& state)
{
    const auto f = reference_periodic().split_field(models::Split::Minus,
                                                    -0.0995);
    poincare::PoincareOptions opt;
    opt.expect_concave_or_convex = true;
    for (auto _ : state) {
        const auto fps = poincare::find_fixed_points(f, opt);
        benchmark::DoNotOptimize(fps.points.size());
    }
}
BENCHMARK(bm_find_fixed_points);

void bm_bounded_linear_solution(benchmark::State& state)
{
    const auto c = [](double t) { return std::cos(t); };
    const auto d = [](double) { return 0.1; };
    for (auto _ : state) {
        const auto r = bifurcation::bounded_linear_solution(c, d, 0.05, 0.0);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(bm_bounded_linear_solution);

void bm_compute_mu(benchmark::State& state)
{
    const auto c = [](double t) { return std::cos(t); };
    const auto d = [](double) { return 0.1; };
    for (auto _ : state) {
        const auto mu = bifurcation::compute_mu(c, d);
        benchmark::DoNotOptimize(mu.mu_minus);
    }
}
BENCHMARK(bm_compute_mu);

void bm_classify_region(benchmark::State& state)
{
    models::AlleePredationModel am;
    const auto frozen = am.field_at(39.3, 39.2);
    for (auto _ : state) {
        const auto rc = bifurcation::classify_region(frozen);
        benchmark::DoNotOptimize(rc.n_roots);
    }
}
BENCHMARK(bm_classify_region);

void bm_classify_run(benchmark::State& state)
{
    models::TransitionModel tm;
    for (auto _ : state) {
        const auto rc = transition::classify_run(tm, 0.28, 1e4, 1e-3);
        benchmark::DoNotOptimize(rc == transition::RunClass::Tracking);
    }
}
BENCHMARK(bm_classify_run);

void bm_build_basis(benchmark::State& state)
{
    for (auto _ : state) {
        const auto basis = shapefit::build_basis(2.0, 10.0, 1, 2);
        benchmark::DoNotOptimize(basis.size());
    }
}
BENCHMARK(bm_build_basis);

void bm_fit_200_points(benchmark::State& state)
{
    const auto basis = shapefit::build_basis(2.0, 10.0, 1, 2);
    const std::vector<double> alpha{-1.0, 1.2, 0.4, 1.0, 1.0, 1.0};
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> xs(0.05, 10.0);
    std::normal_distribution<double> noise(0.0, 0.1);
    shapefit::GrowthDataset data;
    for (int j = 0; j < 200; ++j) {
        const double x = xs(gen);
        double y = 0.0;
        for (int i = 0; i < basis.size(); ++i)
            y += alpha[i] * basis.C[i].eval(x);
        data.x.push_back(x);
        data.y.push_back(y + noise(gen));
    }
    for (auto _ : state) {
        const auto fit = shapefit::fit(basis, data);
        benchmark::DoNotOptimize(fit.sse);
    }
}
BENCHMARK(bm_fit_200_points);

}  // namespace

BENCHMARK_MAIN();
