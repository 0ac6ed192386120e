#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <tippingscope/bifurcation.hpp>
#include <tippingscope/errors.hpp>
#include <tippingscope/models.hpp>
#include <tippingscope/odeint.hpp>
#include <tippingscope/parallel.hpp>
#include <tippingscope/poincare.hpp>
#include <tippingscope/shapefit.hpp>
#include <tippingscope/transition.hpp>

#include "common.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "report.hpp"
#include "svg.hpp"

namespace tippingscope::cli {

namespace {

// ---------------------------------------------------------------- plumbing

struct CommonOpts {
    std::string model_path;
    std::string out = "-";
    bool quiet = false;
    unsigned threads = 0;
};

void add_common(CLI::App* sub, CommonOpts& c, bool with_threads = false)
{
    sub->add_option("--model", c.model_path, "KEY=VALUE configuration file");
    sub->add_option("--out", c.out, "output path; '-' writes to stdout (default)");
    sub->add_flag("--quiet", c.quiet, "suppress notes and timing on stderr");
    if (with_threads)
        sub->add_option("--threads", c.threads,
                        "worker threads (default: TIPPINGSCOPE_THREADS, then hardware)");
}

void add_periodic(CLI::App* sub, PeriodicOverrides& ov)
{
    sub->add_option("--d", ov.d, "linear coefficient d > 0 [0.1]");
    sub->add_option("--g-minus", ov.g_minus, "cubic coefficient acting on x >= 0 [0]");
    sub->add_option("--g-plus", ov.g_plus, "cubic coefficient acting on x <= 0 [0]");
    sub->add_option("--lambda", ov.lambda, "additive parameter [0]");
}

void add_transition(CLI::App* sub, TransitionOverrides& ov)
{
    sub->add_option("--r", ov.r, "intrinsic growth rate [3]");
    sub->add_option("--S", ov.S, "cooperation threshold [0.3]");
    sub->add_option("--b", ov.b, "predator handling constant [620]");
    sub->add_option("--K0", ov.K0, "carrying-capacity mean [39.3]");
    sub->add_option("--K1", ov.K1, "carrying-capacity amplitude [1]");
    sub->add_option("--D0", ov.D0, "predation mean [39.2]");
    sub->add_option("--D1", ov.D1, "predation amplitude [1]");
    sub->add_option("--rho", ov.rho, "perturbation size >= 0 [0]");
    sub->add_option("--t-ref", ov.t_ref, "driver anchor time [-2e5]");
    sub->add_option("--omega-ref", ov.omega_ref, "driver anchor phase in (0, 2pi) [1e-5]");
}

Config load(const CommonOpts& c)
{
    return c.model_path.empty() ? Config{} : Config::from_file(c.model_path);
}

json periodic_snapshot(const models::PeriodicModel& m)
{
    return json{{"d", m.d}, {"g_minus", m.g_minus}, {"g_plus", m.g_plus}, {"lambda", m.lambda}};
}

json transition_snapshot(const models::TransitionModel& m)
{
    return json{{"r", m.base.r},   {"S", m.base.S},   {"b", m.base.b},
                {"K0", m.base.K0}, {"K1", m.base.K1}, {"D0", m.base.D0},
                {"D1", m.base.D1}, {"rho", m.rho},
                {"driver", json{{"t_ref", m.driver.t_ref}, {"omega_ref", m.driver.omega_ref}}}};
}

const char* stability_name(poincare::Stability s)
{
    switch (s) {
    case poincare::Stability::Attractive: return "attractive";
    case poincare::Stability::Repulsive: return "repulsive";
    default: return "neutral";
    }
}

const char* order_name(bifurcation::OrderCase c)
{
    switch (c) {
    case bifurcation::OrderCase::O1: return "O1";
    case bifurcation::OrderCase::O2: return "O2";
    case bifurcation::OrderCase::O3: return "O3";
    case bifurcation::OrderCase::O4: return "O4";
    default: return "O5";
    }
}

models::Split parse_split(const std::string& s)
{
    if (s == "minus")
        return models::Split::Minus;
    if (s == "plus")
        return models::Split::Plus;
    return models::Split::Full;
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = a + (b - a) * i / (n - 1);
    return v;
}

std::pair<double, double> parse_window(const std::string& s)
{
    const auto [lo, hi] = parse_pair(s, "--window");
    if (!(lo < hi))
        throw UsageError("--window: need lo < hi, got '" + s + "'");
    return {lo, hi};
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    CommonOpts c;
    std::string type;
    PeriodicOverrides p;
    TransitionOverrides t;
    double x0 = 8.0, t0 = 0.0, t1 = 100.0;
    double abs_tol = 1e-12, rel_tol = 1e-12;
    int samples = 1000;
    std::string csv, svg;
};

void run_simulate(const SimulateOpts& o)
{
    const Config cfg = load(o.c);
    const std::string type = resolve_model_type(cfg, o.type);
    if (o.t0 == o.t1)
        throw UsageError("simulate: --t1 must differ from --t0");

    RunReport rep;
    rep.command = "simulate";
    odeint::ScalarField f;
    json model_cfg;
    if (type == "periodic") {
        const auto m = resolve_periodic(cfg, o.p);
        f = m.field();
        model_cfg = periodic_snapshot(m);
    } else {
        const auto m = resolve_transition(cfg, o.t);
        f = m.field();
        model_cfg = transition_snapshot(m);
    }
    rep.config = json{{"model_type", type}, {"model", model_cfg},
                      {"x0", o.x0},         {"t0", o.t0},
                      {"t1", o.t1},         {"samples", o.samples},
                      {"abs_tol", o.abs_tol}, {"rel_tol", o.rel_tol}};

    odeint::IntegratorConfig icfg;
    icfg.abs_tol = o.abs_tol;
    icfg.rel_tol = o.rel_tol;
    const auto traj = odeint::integrate(f, o.t0, o.x0, o.t1, icfg);

    rep.result["status"] =
        traj.status == odeint::TrajectoryStatus::Completed ? "completed" : "blew_up";
    rep.result["t_final"] = traj.t_final;
    rep.result["x_final"] = traj.x_final;
    rep.result["segments"] = traj.segments.size();
    if (traj.status == odeint::TrajectoryStatus::BlewUp) {
        rep.result["t_escape"] = traj.t_escape;
        rep.result["escape_direction"] = traj.escape_direction;
        rep.warnings.push_back("the solution left the guard region before t1");
    }

    if ((!o.csv.empty() || !o.svg.empty()) && !traj.segments.empty()) {
        const auto ts = linspace(traj.t_start, traj.t_final, o.samples + 1);
        std::vector<double> xs(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i)
            xs[i] = traj.sample(ts[i]);
        if (!o.csv.empty()) {
            std::ostringstream body;
            body << "t,x\n";
            for (std::size_t i = 0; i < ts.size(); ++i)
                body << fmt(ts[i], 12) << ',' << fmt(xs[i], 12) << '\n';
            write_text(o.csv, body.str());
            rep.outputs.push_back(o.csv);
        }
        if (!o.svg.empty()) {
            write_text(o.svg, line_chart("simulated trajectory", "t", "x",
                                         {Series{"x(t)", ts, xs, false}}));
            rep.outputs.push_back(o.svg);
        }
    }
    emit_report(rep, o.c.out);
}

// ---------------------------------------------------------------- poincare

struct PoincareOpts {
    CommonOpts c;
    PeriodicOverrides p;
    std::string split = "full";
    std::string window = "-30,30";
    int n_scan = 200;
    double fp_tol = 1e-10, mult_tol = 1e-6;
    std::string svg;
};

void run_poincare(const PoincareOpts& o)
{
    const Config cfg = load(o.c);
    const auto m = resolve_periodic(cfg, o.p);
    const models::Split split = parse_split(o.split);
    const auto [lo, hi] = parse_window(o.window);

    poincare::PoincareOptions popt;
    popt.window_lo = lo;
    popt.window_hi = hi;
    popt.n_scan = o.n_scan;
    popt.fp_tol = o.fp_tol;
    popt.mult_tol = o.mult_tol;
    popt.expect_concave_or_convex = split != models::Split::Full;

    const auto f = m.split_field(split, m.lambda);
    const auto fps = poincare::find_fixed_points(f, popt);

    RunReport rep;
    rep.command = "poincare";
    rep.config = json{{"model", periodic_snapshot(m)}, {"split", o.split},
                      {"window", json::array({lo, hi})}, {"n_scan", o.n_scan},
                      {"fp_tol", o.fp_tol}, {"mult_tol", o.mult_tol}};
    json points = json::array();
    for (const auto& fp : fps.points)
        points.push_back(json{{"x", fp.x_star},
                              {"multiplier", fp.multiplier},
                              {"stability", stability_name(fp.stability)}});
    rep.result = json{{"count", fps.count()}, {"anomaly", fps.anomaly},
                      {"fixed_points", points}};
    if (fps.anomaly)
        rep.warnings.push_back("more than two fixed points found for a concave/convex split");

    if (!o.svg.empty()) {
        const auto xs = linspace(lo, hi, o.n_scan + 1);
        std::vector<double> txs, tys;
        for (double x : xs) {
            const auto mv = poincare::period_map(f, x, popt.integ);
            if (!mv.diverged) {
                txs.push_back(x);
                tys.push_back(mv.value);
            }
        }
        std::vector<Series> series{Series{"T(x)", txs, tys, false},
                                   Series{"identity", {lo, hi}, {lo, hi}, false}};
        Series marks{"fixed points", {}, {}, true};
        for (const auto& fp : fps.points) {
            marks.x.push_back(fp.x_star);
            marks.y.push_back(fp.x_star);
        }
        series.push_back(marks);
        write_text(o.svg, line_chart("period map vs identity", "x", "T(x)", series));
        rep.outputs.push_back(o.svg);
    }
    emit_report(rep, o.c.out);
}

// ---------------------------------------------------------------- mu

struct MuOpts {
    CommonOpts c;
    PeriodicOverrides p;
    std::string c_kind = "cosine";
    int omega_grid = 128;
    double horizon = 0.0;
};

void run_mu(const MuOpts& o)
{
    const Config cfg = load(o.c);
    if (o.c_kind != "cosine")
        throw UsageError("mu: only the cosine inhomogeneity is built in, got '" + o.c_kind + "'");
    const auto m = resolve_periodic(cfg, o.p);

    const auto quad = bifurcation::compute_mu([](double t) { return std::cos(t); },
                                              [d = m.d](double) { return d; },
                                              o.omega_grid, o.horizon);
    const auto closed = bifurcation::mu_closed_form_cosine(m.d);
    const double disagreement = std::max(std::abs(quad.mu_minus - closed.mu_minus),
                                         std::abs(quad.mu_plus - closed.mu_plus));

    RunReport rep;
    rep.command = "mu";
    rep.config = json{{"d", m.d}, {"c", o.c_kind}, {"omega_grid", o.omega_grid},
                      {"horizon", o.horizon == 0.0 ? json("auto") : json(o.horizon)}};
    rep.result = json{{"mu_minus", quad.mu_minus},
                      {"mu_plus", quad.mu_plus},
                      {"method", "quadrature"},
                      {"closed_form", json{{"mu_minus", closed.mu_minus},
                                           {"mu_plus", closed.mu_plus}}},
                      {"disagreement", disagreement}};
    emit_report(rep, o.c.out);
}

// ---------------------------------------------------------------- lambda

struct LambdaOpts {
    CommonOpts c;
    PeriodicOverrides p;
    double lo = -1.0, hi = 1.0, tol = 1e-8;
    std::string window = "-30,30";
    int n_scan = 200;
};

void run_lambda(const LambdaOpts& o)
{
    const Config cfg = load(o.c);
    const auto m = resolve_periodic(cfg, o.p);
    const auto [wlo, whi] = parse_window(o.window);

    poincare::PoincareOptions popt;
    popt.window_lo = wlo;
    popt.window_hi = whi;
    popt.n_scan = o.n_scan;

    const auto pair = bifurcation::find_lambda_pair(m, o.lo, o.hi, o.tol, popt);

    RunReport rep;
    rep.command = "lambda";
    rep.config = json{{"model", periodic_snapshot(m)},
                      {"bracket", json::array({o.lo, o.hi})},
                      {"tol", o.tol},
                      {"window", json::array({wlo, whi})},
                      {"n_scan", o.n_scan}};
    rep.result = json{{"lambda_minus", pair.lambda_minus},
                      {"lambda_plus", pair.lambda_plus},
                      {"bracket_width", pair.bracket_width}};
    emit_report(rep, o.c.out);
}

// ---------------------------------------------------------------- classify-order

struct OrderOpts {
    CommonOpts c;
    PeriodicOverrides p;
    std::string window = "-30,30";
    int n_scan = 200;
};

void run_classify_order(const OrderOpts& o)
{
    const Config cfg = load(o.c);
    const auto m = resolve_periodic(cfg, o.p);
    const auto [wlo, whi] = parse_window(o.window);

    poincare::PoincareOptions popt;
    popt.window_lo = wlo;
    popt.window_hi = whi;
    popt.n_scan = o.n_scan;

    const auto r = bifurcation::classify_order(m, popt);

    RunReport rep;
    rep.command = "classify-order";
    rep.config = json{{"model", periodic_snapshot(m)},
                      {"window", json::array({wlo, whi})},
                      {"n_scan", o.n_scan}};
    rep.result = json{{"case", order_name(r.order)},
                      {"evidence", json{{"minus_at_mu_plus", r.evidence.minus_at_mu_plus},
                                        {"plus_at_mu_minus", r.evidence.plus_at_mu_minus},
                                        {"minus_at_zero", r.evidence.minus_at_zero},
                                        {"plus_at_zero", r.evidence.plus_at_zero}}},
                      {"mu", json{{"mu_minus", r.mu.mu_minus}, {"mu_plus", r.mu.mu_plus}}}};
    emit_report(rep, o.c.out);
}

// ---------------------------------------------------------------- band

struct BandOpts {
    CommonOpts c;
    PeriodicOverrides p;
    double x_max = 30.0;
    int omega_grid = 64;
    std::string svg;
};

void run_band(const BandOpts& o)
{
    const Config cfg = load(o.c);
    const auto m = resolve_periodic(cfg, o.p);
    if (!(o.x_max > 0))
        throw UsageError("band: --x-max must be positive");

    std::vector<double> grid(o.omega_grid);
    for (int i = 0; i < o.omega_grid; ++i)
        grid[i] = 2.0 * M_PI * i / o.omega_grid;

    const auto band = bifurcation::dconcavity_band(m.decomposition(), grid, o.x_max);

    RunReport rep;
    rep.command = "band";
    rep.config = json{{"model", periodic_snapshot(m)}, {"x_max", o.x_max},
                      {"omega_grid", o.omega_grid}};
    rep.result = json{{"omega", band.omega_grid},
                      {"alpha", band.alpha},
                      {"alpha_star", band.alpha_star},
                      {"beta_star", band.beta_star},
                      {"beta", band.beta}};
    if (!o.svg.empty()) {
        write_text(o.svg, line_chart("d-concavity band edges", "omega", "x",
                                     {Series{"alpha", band.omega_grid, band.alpha, false},
                                      Series{"alpha*", band.omega_grid, band.alpha_star, false},
                                      Series{"beta*", band.omega_grid, band.beta_star, false},
                                      Series{"beta", band.omega_grid, band.beta, false}}));
        rep.outputs.push_back(o.svg);
    }
    emit_report(rep, o.c.out);
}

// ---------------------------------------------------------------- region-map

struct RegionMapOpts {
    CommonOpts c;
    TransitionOverrides t;
    std::string grid = "100x100";
    std::string k_range = "38.3,40.3";
    std::string delta_range = "38.2,40.2";
    std::string at;
    double y_max = 60.0;
    std::string json_path, svg;
};

json region_json(double K, double D, const bifurcation::RegionClass& rc)
{
    return json{{"K", K},
                {"Delta", D},
                {"n_roots", rc.n_roots},
                {"concave_convex", rc.concave_convex},
                {"d_concave", rc.d_concave},
                {"near_degenerate", rc.near_degenerate}};
}

void run_region_map(const RegionMapOpts& o)
{
    const Config cfg = load(o.c);
    const auto tm = resolve_transition(cfg, o.t);
    const auto& base = tm.base;

    RunReport rep;
    rep.command = "region-map";

    if (!o.at.empty()) {
        const auto [K, D] = parse_pair(o.at, "--at");
        const auto rc = bifurcation::classify_region(base.field_at(K, D), o.y_max);
        rep.config = json{{"model", transition_snapshot(tm)}, {"at", json::array({K, D})},
                          {"y_max", o.y_max}};
        rep.result = region_json(K, D, rc);
        emit_report(rep, o.c.out);
        return;
    }

    const auto [nk, nd] = parse_grid(o.grid, "--grid");
    const auto [k_lo, k_hi] = parse_pair(o.k_range, "--k-range");
    const auto [d_lo, d_hi] = parse_pair(o.delta_range, "--delta-range");
    if (!(k_lo < k_hi) || !(d_lo < d_hi))
        throw UsageError("region-map: ranges need lo < hi");

    rep.config = json{{"model", transition_snapshot(tm)},
                      {"grid", json::array({nk, nd})},
                      {"k_range", json::array({k_lo, k_hi})},
                      {"delta_range", json::array({d_lo, d_hi})},
                      {"y_max", o.y_max}};

    // cell centers; index layout is K fastest, matching the heatmap raster
    const std::size_t n_cells = static_cast<std::size_t>(nk) * nd;
    std::vector<bifurcation::RegionClass> cells(n_cells);
    parallel_for(n_cells, resolve_threads(o.c.threads), [&](std::size_t idx) {
        const std::size_t i = idx % nk, j = idx / nk;
        const double K = k_lo + (i + 0.5) * (k_hi - k_lo) / nk;
        const double D = d_lo + (j + 0.5) * (d_hi - d_lo) / nd;
        cells[idx] = bifurcation::classify_region(base.field_at(K, D), o.y_max);
    });

    std::ostringstream body;
    body << "K,Delta,n_roots,cc,dconc\n";
    std::size_t n_target = 0, n_degenerate = 0;
    for (std::size_t idx = 0; idx < n_cells; ++idx) {
        const std::size_t i = idx % nk, j = idx / nk;
        const double K = k_lo + (i + 0.5) * (k_hi - k_lo) / nk;
        const double D = d_lo + (j + 0.5) * (d_hi - d_lo) / nd;
        const auto& rc = cells[idx];
        body << fmt(K, 10) << ',' << fmt(D, 10) << ',' << rc.n_roots << ','
             << (rc.concave_convex ? 1 : 0) << ',' << (rc.d_concave ? 1 : 0) << '\n';
        n_target += (rc.n_roots == 3 && rc.concave_convex && !rc.d_concave) ? 1 : 0;
        n_degenerate += rc.near_degenerate ? 1 : 0;
    }
    write_text(o.c.out, body.str());
    if (o.c.out != "-")
        rep.outputs.push_back(o.c.out);

    rep.result = json{{"cells", n_cells},
                      {"three_roots_cc_not_dconc", n_target},
                      {"near_degenerate", n_degenerate}};
    if (n_degenerate > 0)
        rep.warnings.push_back(std::to_string(n_degenerate) +
                               " cells graze a tangency; their root count is sensitive "
                               "to the probe grid");

    if (!o.svg.empty()) {
        Heatmap map;
        map.x_edges.resize(nk + 1);
        for (int i = 0; i <= nk; ++i)
            map.x_edges[i] = k_lo + i * (k_hi - k_lo) / nk;
        map.y_edges.resize(nd + 1);
        for (int j = 0; j <= nd; ++j)
            map.y_edges[j] = d_lo + j * (d_hi - d_lo) / nd;
        map.cell.resize(n_cells);
        for (std::size_t idx = 0; idx < n_cells; ++idx) {
            const auto& rc = cells[idx];
            map.cell[idx] = (rc.n_roots == 3 ? 1 : 0) + (rc.concave_convex ? 2 : 0) +
                            (rc.d_concave ? 4 : 0);
        }
        map.class_labels.resize(8);
        for (int id = 0; id < 8; ++id) {
            std::string label = (id & 1) ? "3 roots" : "other root count";
            label += (id & 2) ? ", cc" : ", not cc";
            label += (id & 4) ? ", dconc" : "";
            map.class_labels[id] = label;
        }
        write_text(o.svg, heatmap_chart("root count and curvature classes", "K", "Delta", map));
        rep.outputs.push_back(o.svg);
    }

    for (const std::string& w : rep.warnings)
        if (!o.c.quiet)
            std::cerr << "tippingscope: region-map: " << w << '\n';
    if (!o.json_path.empty())
        emit_report(rep, o.json_path);
}

// ---------------------------------------------------------------- tipping

struct TippingOpts {
    CommonOpts c;
    TransitionOverrides t;
    std::string bracket = "0,1";
    double horizon = 1e5, epsilon = 1e-3, tol = 1e-3;
    double classify = kUnset;
    double t_past = -2.5e5, cert_tol = 1e-6;
    bool no_certify = false;
    std::string trace_svg;
};

void run_tipping(const TippingOpts& o)
{
    const Config cfg = load(o.c);
    const auto tm = resolve_transition(cfg, o.t);

    transition::PullbackOptions popt;
    popt.t_past = o.t_past;
    popt.certify = !o.no_certify;
    popt.cert_tol = o.cert_tol;

    RunReport rep;
    rep.command = "tipping";
    rep.config = json{{"model", transition_snapshot(tm)},
                      {"horizon", o.horizon},
                      {"epsilon", o.epsilon},
                      {"t_past", o.t_past},
                      {"certify", popt.certify}};

    std::vector<double> trace_rhos;
    if (!std::isnan(o.classify)) {
        rep.config["rho"] = o.classify;
        const auto rc = transition::classify_run(tm, o.classify, o.horizon, o.epsilon, popt);
        rep.result = json{{"mode", "classify"},
                          {"rho", o.classify},
                          {"classification",
                           rc == transition::RunClass::Tracking ? "tracking" : "tipping"}};
        trace_rhos.push_back(o.classify);
    } else {
        const auto [lo, hi] = parse_pair(o.bracket, "--bracket");
        rep.config["bracket"] = json::array({lo, hi});
        rep.config["tol"] = o.tol;
        const auto tr = transition::locate_tipping(tm, lo, hi, o.tol, o.horizon, o.epsilon, popt);
        json probes = json::array();
        for (std::size_t i = 0; i < tr.rho_values.size(); ++i)
            probes.push_back(json{
                {"rho", tr.rho_values[i]},
                {"classification",
                 tr.classifications[i] == transition::RunClass::Tracking ? "tracking"
                                                                         : "tipping"}});
        rep.result = json{{"mode", "locate"},
                          {"rho_lo", tr.rho_lo},
                          {"rho_hi", tr.rho_hi},
                          {"probes", probes}};
        trace_rhos = {tr.rho_lo, tr.rho_hi};
    }

    if (!o.trace_svg.empty()) {
        std::vector<Series> series;
        for (double rho : trace_rhos) {
            models::TransitionModel probe = tm;
            probe.rho = rho;
            const auto traj =
                transition::pullback_solution(probe, transition::Branch::Upper, o.horizon, popt);
            // dense sampling through the transition window, sparse afterwards
            const double lo_t = std::max(-100.0, traj.t_lo());
            const double hi_t = traj.t_hi();
            std::vector<double> ts;
            if (hi_t <= 100.0) {
                ts = linspace(lo_t, hi_t, 1200);
            } else {
                ts = linspace(lo_t, 100.0, 600);
                const auto tail = linspace(100.0 + (hi_t - 100.0) / 600.0, hi_t, 600);
                ts.insert(ts.end(), tail.begin(), tail.end());
            }
            std::vector<double> ys(ts.size());
            for (std::size_t i = 0; i < ts.size(); ++i)
                ys[i] = traj.sample(ts[i]);
            series.push_back(Series{"upper, rho=" + fmt(rho, 8), ts, ys, false});
            if (traj.status == odeint::TrajectoryStatus::BlewUp)
                rep.warnings.push_back("trace at rho=" + fmt(rho, 8) +
                                       " left the guard region at t=" + fmt(traj.t_escape, 8));
        }
        series.push_back(Series{"lower (identically 0)",
                                {series.front().x.front(), series.front().x.back()},
                                {0.0, 0.0},
                                false});
        write_text(o.trace_svg,
                   line_chart("pullback solutions through the transition", "t", "y", series));
        rep.outputs.push_back(o.trace_svg);
    }
    emit_report(rep, o.c.out);
}

// ---------------------------------------------------------------- fit

struct FitOpts {
    CommonOpts c;
    std::string csv;
    std::string mode = "generations";
    double a = 0.0, b = 0.0, lb = 0.0;
    int m = 0, n = 0;
    std::string plot;
};

void run_fit(const FitOpts& o)
{
    shapefit::GrowthDataset data;
    if (o.mode == "generations") {
        data = shapefit::ingest_generations(read_two_column_csv(o.csv, "p_t", "p_t1"));
    } else {
        const auto rows = read_two_column_csv(o.csv, "x", "y");
        data.x.reserve(rows.size());
        data.y.reserve(rows.size());
        for (const auto& [x, y] : rows) {
            data.x.push_back(x);
            data.y.push_back(y);
        }
    }

    const auto basis = shapefit::build_basis(o.a, o.b, o.m, o.n);
    const auto fit = shapefit::fit(basis, data, o.lb);
    const auto roots = shapefit::spline_roots(fit);
    const auto threshold = shapefit::allee_threshold(roots);

    RunReport rep;
    rep.command = "fit";
    rep.config = json{{"csv", o.csv}, {"mode", o.mode}, {"a", o.a}, {"b", o.b},
                      {"m", o.m},     {"n", o.n},       {"lb", o.lb}};
    rep.result = json{{"rows", data.x.size()},
                      {"excluded_rows", data.excluded_rows},
                      {"knots", basis.knots},
                      {"alpha", fit.alpha},
                      {"sse", fit.sse},
                      {"active_set", fit.active_set},
                      {"roots", roots},
                      {"allee_threshold", threshold ? json(*threshold) : json(nullptr)}};
    if (data.excluded_rows > 0)
        rep.warnings.push_back(std::to_string(data.excluded_rows) +
                               " extinction rows were excluded from the fit");

    if (!o.plot.empty()) {
        const auto xs = linspace(0.0, basis.b, 400);
        std::vector<double> ys(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            ys[i] = fit.eval(xs[i]);
        std::vector<Series> series{Series{"data", data.x, data.y, true},
                                   Series{"spline", xs, ys, false}};
        if (!roots.empty())
            series.push_back(Series{"roots", roots, std::vector<double>(roots.size(), 0.0), true});
        write_text(o.plot, line_chart("concave-convex regression spline", "x", "y", series));
        rep.outputs.push_back(o.plot);
    }
    emit_report(rep, o.c.out);
}

} // namespace

// ---------------------------------------------------------------- dispatch

int dispatch(int argc, const char* const* argv)
{
    CLI::App app{"numerical toolkit for scalar concave-convex ODEs: period maps, "
                 "bifurcation thresholds, regime classification, critical-transition "
                 "location, and shape-constrained regression splines"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "tippingscope 1.0.0");

    SimulateOpts sim;
    auto* sub_sim = app.add_subcommand("simulate", "integrate a model and export the trajectory");
    add_common(sub_sim, sim.c);
    sub_sim->add_option("--type", sim.type, "model family: periodic or transition");
    add_periodic(sub_sim, sim.p);
    add_transition(sub_sim, sim.t);
    sub_sim->add_option("--x0", sim.x0, "initial state [8]");
    sub_sim->add_option("--t0", sim.t0, "start time [0]");
    sub_sim->add_option("--t1", sim.t1, "end time [100]");
    sub_sim->add_option("--samples", sim.samples, "CSV/SVG sample count [1000]")
        ->check(CLI::PositiveNumber);
    sub_sim->add_option("--abs-tol", sim.abs_tol, "integrator absolute tolerance [1e-12]");
    sub_sim->add_option("--rel-tol", sim.rel_tol, "integrator relative tolerance [1e-12]");
    sub_sim->add_option("--csv", sim.csv, "write sampled t,x rows to this CSV file");
    sub_sim->add_option("--svg", sim.svg, "write a trajectory plot to this SVG file");

    PoincareOpts poi;
    auto* sub_poi = app.add_subcommand("poincare", "fixed points of the period map");
    add_common(sub_poi, poi.c);
    add_periodic(sub_poi, poi.p);
    sub_poi->add_option("--split", poi.split, "nonlinearity part: minus, plus, or full")
        ->check(CLI::IsMember({"minus", "plus", "full"}));
    sub_poi->add_option("--window", poi.window, "scan window 'lo,hi' [-30,30]");
    sub_poi->add_option("--n-scan", poi.n_scan, "scan intervals, >= 16 [200]");
    sub_poi->add_option("--fp-tol", poi.fp_tol, "bisection tolerance in x [1e-10]");
    sub_poi->add_option("--mult-tol", poi.mult_tol, "neutral band around multiplier 1 [1e-6]");
    sub_poi->add_option("--svg", poi.svg, "plot the map against the identity");

    MuOpts mu;
    auto* sub_mu = app.add_subcommand("mu", "zero-crossing thresholds of the bounded solution");
    add_common(sub_mu, mu.c);
    add_periodic(sub_mu, mu.p);
    sub_mu->add_option("--c", mu.c_kind, "inhomogeneity shape (only 'cosine')");
    sub_mu->add_option("--omega-grid", mu.omega_grid, "phase grid size [128]")
        ->check(CLI::PositiveNumber);
    sub_mu->add_option("--horizon", mu.horizon, "integral truncation horizon, 0 = auto");

    LambdaOpts lam;
    auto* sub_lam = app.add_subcommand("lambda", "saddle-node parameters of the split families");
    add_common(sub_lam, lam.c);
    add_periodic(sub_lam, lam.p);
    sub_lam->add_option("--lo", lam.lo, "lower end of the search bracket [-1]");
    sub_lam->add_option("--hi", lam.hi, "upper end of the search bracket [1]");
    sub_lam->add_option("--tol", lam.tol, "bisection tolerance [1e-8]");
    sub_lam->add_option("--window", lam.window, "fixed-point scan window 'lo,hi' [-30,30]");
    sub_lam->add_option("--n-scan", lam.n_scan, "scan intervals [200]");

    OrderOpts ord;
    auto* sub_ord = app.add_subcommand("classify-order",
                                       "relative order of the four bifurcation thresholds");
    add_common(sub_ord, ord.c);
    add_periodic(sub_ord, ord.p);
    sub_ord->add_option("--window", ord.window, "fixed-point scan window 'lo,hi' [-30,30]");
    sub_ord->add_option("--n-scan", ord.n_scan, "scan intervals [200]");

    BandOpts band;
    auto* sub_band = app.add_subcommand("band", "d-concavity band edges over the phase");
    add_common(sub_band, band.c);
    add_periodic(sub_band, band.p);
    sub_band->add_option("--x-max", band.x_max, "cap for the band edges [30]");
    sub_band->add_option("--omega-grid", band.omega_grid, "phase grid size [64]")
        ->check(CLI::PositiveNumber);
    sub_band->add_option("--svg", band.svg, "plot the four edges over the phase");

    RegionMapOpts reg;
    auto* sub_reg = app.add_subcommand("region-map",
                                       "root count and curvature classes over (K, Delta)");
    add_common(sub_reg, reg.c, /*with_threads=*/true);
    add_transition(sub_reg, reg.t);
    sub_reg->add_option("--grid", reg.grid, "cells 'NxM' [100x100]");
    sub_reg->add_option("--k-range", reg.k_range, "capacity range 'lo,hi' [38.3,40.3]");
    sub_reg->add_option("--delta-range", reg.delta_range, "predation range 'lo,hi' [38.2,40.2]");
    sub_reg->add_option("--at", reg.at, "classify a single point 'K,Delta' instead of a grid");
    sub_reg->add_option("--y-max", reg.y_max, "state probe upper end [60]");
    sub_reg->add_option("--json", reg.json_path, "also write the run report to this path");
    sub_reg->add_option("--svg", reg.svg, "write the class heatmap to this SVG file");

    TippingOpts tip;
    auto* sub_tip = app.add_subcommand("tipping",
                                       "critical perturbation size of the transition model");
    add_common(sub_tip, tip.c);
    add_transition(sub_tip, tip.t);
    sub_tip->add_option("--bracket", tip.bracket, "rho search bracket 'lo,hi' [0,1]");
    sub_tip->add_option("--horizon", tip.horizon, "tracking horizon [1e5]");
    sub_tip->add_option("--epsilon", tip.epsilon, "separation threshold at the horizon [1e-3]");
    sub_tip->add_option("--tol", tip.tol, "bisection tolerance on rho [1e-3]");
    sub_tip->add_option("--classify", tip.classify,
                        "classify this single rho instead of bisecting");
    sub_tip->add_option("--t-past", tip.t_past, "pullback start time [-2.5e5]");
    sub_tip->add_option("--cert-tol", tip.cert_tol, "pullback certificate tolerance [1e-6]");
    sub_tip->add_flag("--no-certify", tip.no_certify, "skip the pullback certificate rerun");
    sub_tip->add_option("--trace-svg", tip.trace_svg, "plot the traced pullback solutions");

    FitOpts fit;
    auto* sub_fit = app.add_subcommand("fit", "concave-convex regression spline fit");
    add_common(sub_fit, fit.c);
    sub_fit->add_option("--csv", fit.csv, "input CSV (header 'p_t,p_t1' or 'x,y')")->required();
    sub_fit->add_option("--mode", fit.mode, "row interpretation: generations or direct")
        ->check(CLI::IsMember({"generations", "direct"}));
    sub_fit->add_option("--a", fit.a, "inflection point, 0 < a < b")->required();
    sub_fit->add_option("--b", fit.b, "domain end")->required();
    sub_fit->add_option("--m", fit.m, "interior knots on [0, a]")
        ->required()
        ->check(CLI::NonNegativeNumber);
    sub_fit->add_option("--n", fit.n, "interior knots on [a, b]")
        ->required()
        ->check(CLI::NonNegativeNumber);
    sub_fit->add_option("--lb", fit.lb, "lower bound on the shape coefficients [0]");
    sub_fit->add_option("--plot", fit.plot, "write the data + spline plot to this SVG file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    struct Entry {
        CLI::App* sub;
        const CommonOpts* common;
        std::function<void()> run;
    };
    const std::vector<Entry> entries{
        {sub_sim, &sim.c, [&] { run_simulate(sim); }},
        {sub_poi, &poi.c, [&] { run_poincare(poi); }},
        {sub_mu, &mu.c, [&] { run_mu(mu); }},
        {sub_lam, &lam.c, [&] { run_lambda(lam); }},
        {sub_ord, &ord.c, [&] { run_classify_order(ord); }},
        {sub_band, &band.c, [&] { run_band(band); }},
        {sub_reg, &reg.c, [&] { run_region_map(reg); }},
        {sub_tip, &tip.c, [&] { run_tipping(tip); }},
        {sub_fit, &fit.c, [&] { run_fit(fit); }},
    };

    for (const Entry& e : entries) {
        if (!e.sub->parsed())
            continue;
        const auto t_begin = std::chrono::steady_clock::now();
        try {
            e.run();
        } catch (const UsageError& ex) {
            std::cerr << "tippingscope: " << ex.what() << '\n';
            return 64;
        } catch (const IoError& ex) {
            std::cerr << "tippingscope: " << ex.what() << '\n';
            return 1;
        } catch (const DomainError& ex) {
            std::cerr << "tippingscope: " << ex.what() << '\n';
            return 2;
        } catch (const std::exception& ex) {
            std::cerr << "tippingscope: internal error: " << ex.what() << '\n';
            return 70;
        }
        if (!e.common->quiet) {
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t_begin;
            std::cerr << "tippingscope: " << e.sub->get_name() << " finished in "
                      << fmt(dt.count(), 3) << " s\n";
        }
        return 0;
    }
    return 64; // unreachable: require_subcommand(1)
}

int dispatch(const std::vector<std::string>& args)
{
    std::vector<const char*> argv{"tippingscope"};
    for (const std::string& a : args)
        argv.push_back(a.c_str());
    return dispatch(static_cast<int>(argv.size()), argv.data());
}

} // namespace tippingscope::cli
