#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "doctest.h"
#include "json.hpp"
#include "tippingscope/shapefit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using tippingscope::cli::dispatch;

namespace {

fs::path work_dir()
{
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "tippingscope_cli_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string path_of(const std::string& name)
{
    return (work_dir() / name).string();
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json run_ok(std::vector<std::string> args, const std::string& out_name)
{
    const std::string out = path_of(out_name);
    args.push_back("--quiet");
    args.push_back("--out");
    args.push_back(out);
    REQUIRE(dispatch(args) == 0);
    return json::parse(slurp(out));
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    REQUIRE(out.good());
    out << text;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("mu reports both methods and their disagreement")
{
    const json r = run_ok({"mu", "--d", "0.1"}, "mu.json");
    CHECK(r["command"] == "mu");
    CHECK(std::fabs(r["result"]["mu_minus"].get<double>()
                    - 0.1 / std::sqrt(1.01))
          <= 1e-9);
    CHECK(std::fabs(r["result"]["mu_plus"].get<double>()
                    + 0.1 / std::sqrt(1.01))
          <= 1e-9);
    CHECK(r["result"]["closed_form"]["mu_minus"].get<double>()
          == doctest::Approx(0.1 / std::sqrt(1.01)));
    CHECK(r["result"]["disagreement"].get<double>() < 1e-7);
}

TEST_CASE("config file values are overridden by flags")
{
    const std::string cfg = path_of("periodic.cfg");
    write_file(cfg,
               "# comment line\n"
               "periodic.d = 0.2\n"
               "periodic.lambda = 0.05\n");

    const json from_cfg = run_ok({"mu", "--model", cfg}, "mu_cfg.json");
    CHECK(from_cfg["result"]["mu_minus"].get<double>()
          == doctest::Approx(0.2 / std::sqrt(1.04)).epsilon(1e-7));

    const json overridden =
        run_ok({"mu", "--model", cfg, "--d", "0.1"}, "mu_cfg2.json");
    CHECK(overridden["result"]["mu_minus"].get<double>()
          == doctest::Approx(0.1 / std::sqrt(1.01)).epsilon(1e-7));
}

TEST_CASE("bad input maps to the documented exit codes")
{
    CHECK(dispatch({"no-such-command"}) == 64);
    CHECK(dispatch({"mu", "--no-such-flag"}) == 64);
    CHECK(dispatch({"fit", "--quiet"}) == 64);  // required options missing
    CHECK(dispatch({"mu", "--c", "square", "--quiet"}) == 64);
    CHECK(dispatch({"--help"}) == 0);
    CHECK(dispatch({"--version"}) == 0);

    // domain failure: invalid model parameters
    CHECK(dispatch({"simulate", "--type", "periodic", "--d", "-1",
                    "--quiet", "--out", path_of("junk.json")})
          == 2);

    // I/O failure: unreadable configuration file
    CHECK(dispatch({"mu", "--model", path_of("missing.cfg"), "--quiet"}) == 1);

    const std::string bad_cfg = path_of("bad.cfg");
    write_file(bad_cfg, "periodic.unknown = 1\n");
    CHECK(dispatch({"mu", "--model", bad_cfg, "--quiet"}) == 64);

    const std::string malformed = path_of("malformed.cfg");
    write_file(malformed, "periodic.d\n");
    CHECK(dispatch({"mu", "--model", malformed, "--quiet"}) == 64);
}

TEST_CASE("simulate writes the report, the samples, and the plot")
{
    const std::string csv = path_of("sim.csv");
    const std::string svg = path_of("sim.svg");
    const json r = run_ok({"simulate", "--type", "periodic", "--g-minus",
                           "0.005", "--g-plus", "0.005", "--lambda", "0.5",
                           "--x0", "1", "--t1", "20", "--samples", "50",
                           "--csv", csv, "--svg", svg},
                          "sim.json");
    CHECK(r["result"]["status"] == "completed");
    CHECK(r["result"]["t_final"].get<double>() == doctest::Approx(20.0));
    CHECK(r["outputs"].size() == 2);

    const std::string body = slurp(csv);
    std::istringstream lines(body);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "t,x");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(line.find(',') != std::string::npos);
    }
    CHECK(rows == 51);  // samples + 1 points

    const std::string plot = slurp(svg);
    CHECK(plot.rfind("<svg", 0) == 0);
    CHECK(plot.find("</svg>") != std::string::npos);
    CHECK(plot.find("polyline") != std::string::npos);
}

TEST_CASE("poincare reports the two known fixed points of the concave split")
{
    const double mu_minus = 0.1 / std::sqrt(1.01);
    std::ostringstream lam;
    lam.precision(16);
    lam << mu_minus;
    const json r = run_ok({"poincare", "--split", "minus", "--g-minus",
                           "0.005", "--lambda", lam.str()},
                          "poincare.json");
    CHECK(r["result"]["count"] == 2);
    CHECK(r["result"]["anomaly"] == false);
    const auto& pts = r["result"]["fixed_points"];
    REQUIRE(pts.size() == 2);
    // the repulsive point continues the bounded solution of the linear family
    const double b_mu = -0.1 / 1.01 - mu_minus / 0.1;
    CHECK(std::fabs(pts[0]["x"].get<double>() - b_mu) <= 1e-7);
    CHECK(pts[0]["stability"] == "repulsive");
    CHECK(pts[0]["multiplier"].get<double>()
          == doctest::Approx(std::exp(0.2 * M_PI)).epsilon(1e-6));
    CHECK(pts[1]["stability"] == "attractive");
    CHECK(pts[1]["x"].get<double>() == doctest::Approx(5.010617).epsilon(1e-5));
}

TEST_CASE("region classification of a single frozen point")
{
    const json r =
        run_ok({"region-map", "--at", "39.3,39.2"}, "region_at.json");
    CHECK(r["result"]["n_roots"] == 3);
    CHECK(r["result"]["concave_convex"] == true);
    CHECK(r["result"]["d_concave"] == false);
}

TEST_CASE("band edges of the cubic family cover the whole cap")
{
    const json r = run_ok({"band", "--g-minus", "0.005", "--g-plus", "0.05",
                           "--omega-grid", "8"},
                          "band.json");
    const auto& alpha = r["result"]["alpha"];
    const auto& beta = r["result"]["beta"];
    const auto& alpha_star = r["result"]["alpha_star"];
    const auto& beta_star = r["result"]["beta_star"];
    REQUIRE(alpha.size() == 8);
    for (int i = 0; i < 8; ++i) {
        // g_xxx is a negative constant on each side, so the band is everything
        CHECK(alpha[i].get<double>() == -30.0);
        CHECK(beta[i].get<double>() == 30.0);
        CHECK(alpha_star[i].get<double>() == -30.0);
        CHECK(beta_star[i].get<double>() == 30.0);
    }
}

TEST_CASE("tipping classify mode reports tracking for a mild bite")
{
    const json r = run_ok({"tipping", "--classify", "0.28", "--horizon",
                           "1e5", "--epsilon", "1e-3"},
                          "tip_classify.json");
    CHECK(r["result"]["classification"] == "tracking");
}

TEST_CASE("fit ingests generation pairs and finds the thresholds")
{
    // growth curve assembled from the reference spline coefficients
    const auto basis = tippingscope::shapefit::build_basis(2.0, 10.0, 1, 2);
    const std::vector<double> alpha{-1.0, 1.2, 0.4, 1.0, 1.0, 1.0};
    const auto theta = [&](double x) {
        double s = 0.0;
        for (int i = 0; i < basis.size(); ++i)
            s += alpha[i] * basis.C[i].eval(x);
        return s;
    };

    std::ostringstream csv;
    csv.precision(17);
    csv << "p_t,p_t1\n";
    for (int j = 0; j < 40; ++j) {
        const double x = 0.25 + 9.75 * j / 39.0;
        csv << x << ',' << x * std::exp(theta(x) / x) << '\n';
    }
    csv << "4.0,0\n";  // extinction row
    const std::string data = path_of("generations.csv");
    write_file(data, csv.str());

    const json r = run_ok({"fit", "--csv", data, "--mode", "generations",
                           "--a", "2", "--b", "10", "--m", "1", "--n", "2"},
                          "fit.json");
    CHECK(r["result"]["rows"] == 40);
    CHECK(r["result"]["excluded_rows"] == 1);
    REQUIRE(r["result"]["alpha"].size() == 6);
    for (int i = 0; i < 6; ++i)
        CHECK(std::fabs(r["result"]["alpha"][i].get<double>() - alpha[i])
              <= 1e-6);
    REQUIRE(r["result"]["roots"].size() == 2);
    CHECK(r["result"]["roots"][0].get<double>()
          == doctest::Approx(1.2942803603).epsilon(1e-6));
    CHECK(r["result"]["allee_threshold"].get<double>()
          == doctest::Approx(1.2942803603).epsilon(1e-6));
    CHECK(r["result"]["sse"].get<double>() <= 1e-16);
}

TEST_CASE("reports are byte-identical across reruns")
{
    const std::vector<std::string> args{"mu", "--d", "0.1"};
    (void)run_ok(args, "det_a.json");
    (void)run_ok(args, "det_b.json");
    CHECK(slurp(path_of("det_a.json")) == slurp(path_of("det_b.json")));

    const std::vector<std::string> poi{"poincare", "--split", "minus",
                                       "--g-minus", "0.005", "--lambda",
                                       "0.0995"};
    (void)run_ok(poi, "det_c.json");
    (void)run_ok(poi, "det_d.json");
    CHECK(slurp(path_of("det_c.json")) == slurp(path_of("det_d.json")));
}

TEST_CASE("the thread count does not change region-map bytes")
{
    const std::string csv1 = path_of("map_1.csv");
    const std::string csv3 = path_of("map_3.csv");
    REQUIRE(dispatch({"region-map", "--grid", "6x6", "--threads", "1",
                      "--quiet", "--out", csv1})
            == 0);
    ::setenv("TIPPINGSCOPE_THREADS", "3", 1);
    REQUIRE(dispatch({"region-map", "--grid", "6x6", "--quiet", "--out",
                      csv3})
            == 0);
    ::unsetenv("TIPPINGSCOPE_THREADS");
    CHECK(slurp(csv1) == slurp(csv3));

    // the CSV carries one header and one row per cell
    std::istringstream lines(slurp(csv1));
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "K,Delta,n_roots,cc,dconc");
    int rows = 0;
    while (std::getline(lines, line))
        ++rows;
    CHECK(rows == 36);
}

} // TEST_SUITE
