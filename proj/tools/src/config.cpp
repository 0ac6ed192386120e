#include "config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace tippingscope::cli {

namespace {

const std::set<std::string> kKnownKeys = {
    "model.type", "model.r", "model.S", "model.b",
    "model.K0", "model.K1", "model.D0", "model.D1", "model.rho",
    "periodic.d", "periodic.g_minus", "periodic.g_plus", "periodic.lambda",
    "driver.t_ref", "driver.omega_ref",
};

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// flag > config > built-in default, with NaN marking "flag not given"
double pick(double flag_value, const Config& cfg, const std::string& key, double builtin)
{
    if (!std::isnan(flag_value))
        return flag_value;
    return cfg.number(key, builtin);
}

} // namespace

Config Config::from_string(const std::string& text, const std::string& origin)
{
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(origin + ":" + std::to_string(line_no) +
                             ": expected KEY=VALUE, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw UsageError(origin + ":" + std::to_string(line_no) +
                             ": empty key or value");
        if (!kKnownKeys.count(key))
            throw UsageError(origin + ":" + std::to_string(line_no) +
                             ": unknown configuration key '" + key + "'");
        cfg.kv_[key] = value;
    }
    return cfg;
}

Config Config::from_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read configuration file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path);
}

double Config::number(const std::string& key, double fallback) const
{
    const auto it = kv_.find(key);
    if (it == kv_.end())
        return fallback;
    return parse_number(it->second, "configuration key " + key);
}

std::string Config::text(const std::string& key, const std::string& fallback) const
{
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

models::PeriodicModel resolve_periodic(const Config& cfg, const PeriodicOverrides& ov)
{
    models::PeriodicModel m;
    m.d       = pick(ov.d, cfg, "periodic.d", m.d);
    m.g_minus = pick(ov.g_minus, cfg, "periodic.g_minus", m.g_minus);
    m.g_plus  = pick(ov.g_plus, cfg, "periodic.g_plus", m.g_plus);
    m.lambda  = pick(ov.lambda, cfg, "periodic.lambda", m.lambda);
    m.validate();
    return m;
}

models::TransitionModel resolve_transition(const Config& cfg, const TransitionOverrides& ov)
{
    models::TransitionModel m;
    m.base.r  = pick(ov.r, cfg, "model.r", m.base.r);
    m.base.S  = pick(ov.S, cfg, "model.S", m.base.S);
    m.base.b  = pick(ov.b, cfg, "model.b", m.base.b);
    m.base.K0 = pick(ov.K0, cfg, "model.K0", m.base.K0);
    m.base.K1 = pick(ov.K1, cfg, "model.K1", m.base.K1);
    m.base.D0 = pick(ov.D0, cfg, "model.D0", m.base.D0);
    m.base.D1 = pick(ov.D1, cfg, "model.D1", m.base.D1);
    m.rho     = pick(ov.rho, cfg, "model.rho", m.rho);
    m.driver.t_ref     = pick(ov.t_ref, cfg, "driver.t_ref", m.driver.t_ref);
    m.driver.omega_ref = pick(ov.omega_ref, cfg, "driver.omega_ref", m.driver.omega_ref);
    m.validate();
    return m;
}

std::string resolve_model_type(const Config& cfg, const std::string& flag)
{
    const std::string type = !flag.empty() ? flag : cfg.text("model.type", "transition");
    if (type != "periodic" && type != "transition")
        throw UsageError("model type must be 'periodic' or 'transition', got '" + type + "'");
    return type;
}

unsigned resolve_threads(unsigned flag_value)
{
    if (flag_value > 0)
        return flag_value;
    if (const char* env = std::getenv("TIPPINGSCOPE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

} // namespace tippingscope::cli
