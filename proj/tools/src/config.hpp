#pragma once
#include <limits>
#include <map>
#include <string>

#include <tippingscope/models.hpp>

#include "common.hpp"

namespace tippingscope::cli {

/// Flat KEY=VALUE configuration text: one pair per line, '#' starts a
/// comment, blank lines are skipped, whitespace around key and value is
/// trimmed.  Only the documented keys are accepted so that typos surface as
/// usage errors instead of silently falling back to defaults.
class Config {
public:
    Config() = default;

    /// Throws IoError if the file cannot be read, UsageError on malformed
    /// lines or unknown keys.
    static Config from_file(const std::string& path);
    /// Same parser over in-memory text; `origin` names the source in errors.
    static Config from_string(const std::string& text,
                              const std::string& origin = "<config>");

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    /// Numeric lookup with a fallback; throws UsageError if the stored value
    /// is not a number.
    double number(const std::string& key, double fallback) const;
    /// String lookup with a fallback.
    std::string text(const std::string& key, const std::string& fallback) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

/// NaN means "not set on the command line"; resolution order is
/// flag > config key > built-in default.
constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

/// Command-line overrides for the periodic cubic family.
struct PeriodicOverrides {
    double d = kUnset, g_minus = kUnset, g_plus = kUnset, lambda = kUnset;
};

/// Command-line overrides for the population model, its perturbation, and
/// the driver anchor.
struct TransitionOverrides {
    double r = kUnset, S = kUnset, b = kUnset;
    double K0 = kUnset, K1 = kUnset, D0 = kUnset, D1 = kUnset;
    double rho = kUnset, t_ref = kUnset, omega_ref = kUnset;
};

/// Built-in defaults overlaid with `periodic.*` config keys, then with the
/// command-line values; validates the result.
models::PeriodicModel resolve_periodic(const Config& cfg, const PeriodicOverrides& ov);

/// Same resolution for `model.*` / `driver.*` keys.
models::TransitionModel resolve_transition(const Config& cfg, const TransitionOverrides& ov);

/// `model.type` ("periodic" or "transition") resolved against the --type
/// flag; empty flag string means "not given".
std::string resolve_model_type(const Config& cfg, const std::string& flag);

/// Worker count: flag if nonzero, else TIPPINGSCOPE_THREADS if set and
/// parseable, else the hardware concurrency (at least 1).
unsigned resolve_threads(unsigned flag_value);

} // namespace tippingscope::cli
