#pragma once
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"

namespace tippingscope::cli {

using json = nlohmann::ordered_json;

/// Machine-readable record of one subcommand run.  The serialized report is
/// a pure function of the configuration: reruns produce byte-identical text.
/// Timing is therefore kept out of the report entirely; dispatch() prints
/// the wall time to standard error instead.
struct RunReport {
    std::string command;
    json config = json::object();     ///< resolved parameters actually used
    json result = json::object();     ///< subcommand-specific payload
    std::vector<std::string> warnings;
    std::vector<std::string> outputs; ///< files written besides this report
};

/// Assembles the full JSON document (command, config, determinism note,
/// result, warnings, outputs).
json report_json(const RunReport& rep);

/// Serializes report_json() (2-space indent, trailing newline) to `path`,
/// or to standard output when path is "-".
void emit_report(const RunReport& rep, const std::string& path);

} // namespace tippingscope::cli
