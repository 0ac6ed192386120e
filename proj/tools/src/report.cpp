#include "report.hpp"

namespace tippingscope::cli {

json report_json(const RunReport& rep)
{
    json doc;
    doc["command"] = rep.command;
    doc["config"] = rep.config;
    doc["determinism"] =
        "all values are pure functions of the config block; "
        "reruns produce byte-identical reports (wall time goes to stderr)";
    doc["result"] = rep.result;
    doc["warnings"] = rep.warnings;
    doc["outputs"] = rep.outputs;
    return doc;
}

void emit_report(const RunReport& rep, const std::string& path)
{
    write_text(path, report_json(rep).dump(2) + "\n");
}

} // namespace tippingscope::cli
