#pragma once

// Report serialization: a versioned JSON document carrying every check
// report with full parameter provenance, plus a flat CSV summary with one
// row per residual. Output is deterministic for a fixed input: no
// timestamps, insertion order preserved, shortest round-trip number
// formatting.

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "holoflow/checks.hpp"

namespace holoflow {

inline constexpr const char* kReportSchema = "holoflow-report/1";

// All check reports produced by one scenario, in execution order.
struct ScenarioResult {
    std::string scenario;
    std::vector<CheckReport> reports;
};

inline nlohmann::ordered_json check_report_json(const std::string& scenario,
                                                const CheckReport& rep) {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["check_id"] = rep.check_id;
    j["model"] = rep.model;
    j["verdict"] = rep.verdict;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rep.parameters) params[k] = v;
    j["parameters"] = params;
    nlohmann::ordered_json rs = nlohmann::ordered_json::array();
    for (const auto& r : rep.residuals) {
        nlohmann::ordered_json e;
        e["name"] = r.name;
        e["value"] = r.value;
        e["tolerance"] = r.tolerance;
        e["verdict"] = r.ok() ? "pass" : "fail";
        rs.push_back(std::move(e));
    }
    j["residuals"] = std::move(rs);
    j["flags"] = rep.flags;
    j["notes"] = rep.notes;
    return j;
}

inline nlohmann::ordered_json report_document(const std::vector<ScenarioResult>& results) {
    nlohmann::ordered_json doc;
    doc["schema"] = kReportSchema;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& sr : results)
        for (const auto& rep : sr.reports) arr.push_back(check_report_json(sr.scenario, rep));
    doc["reports"] = std::move(arr);
    return doc;
}

inline std::string report_json_text(const std::vector<ScenarioResult>& results) {
    return report_document(results).dump(2) + "\n";
}

// Quote a CSV field only when it contains a delimiter, quote, or newline.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string report_csv_text(const std::vector<ScenarioResult>& results) {
    std::string out = "scenario,check_id,residual,value,tolerance,verdict\n";
    for (const auto& sr : results)
        for (const auto& rep : sr.reports)
            for (const auto& r : rep.residuals) {
                out += csv_field(sr.scenario);
                out += ',';
                out += csv_field(rep.check_id);
                out += ',';
                out += csv_field(r.name);
                out += ',';
                out += dstr(r.value);
                out += ',';
                out += dstr(r.tolerance);
                out += ',';
                out += r.ok() ? "pass" : "fail";
                out += '\n';
            }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open output file: " + path);
    os.write(text.data(), std::streamsize(text.size()));
    if (!os) throw Error("write failed: " + path);
}

}  // namespace holoflow
