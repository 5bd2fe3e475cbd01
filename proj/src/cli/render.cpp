#include "mirage/cli/render.hpp"

#include "mirage/pefile/entropy.hpp"

namespace mirage::cli {

Json pe_image_json(const pefile::PeImage& img) {
    Json j;
    j["machine"] = img.machine;
    j["pe32_plus"] = img.pe32_plus;
    j["file_entropy"] = img.file_entropy;
    j["likely_packed"] = pefile::packedness_flag(img);
    j["has_certificate_table"] = img.has_certificate_table;
    j["resource_entry_count"] = img.resource_entry_count;
    j["sections"] = Json::array();
    for (const auto& s : img.sections) {
        Json sec;
        sec["name"] = s.name;
        sec["raw_offset"] = s.raw_offset;
        sec["raw_size"] = s.raw_size;
        sec["virtual_address"] = s.virtual_address;
        sec["virtual_size"] = s.virtual_size;
        sec["characteristics"] = s.characteristics;
        sec["entropy"] = s.entropy;
        j["sections"].push_back(std::move(sec));
    }
    j["imports"] = Json::array();
    for (const auto& imp : img.imports) {
        Json entry;
        entry["dll"] = imp.dll;
        entry["functions"] = imp.functions;
        j["imports"].push_back(std::move(entry));
    }
    return j;
}

Json match_report_json(const rulelang::MatchReport& report) {
    Json rules = Json::array();
    for (const auto& r : report.rules) {
        Json rule;
        rule["rule"] = r.name;
        rule["matched"] = r.matched;
        rule["patterns"] = Json::array();
        for (const auto& p : r.patterns) {
            Json pat;
            pat["id"] = "$" + p.id;
            pat["offsets"] = p.offsets;
            rule["patterns"].push_back(std::move(pat));
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

Json suite_report_json(const probes::SuiteReport& report,
                       const std::set<probes::Category>& enabled) {
    Json j;
    j["enabled"] = Json::array();
    for (probes::Category c :
         {probes::Category::Debugger, probes::Category::Av, probes::Category::Vm}) {
        if (enabled.count(c)) j["enabled"].push_back(probes::to_string(c));
    }
    j["findings"] = Json::array();
    for (const auto& f : report.findings) {
        Json finding;
        finding["probe"] = f.probe;
        finding["detected"] = f.detected;
        finding["artifacts"] = f.artifacts;
        j["findings"].push_back(std::move(finding));
    }
    j["verdicts"] = Json::object();
    for (const auto& [cat, verdict] : report.verdicts) {
        j["verdicts"][probes::to_string(cat)] = probes::to_string(verdict);
    }
    j["identified_av"] = report.identified_av ? Json(*report.identified_av) : Json(nullptr);
    return j;
}

Json forced_evasion_json(const deception::ForcedEvasionReport& report) {
    Json j;
    j["probes"] = Json::array();
    for (const auto& p : report.probes) {
        Json probe;
        probe["probe"] = p.probe;
        probe["covered"] = p.covered;
        probe["before"] = Json{{"detected", p.before.detected}, {"artifacts", p.before.artifacts}};
        probe["after"] = Json{{"detected", p.after.detected}, {"artifacts", p.after.artifacts}};
        probe["flipped"] = p.flipped;
        j["probes"].push_back(std::move(probe));
    }
    j["flip_count"] = report.flip_count;
    j["verdict"] = deception::to_string(report.verdict);
    j["interception"] = Json{{"intercepted", report.stats.intercepted},
                             {"passthrough", report.stats.passthrough},
                             {"faked", report.stats.faked}};
    return j;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace mirage::cli
