#pragma once

#include <nlohmann/json.hpp>

#include "mirage/deception/diff.hpp"
#include "mirage/pefile/pe_image.hpp"
#include "mirage/probes/runner.hpp"
#include "mirage/rulelang/match.hpp"

namespace mirage::cli {

// JSON is the report contract; insertion order is preserved end to end so
// emitted documents re-render byte-identically after a parse.
using Json = nlohmann::ordered_json;

Json pe_image_json(const pefile::PeImage& img);
Json match_report_json(const rulelang::MatchReport& report);
Json suite_report_json(const probes::SuiteReport& report,
                       const std::set<probes::Category>& enabled);
Json forced_evasion_json(const deception::ForcedEvasionReport& report);

std::string dump_json(const Json& j);  // canonical rendering (2-space indent + newline)

}  // namespace mirage::cli
