#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mirage/envmodel/api_surface.hpp"
#include "mirage/probes/catalog.hpp"
#include "mirage/probes/watchlists.hpp"

namespace mirage::probes {

struct ProbeFinding {
    ProbeId id = ProbeId::ProcNames;
    std::string probe;  // catalog name
    bool detected = false;
    // Matched artifact strings. The being-debugged and static-cursor checks
    // carry a synthetic evidence label instead of watchlist matches.
    std::vector<std::string> artifacts;
};

enum class Verdict { Proceed, Evade };

const char* to_string(Verdict v);

struct SuiteReport {
    std::vector<ProbeFinding> findings;          // catalog order, enabled probes only
    std::map<Category, Verdict> verdicts;        // all three categories always present
    std::optional<std::string> identified_av;

    const ProbeFinding* finding(ProbeId id) const;
};

// Executes one probe's API plan and intersects the observations with its
// watchlist. Name matching is ASCII case-insensitive substring; MAC matching
// compares the 3-byte OUI prefix.
ProbeFinding run_probe(const Probe& p, envmodel::ApiSurface& api, const WatchlistSet& watchlists);

// Runs every catalog probe whose category set intersects `enabled`.
// identify_av fills identified_av when the AV category is enabled and
// fingerprints are provided.
SuiteReport run_suite(envmodel::ApiSurface& api, const WatchlistSet& watchlists,
                      const std::set<Category>& enabled,
                      const AvFingerprints* fingerprints = nullptr);

// The AV whose fingerprint overlaps the detected artifacts the most; ties
// break lexicographically; nullopt when no fingerprint overlaps at all.
std::optional<std::string> identify_av(const SuiteReport& report,
                                       const AvFingerprints& fingerprints);

}  // namespace mirage::probes
