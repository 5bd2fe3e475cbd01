#pragma once

#include <string>
#include <vector>

#include "mirage/deception/interceptor.hpp"
#include "mirage/probes/runner.hpp"

namespace mirage::deception {

struct ProbeDiff {
    probes::ProbeId id;
    std::string probe;
    probes::ProbeFinding before;
    probes::ProbeFinding after;
    bool flipped = false;  // detected changed between the two runs
    bool covered = true;   // probe's API plan lies inside the hooked set
};

enum class DiffVerdict { ForcedEvasion, NoChange };

const char* to_string(DiffVerdict v);

struct ForcedEvasionReport {
    std::vector<ProbeDiff> probes;
    DiffVerdict verdict = DiffVerdict::NoChange;
    int flip_count = 0;
    InterceptionStats stats;  // from the instrumented run
};

// Full probe suite on the truthful surface, then on the policy-wrapped
// surface over the same snapshot; verdict is FORCED_EVASION when at least
// one probe's detection flipped.
ForcedEvasionReport diff_run(const envmodel::EnvironmentSnapshot& snapshot,
                             const DeceptionPolicy& policy,
                             const probes::WatchlistSet& watchlists);

}  // namespace mirage::deception
