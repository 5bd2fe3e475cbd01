#include "mirage/deception/diff.hpp"

#include <algorithm>

namespace mirage::deception {

const char* to_string(DiffVerdict v) {
    return v == DiffVerdict::ForcedEvasion ? "FORCED_EVASION" : "NO_CHANGE";
}

ForcedEvasionReport diff_run(const envmodel::EnvironmentSnapshot& snapshot,
                             const DeceptionPolicy& policy,
                             const probes::WatchlistSet& watchlists) {
    const std::set<probes::Category> all = {probes::Category::Debugger, probes::Category::Av,
                                            probes::Category::Vm};

    auto truthful = envmodel::bind_api(snapshot);
    probes::SuiteReport before = probes::run_suite(*truthful, watchlists, all);

    auto base = envmodel::bind_api(snapshot);
    auto wrapped = apply(policy, *base);
    probes::SuiteReport after = probes::run_suite(*wrapped, watchlists, all);

    ForcedEvasionReport report;
    const auto& hooks = hooked_functions();
    for (std::size_t i = 0; i < before.findings.size(); ++i) {
        const auto& probe = probes::probe_catalog()[i];
        ProbeDiff diff;
        diff.id = probe.id;
        diff.probe = probe.name;
        diff.before = before.findings[i];
        diff.after = after.findings[i];
        diff.flipped = diff.before.detected != diff.after.detected;
        diff.covered = std::all_of(probe.api_plan.begin(), probe.api_plan.end(),
                                   [&](envmodel::ApiFunction f) { return hooks.count(f) > 0; });
        if (diff.flipped) ++report.flip_count;
        report.probes.push_back(std::move(diff));
    }
    report.verdict = report.flip_count >= 1 ? DiffVerdict::ForcedEvasion : DiffVerdict::NoChange;
    report.stats = interception_stats(*wrapped);
    return report;
}

}  // namespace mirage::deception
