#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mirage/rulelang/compile.hpp"

namespace mirage::rulelang {

struct ImportFact {
    std::string dll;
    std::vector<std::string> functions;
};

// Static facts feeding the import/entropy/signedness predicates. Absent
// facts make those predicates false, never an error.
struct SubjectFacts {
    std::vector<ImportFact> imports;
    std::optional<double> file_entropy;
    std::optional<bool> has_certificate;
};

struct ScanSubject {
    std::span<const std::uint8_t> bytes;
    const SubjectFacts* facts = nullptr;
};

struct PatternMatches {
    std::string id;
    std::vector<std::uint64_t> offsets;  // strictly increasing, deduplicated across variants
};

struct RuleMatch {
    std::string name;
    bool matched = false;
    std::vector<PatternMatches> patterns;
};

struct MatchReport {
    std::vector<RuleMatch> rules;
    bool any_matched() const {
        for (const auto& r : rules)
            if (r.matched) return true;
        return false;
    }
};

MatchReport match_subject(const CompiledRuleSet& crs, const ScanSubject& subject);

struct CorpusReport {
    std::vector<MatchReport> reports;  // input order
    std::vector<std::pair<std::string, std::uint64_t>> rule_counts;  // ruleset order
};

CorpusReport match_corpus(const CompiledRuleSet& crs, std::span<const ScanSubject> subjects);

}  // namespace mirage::rulelang
