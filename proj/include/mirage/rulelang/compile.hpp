#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "mirage/rulelang/aho_corasick.hpp"
#include "mirage/rulelang/ast.hpp"

namespace mirage::rulelang {

// A compiled rule set: every pattern variant (ascii / wide, exact / folded)
// registered in a multi-pattern automaton, conditions retained as evaluable
// trees. Immutable after compile and safe to share across concurrent scans.
class CompiledRuleSet {
public:
    struct Variant {
        std::uint32_t rule_index;
        std::uint32_t pattern_index;
        std::uint32_t length;
    };

    const RuleSet& rules() const { return rules_; }
    std::size_t pattern_index_of(std::size_t rule_index, const std::string& id) const {
        return pattern_index_.at(rule_index).at(id);
    }

private:
    friend CompiledRuleSet compile(RuleSet rs);
    friend struct MatchAccess;

    RuleSet rules_;
    AhoCorasick exact_;
    AhoCorasick folded_;
    std::vector<Variant> exact_variants_;
    std::vector<Variant> folded_variants_;
    std::vector<std::unordered_map<std::string, std::size_t>> pattern_index_;
};

// Expand modifiers into concrete byte variants and build the automatons.
// `wide` is the UTF-16LE byte expansion; `nocase` variants are registered in
// a case-folded automaton.
CompiledRuleSet compile(RuleSet rs);

}  // namespace mirage::rulelang
