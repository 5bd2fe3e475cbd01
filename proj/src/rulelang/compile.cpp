#include "mirage/rulelang/compile.hpp"

#include "mirage/util/text.hpp"

namespace mirage::rulelang {

namespace {

std::vector<std::uint8_t> widen(const std::vector<std::uint8_t>& text) {
    std::vector<std::uint8_t> out;
    out.reserve(text.size() * 2);
    for (std::uint8_t b : text) {
        out.push_back(b);
        out.push_back(0);
    }
    return out;
}

std::vector<std::uint8_t> fold(const std::vector<std::uint8_t>& text) {
    std::vector<std::uint8_t> out(text);
    for (auto& b : out) b = util::ascii_lower(b);
    return out;
}

}  // namespace

CompiledRuleSet compile(RuleSet rs) {
    CompiledRuleSet crs;
    crs.rules_ = std::move(rs);

    for (std::size_t r = 0; r < crs.rules_.rules.size(); ++r) {
        const Rule& rule = crs.rules_.rules[r];
        crs.pattern_index_.emplace_back();
        for (std::size_t p = 0; p < rule.strings.size(); ++p) {
            const PatternDef& pat = rule.strings[p];
            crs.pattern_index_.back()[pat.id] = p;

            std::vector<std::vector<std::uint8_t>> encodings;
            if (pat.matches_ascii()) encodings.push_back(pat.text);
            if (pat.matches_wide()) encodings.push_back(widen(pat.text));

            for (auto& enc : encodings) {
                CompiledRuleSet::Variant v{static_cast<std::uint32_t>(r),
                                           static_cast<std::uint32_t>(p),
                                           static_cast<std::uint32_t>(enc.size())};
                if (pat.nocase) {
                    auto folded = fold(enc);
                    crs.folded_.add_pattern(folded,
                                            static_cast<std::uint32_t>(crs.folded_variants_.size()));
                    crs.folded_variants_.push_back(v);
                } else {
                    crs.exact_.add_pattern(enc,
                                           static_cast<std::uint32_t>(crs.exact_variants_.size()));
                    crs.exact_variants_.push_back(v);
                }
            }
        }
    }
    crs.exact_.build();
    crs.folded_.build();
    return crs;
}

}  // namespace mirage::rulelang
