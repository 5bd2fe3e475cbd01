#include "mirage/rulelang/match.hpp"

#include <algorithm>

#include "mirage/util/text.hpp"

namespace mirage::rulelang {

namespace {

struct Facts {
    const Rule* rule;
    const std::vector<bool>* found;
    const std::unordered_map<std::string, std::size_t>* index;
    const SubjectFacts* subject;
};

bool eval(const Condition& c, const Facts& f) {
    using K = Condition::Kind;
    switch (c.kind) {
        case K::PatternRef:
            return (*f.found)[f.index->at(c.pattern_id)];
        case K::And:
            for (const auto& ch : c.children)
                if (!eval(ch, f)) return false;
            return true;
        case K::Or:
            for (const auto& ch : c.children)
                if (eval(ch, f)) return true;
            return false;
        case K::Not:
            return !eval(c.children[0], f);
        case K::CountOf:
        case K::AnyOf:
        case K::AllOf: {
            std::size_t hit = 0, total = 0;
            auto visit = [&](std::size_t idx) {
                ++total;
                if ((*f.found)[idx]) ++hit;
            };
            if (c.set_is_them) {
                for (std::size_t i = 0; i < f.found->size(); ++i) visit(i);
            } else {
                for (const auto& id : c.set_ids) visit(f.index->at(id));
            }
            if (c.kind == K::AllOf) return hit == total;
            std::size_t need = c.kind == K::AnyOf ? 1 : static_cast<std::size_t>(c.count);
            return hit >= need;
        }
        case K::Import: {
            if (!f.subject) return false;
            for (const auto& imp : f.subject->imports) {
                if (!util::equals_ci(imp.dll, c.dll)) continue;
                for (const auto& fn : imp.functions) {
                    if (fn == c.function) return true;  // function names case-sensitive
                }
            }
            return false;
        }
        case K::EntropyCmp: {
            if (!f.subject || !f.subject->file_entropy) return false;
            double h = *f.subject->file_entropy;
            switch (c.cmp) {
                case CmpOp::Lt: return h < c.threshold;
                case CmpOp::Le: return h <= c.threshold;
                case CmpOp::Gt: return h > c.threshold;
                case CmpOp::Ge: return h >= c.threshold;
            }
            return false;
        }
        case K::Unsigned:
            return f.subject && f.subject->has_certificate && !*f.subject->has_certificate;
    }
    return false;
}

}  // namespace

struct MatchAccess {
    static void run(const CompiledRuleSet& crs, std::span<const std::uint8_t> bytes,
                    std::vector<std::vector<std::vector<std::uint64_t>>>& offsets) {
        auto record = [&](const std::vector<CompiledRuleSet::Variant>& variants,
                          std::uint32_t value, std::size_t end) {
            const auto& v = variants[value];
            offsets[v.rule_index][v.pattern_index].push_back(end + 1 - v.length);
        };
        crs.exact_.scan(bytes, false, [&](std::uint32_t value, std::size_t end) {
            record(crs.exact_variants_, value, end);
        });
        crs.folded_.scan(bytes, true, [&](std::uint32_t value, std::size_t end) {
            record(crs.folded_variants_, value, end);
        });
    }
};

MatchReport match_subject(const CompiledRuleSet& crs, const ScanSubject& subject) {
    const RuleSet& rs = crs.rules();

    // Per (rule, pattern) offset accumulation.
    std::vector<std::vector<std::vector<std::uint64_t>>> offsets(rs.rules.size());
    for (std::size_t r = 0; r < rs.rules.size(); ++r) {
        offsets[r].resize(rs.rules[r].strings.size());
    }
    MatchAccess::run(crs, subject.bytes, offsets);

    MatchReport report;
    report.rules.reserve(rs.rules.size());
    for (std::size_t r = 0; r < rs.rules.size(); ++r) {
        const Rule& rule = rs.rules[r];
        RuleMatch rm;
        rm.name = rule.name;
        std::vector<bool> found(rule.strings.size(), false);
        for (std::size_t p = 0; p < rule.strings.size(); ++p) {
            auto& offs = offsets[r][p];
            std::sort(offs.begin(), offs.end());
            offs.erase(std::unique(offs.begin(), offs.end()), offs.end());
            found[p] = !offs.empty();
            rm.patterns.push_back({rule.strings[p].id, std::move(offs)});
        }
        std::unordered_map<std::string, std::size_t> index;
        for (std::size_t p = 0; p < rule.strings.size(); ++p) index[rule.strings[p].id] = p;
        Facts facts{&rule, &found, &index, subject.facts};
        rm.matched = eval(rule.condition, facts);
        report.rules.push_back(std::move(rm));
    }
    return report;
}

CorpusReport match_corpus(const CompiledRuleSet& crs, std::span<const ScanSubject> subjects) {
    CorpusReport out;
    for (const auto& rule : crs.rules().rules) out.rule_counts.emplace_back(rule.name, 0);
    out.reports.reserve(subjects.size());
    for (const auto& subject : subjects) {
        MatchReport report = match_subject(crs, subject);
        for (std::size_t r = 0; r < report.rules.size(); ++r) {
            if (report.rules[r].matched) ++out.rule_counts[r].second;
        }
        out.reports.push_back(std::move(report));
    }
    return out;
}

}  // namespace mirage::rulelang
