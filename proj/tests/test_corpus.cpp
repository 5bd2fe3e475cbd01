#include <doctest.h>

#include <filesystem>
#include <map>
#include <set>

#include "mirage/corpus/corpus.hpp"
#include "mirage/pefile/parse.hpp"
#include "mirage/rulelang/match.hpp"
#include "mirage/rulelang/parse.hpp"
#include "mirage/util/hash.hpp"
#include "mirage/util/io.hpp"

using namespace mirage;
using namespace mirage::corpus;

namespace {

std::string asset(const std::string& rel) {
    return std::string(MIRAGE_TEST_ASSET_DIR) + "/" + rel;
}

rulelang::CompiledRuleSet shipped_rules() {
    return rulelang::compile(
        rulelang::parse_ruleset(util::read_text_file(asset("rules/default.yar"))));
}

}  // namespace

TEST_CASE("blueprint composition") {
    const auto& bps = corpus_blueprints();
    REQUIRE(bps.size() == 62);

    std::map<std::string, int> family_counts;
    std::map<char, int> group_counts;
    int selected_by_design = 0;
    for (const auto& bp : bps) {
        ++family_counts[bp.family];
        if (bp.group) {
            ++group_counts[bp.group];
            CHECK_FALSE(bp.with_certificate);
            CHECK(bp.verdict == "malicious");
            ++selected_by_design;
        }
    }
    CHECK(family_counts["debugger"] == 20);
    CHECK(family_counts["folder"] == 5);
    CHECK(family_counts["mac"] == 37);
    CHECK(selected_by_design == 18);
    CHECK(group_counts['A'] == 7);
    CHECK(group_counts['B'] == 6);
    for (char g : {'C', 'D', 'E', 'F', 'G'}) CHECK(group_counts[g] == 1);
}

TEST_CASE("samples build deterministically with unique hashes") {
    const auto& bps = corpus_blueprints();
    std::set<std::string> md5s;
    for (const auto& bp : bps) {
        auto once = build_sample(bp);
        auto twice = build_sample(bp);
        CHECK(once == twice);
        CHECK(md5s.insert(util::md5_hex(once)).second);
    }
    CHECK(md5s.size() == 62);
}

TEST_CASE("every sample parses as a PE with the blueprinted signedness") {
    for (const auto& bp : corpus_blueprints()) {
        auto bytes = build_sample(bp);
        pefile::PeImage img = pefile::parse_pe(bytes);
        CAPTURE(bp.filename);
        CHECK(img.has_certificate_table == bp.with_certificate);
        bool has_text = false;
        for (const auto& s : img.sections) {
            if (s.name == ".text") has_text = true;
        }
        CHECK(has_text);
    }
}

TEST_CASE("each sample matches exactly its family rule") {
    auto rules = shipped_rules();
    std::map<std::string, std::string> family_to_rule = {
        {"debugger", "debugger"}, {"folder", "folder_manipulation"}, {"mac", "mac_addresses"}};

    std::map<std::string, std::uint64_t> counts;
    for (const auto& bp : corpus_blueprints()) {
        auto bytes = build_sample(bp);
        pefile::PeImage img = pefile::parse_pe(bytes);
        rulelang::SubjectFacts facts;
        for (const auto& imp : img.imports) facts.imports.push_back({imp.dll, imp.functions});
        facts.file_entropy = img.file_entropy;
        facts.has_certificate = img.has_certificate_table;

        auto report = rulelang::match_subject(rules, {bytes, &facts});
        CAPTURE(bp.filename);
        for (const auto& r : report.rules) {
            bool should_match = family_to_rule.at(bp.family) == r.name;
            CHECK(r.matched == should_match);
            if (r.matched) ++counts[r.name];
        }
    }
    CHECK(counts["debugger"] == 20);
    CHECK(counts["folder_manipulation"] == 5);
    CHECK(counts["mac_addresses"] == 37);
    CHECK(counts["av_sandbox"] == 0);
    CHECK(counts["find_window"] == 0);
}

TEST_CASE("write_corpus emits the samples and the verdict file") {
    std::string dir = std::string(MIRAGE_TEST_TMP_DIR) + "/corpus_lib";
    std::filesystem::remove_all(dir);
    auto written = write_corpus(dir);
    REQUIRE(written.size() == 62);

    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() == ".exe") ++files;
    }
    CHECK(files == 62);

    // verdicts.csv lists exactly the samples that carry a verdict.
    std::string csv = util::read_text_file(dir + "/verdicts.csv");
    std::size_t lines = 0;
    for (char c : csv) {
        if (c == '\n') ++lines;
    }
    std::size_t with_verdict = 0;
    for (const auto& w : written) {
        if (!w.blueprint.verdict.empty()) ++with_verdict;
        CHECK(w.md5.size() == 32);
    }
    CHECK(lines == with_verdict);
}
