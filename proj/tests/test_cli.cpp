#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mirage/cli/commands.hpp"
#include "mirage/cli/render.hpp"
#include "mirage/corpus/corpus.hpp"
#include "mirage/pefile/pe_builder.hpp"
#include "mirage/util/hash.hpp"
#include "mirage/util/io.hpp"

using namespace mirage;
using namespace mirage::cli;
namespace fs = std::filesystem;

namespace {

std::string asset(const std::string& rel) {
    return std::string(MIRAGE_TEST_ASSET_DIR) + "/" + rel;
}

std::string tmp_dir(const std::string& name) {
    std::string dir = std::string(MIRAGE_TEST_TMP_DIR) + "/" + name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct CmdResult {
    int exit_code;
    std::string out;
    std::string err;
};

template <typename Fn, typename Opts>
CmdResult invoke(Fn fn, const Opts& opts) {
    std::ostringstream out, err;
    int code = fn(opts, out, err);
    return {code, out.str(), err.str()};
}

const std::string& corpus_dir() {
    static const std::string dir = [] {
        std::string d = std::string(MIRAGE_TEST_TMP_DIR) + "/corpus_cli";
        fs::remove_all(d);
        corpus::write_corpus(d);
        return d;
    }();
    return dir;
}

Json parse_json(const std::string& text) { return Json::parse(text); }

void check_round_trip(const std::string& emitted) {
    Json parsed = Json::parse(emitted);
    CHECK(dump_json(parsed) == emitted);
}

}  // namespace

TEST_CASE("scan: corpus reproduces the per-rule totals") {
    ScanOptions opts;
    opts.paths = {corpus_dir()};
    opts.rules_file = asset("rules/default.yar");
    opts.format = "json";
    auto result = invoke(cmd_scan, opts);
    CHECK(result.exit_code == kExitMatch);

    Json j = parse_json(result.out);
    const auto& counts = j["summary"]["rule_counts"];
    CHECK(counts["debugger"] == 20);
    CHECK(counts["av_sandbox"] == 0);
    CHECK(counts["folder_manipulation"] == 5);
    CHECK(counts["mac_addresses"] == 37);
    CHECK(counts["find_window"] == 0);
    // verdicts.csv rides along in the directory and is scanned as a non-PE
    // file; it matches no rule.
    CHECK(j["summary"]["files_scanned"] == 63);
    CHECK(j["summary"]["matched_files"] == 62);

    check_round_trip(result.out);
}

TEST_CASE("scan: empty directory exits clean") {
    ScanOptions opts;
    opts.paths = {tmp_dir("empty_scan")};
    opts.rules_file = asset("rules/default.yar");
    opts.format = "json";
    auto result = invoke(cmd_scan, opts);
    CHECK(result.exit_code == kExitOk);
    Json j = parse_json(result.out);
    CHECK(j["files"].empty());
}

TEST_CASE("scan: non-PE file still matches pure string rules") {
    std::string dir = tmp_dir("nonpe_scan");
    util::write_text_file(dir + "/note.txt", "this mentions ollydbg somewhere");
    std::string rules = dir + "/r.yar";
    util::write_text_file(rules, "rule t { strings: $a = \"ollydbg\" condition: $a }");

    ScanOptions opts;
    opts.paths = {dir + "/note.txt"};
    opts.rules_file = rules;
    opts.format = "json";
    auto result = invoke(cmd_scan, opts);
    CHECK(result.exit_code == kExitMatch);
    Json j = parse_json(result.out);
    CHECK(j["files"][0]["pe"].is_null());
    CHECK(j["files"][0]["rules"][0]["matched"] == true);
}

TEST_CASE("scan: missing paths error per-file; exit 2 only when all fail") {
    ScanOptions opts;
    opts.rules_file = asset("rules/default.yar");
    opts.format = "json";

    opts.paths = {"/nonexistent/one", "/nonexistent/two"};
    CHECK(invoke(cmd_scan, opts).exit_code == kExitError);

    std::string dir = tmp_dir("partial_scan");
    util::write_text_file(dir + "/plain.txt", "nothing evasive here");
    opts.paths = {"/nonexistent/one", dir + "/plain.txt"};
    auto result = invoke(cmd_scan, opts);
    CHECK(result.exit_code == kExitOk);  // one readable file, no matches
    Json j = parse_json(result.out);
    CHECK(j["summary"]["files_failed"] == 1);

    // bad rules file
    ScanOptions bad;
    bad.paths = {dir + "/plain.txt"};
    bad.rules_file = "/nonexistent/rules.yar";
    CHECK(invoke(cmd_scan, bad).exit_code == kExitError);
}

TEST_CASE("triage: corpus selects 18 samples in the published group shape") {
    TriageOptions opts;
    opts.dir = corpus_dir();
    opts.rules_file = asset("rules/default.yar");
    opts.verdicts_file = corpus_dir() + "/verdicts.csv";
    opts.format = "json";
    auto result = invoke(cmd_triage, opts);
    CHECK(result.exit_code == kExitOk);

    Json j = parse_json(result.out);
    CHECK(j["summary"]["total"] == 62);
    CHECK(j["summary"]["selected"] == 18);
    CHECK(j["summary"]["group_sizes"] == Json::array({7, 6, 1, 1, 1, 1, 1}));
    CHECK(j["summary"]["selected_rule_counts"]["debugger"] == 16);
    CHECK(j["summary"]["selected_rule_counts"]["mac_addresses"] == 2);
    CHECK(j["summary"]["selected_rule_counts"]["folder_manipulation"] == 0);

    REQUIRE(j["groups"].size() == 7);
    CHECK(j["groups"][0]["group"] == "A");
    CHECK(j["groups"][0]["size"] == 7);
    CHECK(j["groups"][1]["group"] == "B");
    CHECK(j["groups"][1]["size"] == 6);
    for (int g = 2; g < 7; ++g) CHECK(j["groups"][g]["size"] == 1);

    // Signed samples never select, even when they match rules.
    for (const auto& rec : j["records"]) {
        if (rec.contains("signed") && rec["signed"].get<bool>()) {
            CHECK(rec["selected"] == false);
        }
    }
    check_round_trip(result.out);

    // The text rendering lists group letters with member hashes.
    opts.format = "text";
    auto text = invoke(cmd_triage, opts);
    CHECK(text.out.find("group sizes: 7 6 1 1 1 1 1") != std::string::npos);
    CHECK(text.out.find("selected: 18 of 62") != std::string::npos);
}

TEST_CASE("triage selection predicate over all matched/signed/verdict combinations") {
    std::string dir = tmp_dir("predicate");
    std::string rules = dir + "/r.yar";
    util::write_text_file(rules, "rule t { strings: $a = \"TRIGGER\" condition: $a }");

    std::string csv;
    struct Case {
        std::string name;
        bool matched, signed_, malicious;
    };
    std::vector<Case> cases;
    for (bool matched : {false, true}) {
        for (bool is_signed : {false, true}) {
            for (bool malicious : {false, true}) {
                Case c;
                c.name = std::string("m") + (matched ? "1" : "0") + (is_signed ? "s1" : "s0") +
                         (malicious ? "v1" : "v0") + ".exe";
                c.matched = matched;
                c.signed_ = is_signed;
                c.malicious = malicious;
                cases.push_back(c);
            }
        }
    }
    for (const auto& c : cases) {
        pefile::PeFileSpec spec;
        // Embed the case name so every file hashes uniquely.
        std::string text = (c.matched ? "xx TRIGGER yy " : "xx nothing yy ") + c.name;
        spec.sections.push_back(
            {".text", std::vector<std::uint8_t>(text.begin(), text.end()), 0x60000020});
        spec.with_certificate = c.signed_;
        auto bytes = pefile::build_pe(spec);
        util::write_file(dir + "/" + c.name, bytes);
        csv += util::md5_hex(bytes) + "," + (c.malicious ? "malicious" : "benign") + "\n";
    }
    std::string verdicts = dir + "/v.csv";
    util::write_text_file(verdicts, csv);

    TriageOptions opts;
    opts.dir = dir;
    opts.rules_file = rules;
    opts.verdicts_file = verdicts;
    opts.format = "json";
    Json j = parse_json(invoke(cmd_triage, opts).out);

    for (const auto& rec : j["records"]) {
        std::string name = fs::path(rec["file"].get<std::string>()).filename().string();
        if (name == "v.csv") continue;
        bool matched = name[1] == '1';
        bool is_signed = name[3] == '1';
        bool malicious = name[5] == '1';
        bool expected = matched && !is_signed && malicious;
        CAPTURE(name);
        CHECK(rec["selected"].get<bool>() == expected);
    }
    CHECK(j["summary"]["selected"] == 1);
}

TEST_CASE("triage: samples missing from the verdict file stay unknown") {
    std::string dir = tmp_dir("unknown_verdict");
    std::string rules = dir + "/r.yar";
    util::write_text_file(rules, "rule t { strings: $a = \"TRIGGER\" condition: $a }");
    pefile::PeFileSpec spec;
    std::string text = "xx TRIGGER yy";
    spec.sections.push_back(
        {".text", std::vector<std::uint8_t>(text.begin(), text.end()), 0x60000020});
    util::write_file(dir + "/sample.exe", pefile::build_pe(spec));
    util::write_text_file(dir + "/v.csv", "");  // empty verdict table

    TriageOptions opts;
    opts.dir = dir;
    opts.rules_file = rules;
    opts.verdicts_file = dir + "/v.csv";
    opts.format = "json";
    Json j = parse_json(invoke(cmd_triage, opts).out);
    bool found = false;
    for (const auto& rec : j["records"]) {
        if (fs::path(rec["file"].get<std::string>()).filename() == "sample.exe") {
            found = true;
            CHECK(rec["verdict"] == "unknown");
            CHECK(rec["selected"] == false);
        }
    }
    CHECK(found);
}

TEST_CASE("probe: kaspersky fixture identifies the AV and exits evade") {
    ProbeOptions opts;
    opts.env_file = asset("envs/kaspersky.env.json");
    opts.categories = "av";
    opts.format = "json";
    auto result = invoke(cmd_probe, opts);
    CHECK(result.exit_code == kExitEvade);
    Json j = parse_json(result.out);
    CHECK(j["identified_av"] == "Kaspersky");
    CHECK(j["verdicts"]["av"] == "evade");
    check_round_trip(result.out);
}

TEST_CASE("probe: clean host proceeds") {
    ProbeOptions opts;
    opts.env_file = asset("envs/clean.env.json");
    opts.format = "json";
    auto result = invoke(cmd_probe, opts);
    CHECK(result.exit_code == kExitOk);
    Json j = parse_json(result.out);
    for (const auto& f : j["findings"]) CHECK(f["detected"] == false);
}

TEST_CASE("probe: no categories runs no probes") {
    ProbeOptions opts;
    opts.env_file = asset("envs/saturated.env.json");
    opts.categories = "none";
    opts.format = "json";
    auto result = invoke(cmd_probe, opts);
    CHECK(result.exit_code == kExitOk);
    Json j = parse_json(result.out);
    CHECK(j["findings"].empty());
}

TEST_CASE("probe: schema and usage errors exit 2") {
    ProbeOptions opts;
    opts.env_file = asset("policies/default.policy.json");  // not a snapshot
    CHECK(invoke(cmd_probe, opts).exit_code == kExitError);

    opts.env_file = asset("envs/clean.env.json");
    opts.categories = "debugger,bogus";
    CHECK(invoke(cmd_probe, opts).exit_code == kExitError);
}

TEST_CASE("deceive: clean host with defaults forces evasion with 7 flips") {
    DeceiveOptions opts;
    opts.env_file = asset("envs/clean.env.json");
    opts.format = "json";
    auto result = invoke(cmd_deceive, opts);
    CHECK(result.exit_code == kExitOk);
    Json j = parse_json(result.out);
    CHECK(j["verdict"] == "FORCED_EVASION");
    CHECK(j["flip_count"] == 7);
    check_round_trip(result.out);

    // The text table marks the pass-through probes as uncovered.
    opts.format = "text";
    auto text = invoke(cmd_deceive, opts);
    CHECK(text.out.find("(uncovered)") != std::string::npos);
    CHECK(text.out.find("FORCED_EVASION") != std::string::npos);
}

TEST_CASE("deceive: identity policy and saturated host both exit NO_CHANGE") {
    DeceiveOptions opts;
    opts.env_file = asset("envs/clean.env.json");
    opts.policy_file = asset("policies/empty.policy.json");
    opts.format = "json";
    auto result = invoke(cmd_deceive, opts);
    CHECK(result.exit_code == kExitNoChange);
    CHECK(parse_json(result.out)["verdict"] == "NO_CHANGE");

    DeceiveOptions saturated;
    saturated.env_file = asset("envs/saturated.env.json");
    saturated.format = "json";
    CHECK(invoke(cmd_deceive, saturated).exit_code == kExitNoChange);

    DeceiveOptions bad;
    bad.env_file = asset("envs/clean.env.json");
    bad.policy_file = asset("envs/clean.env.json");  // snapshot is not a policy
    CHECK(invoke(cmd_deceive, bad).exit_code == kExitError);
}

TEST_CASE("bench: usage errors and the api-light zero-fake guarantee") {
    BenchOptions opts;
    opts.iterations = 0;
    CHECK(invoke(cmd_bench, opts).exit_code == kExitError);
    opts.iterations = 1;
    CHECK(invoke(cmd_bench, opts).exit_code == kExitError);

    opts.iterations = 3;
    opts.workload = "unknown";
    CHECK(invoke(cmd_bench, opts).exit_code == kExitError);

    opts.workload = "api-light";
    opts.format = "json";
    auto result = invoke(cmd_bench, opts);
    CHECK(result.exit_code == kExitOk);
    Json j = parse_json(result.out);
    CHECK(j["faked_answers"] == 0);
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][0]["countermeasure"] == true);
    CHECK(j["rows"][1]["countermeasure"] == false);
    check_round_trip(result.out);

    opts.workload = "probe-heavy";
    opts.format = "text";
    auto text = invoke(cmd_bench, opts);
    CHECK(text.exit_code == kExitOk);
    CHECK(text.out.find("[countermeasure on]") != std::string::npos);
    CHECK(text.out.find("[countermeasure off]") != std::string::npos);
    CHECK(text.out.find("overhead:") != std::string::npos);
}
