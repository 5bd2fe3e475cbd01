#include "mirage/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>

#include "mirage/cli/render.hpp"
#include "mirage/corpus/corpus.hpp"
#include "mirage/deception/diff.hpp"
#include "mirage/deception/policy.hpp"
#include "mirage/envmodel/api_surface.hpp"
#include "mirage/envmodel/snapshot.hpp"
#include "mirage/pefile/entropy.hpp"
#include "mirage/pefile/grouping.hpp"
#include "mirage/pefile/parse.hpp"
#include "mirage/probes/runner.hpp"
#include "mirage/rulelang/match.hpp"
#include "mirage/rulelang/parse.hpp"
#include "mirage/util/hash.hpp"
#include "mirage/util/io.hpp"
#include "mirage/util/text.hpp"

namespace mirage::cli {

namespace fs = std::filesystem;

#ifndef MIRAGE_ASSET_DIR
#define MIRAGE_ASSET_DIR "assets"
#endif

std::string default_asset_dir() { return MIRAGE_ASSET_DIR; }

namespace {

std::string watchlist_dir_or_default(const std::string& given) {
    return given.empty() ? default_asset_dir() + "/watchlists" : given;
}

std::vector<std::string> collect_files(const std::vector<std::string>& paths,
                                       std::vector<std::string>& errors) {
    std::vector<std::string> files;
    for (const auto& p : paths) {
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<std::string> dir_files;
            for (const auto& entry : fs::directory_iterator(p, ec)) {
                if (entry.is_regular_file()) dir_files.push_back(entry.path().string());
            }
            std::sort(dir_files.begin(), dir_files.end());
            files.insert(files.end(), dir_files.begin(), dir_files.end());
        } else if (fs::exists(p, ec)) {
            files.push_back(p);
        } else {
            errors.push_back(p);
        }
    }
    return files;
}

struct ScannedFile {
    std::string path;
    std::string error;  // non-empty when the file could not be processed
    std::string md5;
    std::optional<pefile::PeImage> image;
    std::vector<std::uint8_t> bytes;
    rulelang::MatchReport report;
};

rulelang::SubjectFacts facts_of(const pefile::PeImage& img) {
    rulelang::SubjectFacts facts;
    for (const auto& imp : img.imports) facts.imports.push_back({imp.dll, imp.functions});
    facts.file_entropy = img.file_entropy;
    facts.has_certificate = img.has_certificate_table;
    return facts;
}

ScannedFile scan_one(const rulelang::CompiledRuleSet& rules, const std::string& path) {
    ScannedFile f;
    f.path = path;
    try {
        f.bytes = util::read_file(path);
    } catch (const std::exception& e) {
        f.error = e.what();
        return f;
    }
    f.md5 = util::md5_hex(f.bytes);
    try {
        f.image = pefile::parse_pe(f.bytes);
    } catch (const std::exception&) {
        // Not a PE: pattern matching still applies, PE predicates are false.
        f.image.reset();
    }
    rulelang::SubjectFacts facts;
    if (f.image) facts = facts_of(*f.image);
    rulelang::ScanSubject subject{f.bytes, f.image ? &facts : nullptr};
    f.report = rulelang::match_subject(rules, subject);
    return f;
}

std::optional<rulelang::CompiledRuleSet> load_rules(const std::string& rules_file,
                                                    std::ostream& err) {
    try {
        return rulelang::compile(rulelang::parse_ruleset(util::read_text_file(rules_file)));
    } catch (const std::exception& e) {
        err << "error: rules: " << e.what() << "\n";
        return std::nullopt;
    }
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

Json scan_report_json(const std::vector<ScannedFile>& files,
                      const rulelang::CompiledRuleSet& rules) {
    Json j;
    j["command"] = "scan";
    j["files"] = Json::array();
    std::map<std::string, std::uint64_t> counts;
    for (const auto& rule : rules.rules().rules) counts[rule.name] = 0;
    std::uint64_t failed = 0, matched_files = 0;
    for (const auto& f : files) {
        Json entry;
        entry["path"] = f.path;
        if (!f.error.empty()) {
            entry["error"] = f.error;
            ++failed;
            j["files"].push_back(std::move(entry));
            continue;
        }
        entry["md5"] = f.md5;
        entry["pe"] = f.image ? pe_image_json(*f.image) : Json(nullptr);
        entry["rules"] = match_report_json(f.report);
        if (f.report.any_matched()) ++matched_files;
        for (const auto& r : f.report.rules) {
            if (r.matched) ++counts[r.name];
        }
        j["files"].push_back(std::move(entry));
    }
    Json summary;
    summary["files_scanned"] = files.size() - failed;
    summary["files_failed"] = failed;
    summary["matched_files"] = matched_files;
    Json rule_counts;
    for (const auto& rule : rules.rules().rules) rule_counts[rule.name] = counts[rule.name];
    summary["rule_counts"] = std::move(rule_counts);
    j["summary"] = std::move(summary);
    return j;
}

void scan_report_text(const Json& j, std::ostream& out) {
    for (const auto& f : j["files"]) {
        out << f["path"].get<std::string>();
        if (f.contains("error")) {
            out << "  error: " << f["error"].get<std::string>() << "\n";
            continue;
        }
        out << "  md5=" << f["md5"].get<std::string>();
        std::vector<std::string> matched;
        for (const auto& r : f["rules"]) {
            if (r["matched"].get<bool>()) matched.push_back(r["rule"].get<std::string>());
        }
        out << "  matched=[";
        for (std::size_t i = 0; i < matched.size(); ++i) out << (i ? "," : "") << matched[i];
        out << "]";
        if (!f["pe"].is_null()) {
            out << "  entropy=" << fmt_double(f["pe"]["file_entropy"].get<double>())
                << "  signed=" << (f["pe"]["has_certificate_table"].get<bool>() ? "yes" : "no");
        }
        out << "\n";
    }
    const auto& summary = j["summary"];
    out << "rule counts:";
    for (auto it = summary["rule_counts"].begin(); it != summary["rule_counts"].end(); ++it) {
        out << " " << it.key() << "=" << it.value().get<std::uint64_t>();
    }
    out << "\nfiles: " << summary["files_scanned"].get<std::uint64_t>() << " scanned, "
        << summary["files_failed"].get<std::uint64_t>() << " failed\n";
}

// ---------------------------------------------------------------------------
// triage
// ---------------------------------------------------------------------------

std::map<std::string, std::string> load_verdicts(const std::string& path) {
    std::map<std::string, std::string> verdicts;
    std::string text = util::read_text_file(path);
    for (const auto& raw : util::split(text, '\n')) {
        std::string line = util::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        std::string md5 = util::to_lower(util::trim(line.substr(0, comma)));
        std::string verdict = util::to_lower(util::trim(line.substr(comma + 1)));
        if (verdict != "malicious" && verdict != "benign") verdict = "unknown";
        verdicts[md5] = verdict;
    }
    return verdicts;
}

std::string group_letter(std::size_t index) {
    std::string letter;
    do {
        letter.insert(letter.begin(), static_cast<char>('A' + index % 26));
        index = index / 26;
    } while (index-- > 0);
    return letter;
}

}  // namespace

int cmd_scan(const ScanOptions& opts, std::ostream& out, std::ostream& err) {
    auto rules = load_rules(opts.rules_file, err);
    if (!rules) return kExitError;

    std::vector<std::string> missing;
    std::vector<std::string> paths = collect_files(opts.paths, missing);

    std::vector<ScannedFile> files;
    for (const auto& p : missing) {
        ScannedFile f;
        f.path = p;
        f.error = "no such file or directory";
        files.push_back(std::move(f));
    }
    for (const auto& p : paths) files.push_back(scan_one(*rules, p));

    Json report = scan_report_json(files, *rules);
    if (opts.format == "json") {
        out << dump_json(report);
    } else {
        scan_report_text(report, out);
    }

    const auto& summary = report["summary"];
    bool any_input = !files.empty();
    bool all_failed = any_input && summary["files_scanned"].get<std::uint64_t>() == 0;
    if (all_failed) return kExitError;
    return summary["matched_files"].get<std::uint64_t>() > 0 ? kExitMatch : kExitOk;
}

int cmd_triage(const TriageOptions& opts, std::ostream& out, std::ostream& err) {
    auto rules = load_rules(opts.rules_file, err);
    if (!rules) return kExitError;

    std::map<std::string, std::string> verdicts;
    try {
        verdicts = load_verdicts(opts.verdicts_file);
    } catch (const std::exception& e) {
        err << "error: verdicts: " << e.what() << "\n";
        return kExitError;
    }

    std::error_code ec;
    if (!fs::is_directory(opts.dir, ec)) {
        err << "error: not a directory: " << opts.dir << "\n";
        return kExitError;
    }
    std::vector<std::string> missing;
    std::vector<std::string> paths = collect_files({opts.dir}, missing);

    struct Record {
        ScannedFile file;
        std::string verdict;
        bool selected = false;
        std::string group_key;
        std::string group;
    };
    std::vector<Record> records;
    for (const auto& p : paths) {
        // Verdict files may carry non-sample entries (verdicts.csv itself).
        if (fs::path(p).filename() == fs::path(opts.verdicts_file).filename()) continue;
        Record rec;
        rec.file = scan_one(*rules, p);
        if (rec.file.error.empty()) {
            auto it = verdicts.find(rec.file.md5);
            rec.verdict = it == verdicts.end() ? "unknown" : it->second;
            bool matched = rec.file.report.any_matched();
            bool is_signed = rec.file.image && rec.file.image->has_certificate_table;
            rec.selected = matched && !is_signed && rec.verdict == "malicious";
        }
        records.push_back(std::move(rec));
    }

    // Group the selected samples by shared code.
    std::vector<pefile::GroupInput> inputs;
    for (const auto& rec : records) {
        if (!rec.selected) continue;
        inputs.push_back({rec.file.md5, rec.file.image ? &*rec.file.image : nullptr,
                          rec.file.bytes});
    }
    auto groups = pefile::group_samples(inputs);
    std::map<std::string, std::string> key_to_letter;
    for (std::size_t g = 0; g < groups.size(); ++g) key_to_letter[groups[g].key] = group_letter(g);
    std::map<std::string, std::string> md5_to_key;
    for (const auto& g : groups) {
        for (const auto& m : g.members) md5_to_key[m] = g.key;
    }
    for (auto& rec : records) {
        if (!rec.selected) continue;
        rec.group_key = md5_to_key[rec.file.md5];
        rec.group = key_to_letter[rec.group_key];
    }

    Json j;
    j["command"] = "triage";
    j["records"] = Json::array();
    std::map<std::string, std::uint64_t> selected_rule_counts;
    for (const auto& rule : rules->rules().rules) selected_rule_counts[rule.name] = 0;
    std::size_t selected_count = 0;
    for (const auto& rec : records) {
        Json entry;
        entry["file"] = rec.file.path;
        if (!rec.file.error.empty()) {
            entry["error"] = rec.file.error;
            j["records"].push_back(std::move(entry));
            continue;
        }
        entry["md5"] = rec.file.md5;
        Json matched = Json::array();
        for (const auto& r : rec.file.report.rules) {
            if (r.matched) matched.push_back(r.name);
        }
        entry["matched_rules"] = std::move(matched);
        entry["signed"] = rec.file.image && rec.file.image->has_certificate_table;
        entry["verdict"] = rec.verdict;
        entry["selected"] = rec.selected;
        entry["group"] = rec.selected ? Json(rec.group) : Json(nullptr);
        if (rec.selected) {
            ++selected_count;
            for (const auto& r : rec.file.report.rules) {
                if (r.matched) ++selected_rule_counts[r.name];
            }
        }
        j["records"].push_back(std::move(entry));
    }
    j["groups"] = Json::array();
    Json group_sizes = Json::array();
    for (std::size_t g = 0; g < groups.size(); ++g) {
        Json entry;
        entry["group"] = group_letter(g);
        entry["key"] = groups[g].key;
        entry["size"] = groups[g].members.size();
        entry["members"] = groups[g].members;
        group_sizes.push_back(groups[g].members.size());
        j["groups"].push_back(std::move(entry));
    }
    Json summary;
    summary["total"] = records.size();
    summary["selected"] = selected_count;
    summary["group_sizes"] = std::move(group_sizes);
    Json src;
    for (const auto& rule : rules->rules().rules) src[rule.name] = selected_rule_counts[rule.name];
    summary["selected_rule_counts"] = std::move(src);
    j["summary"] = std::move(summary);

    if (opts.format == "json") {
        out << dump_json(j);
    } else {
        out << "group  md5                               file\n";
        for (const auto& g : j["groups"]) {
            for (const auto& m : g["members"]) {
                std::string md5 = m.get<std::string>();
                std::string file;
                for (const auto& rec : j["records"]) {
                    if (rec.contains("md5") && rec["md5"] == md5) {
                        file = fs::path(rec["file"].get<std::string>()).filename().string();
                        break;
                    }
                }
                out << g["group"].get<std::string>() << "      " << md5 << "  " << file << "\n";
            }
        }
        out << "group sizes:";
        for (const auto& s : j["summary"]["group_sizes"]) out << " " << s.get<std::uint64_t>();
        out << "\nselected: " << j["summary"]["selected"].get<std::uint64_t>() << " of "
            << j["summary"]["total"].get<std::uint64_t>() << "\n";
    }
    return kExitOk;
}

namespace {

std::optional<std::set<probes::Category>> parse_categories(const std::string& spec) {
    std::set<probes::Category> enabled;
    if (util::trim(spec).empty() || util::equals_ci(util::trim(spec), "none")) return enabled;
    for (const auto& part : util::split(spec, ',')) {
        std::string name = util::to_lower(util::trim(part));
        if (name.empty()) continue;
        if (name == "debugger") {
            enabled.insert(probes::Category::Debugger);
        } else if (name == "av") {
            enabled.insert(probes::Category::Av);
        } else if (name == "vm") {
            enabled.insert(probes::Category::Vm);
        } else {
            return std::nullopt;
        }
    }
    return enabled;
}

void suite_report_text(const Json& j, std::ostream& out) {
    out << "probe                 detected  artifacts\n";
    for (const auto& f : j["findings"]) {
        char line[40];
        std::snprintf(line, sizeof(line), "%-21s %-9s", f["probe"].get<std::string>().c_str(),
                      f["detected"].get<bool>() ? "yes" : "no");
        out << line;
        const auto& artifacts = f["artifacts"];
        for (std::size_t i = 0; i < artifacts.size(); ++i) {
            out << (i ? ", " : "") << artifacts[i].get<std::string>();
        }
        out << "\n";
    }
    out << "verdicts:";
    for (auto it = j["verdicts"].begin(); it != j["verdicts"].end(); ++it) {
        out << " " << it.key() << "=" << it.value().get<std::string>();
    }
    out << "\n";
    if (!j["identified_av"].is_null()) {
        out << "identified av: " << j["identified_av"].get<std::string>() << "\n";
    }
}

}  // namespace

int cmd_probe(const ProbeOptions& opts, std::ostream& out, std::ostream& err) {
    auto enabled = parse_categories(opts.categories);
    if (!enabled) {
        err << "error: unknown category in '" << opts.categories << "'\n";
        return kExitError;
    }

    envmodel::EnvironmentSnapshot snapshot;
    probes::WatchlistSet watchlists;
    probes::AvFingerprints fingerprints;
    try {
        snapshot = envmodel::load_snapshot_file(opts.env_file);
        watchlists = probes::WatchlistSet::load_directory(watchlist_dir_or_default(opts.watchlist_dir));
        std::string fp_file = opts.fingerprints_file.empty()
                                  ? watchlist_dir_or_default(opts.watchlist_dir) + "/av_fingerprints.txt"
                                  : opts.fingerprints_file;
        if (fs::exists(fp_file)) fingerprints = probes::load_fingerprints_file(fp_file);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }

    auto api = envmodel::bind_api(snapshot);
    probes::SuiteReport report = probes::run_suite(*api, watchlists, *enabled,
                                                   fingerprints.empty() ? nullptr : &fingerprints);

    Json suite = suite_report_json(report, *enabled);
    Json j;
    j["command"] = "probe";
    for (auto it = suite.begin(); it != suite.end(); ++it) j[it.key()] = it.value();
    if (opts.format == "json") {
        out << dump_json(j);
    } else {
        suite_report_text(j, out);
    }

    for (probes::Category c : *enabled) {
        if (report.verdicts.at(c) == probes::Verdict::Evade) return kExitEvade;
    }
    return kExitOk;
}

int cmd_deceive(const DeceiveOptions& opts, std::ostream& out, std::ostream& err) {
    envmodel::EnvironmentSnapshot snapshot;
    deception::DeceptionPolicy policy = deception::DeceptionPolicy::defaults();
    probes::WatchlistSet watchlists;
    try {
        snapshot = envmodel::load_snapshot_file(opts.env_file);
        if (!opts.policy_file.empty()) policy = deception::load_policy_file(opts.policy_file);
        watchlists = probes::WatchlistSet::load_directory(watchlist_dir_or_default(opts.watchlist_dir));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }

    deception::ForcedEvasionReport report = deception::diff_run(snapshot, policy, watchlists);
    Json diff = forced_evasion_json(report);
    Json j;
    j["command"] = "deceive";
    for (auto it = diff.begin(); it != diff.end(); ++it) j[it.key()] = it.value();
    if (opts.format == "json") {
        out << dump_json(j);
    } else {
        out << "probe                 before  after   flipped\n";
        for (const auto& p : j["probes"]) {
            char line[64];
            std::snprintf(line, sizeof(line), "%-21s %-7s %-7s %s%s",
                          p["probe"].get<std::string>().c_str(),
                          p["before"]["detected"].get<bool>() ? "X" : "-",
                          p["after"]["detected"].get<bool>() ? "X" : "-",
                          p["flipped"].get<bool>() ? "yes" : "no",
                          p["covered"].get<bool>() ? "" : " (uncovered)");
            out << line << "\n";
        }
        out << "verdict: " << j["verdict"].get<std::string>() << " ("
            << j["flip_count"].get<int>() << " of " << j["probes"].size()
            << " probes flipped)\n";
        out << "interception: intercepted=" << j["interception"]["intercepted"].get<std::uint64_t>()
            << " passthrough=" << j["interception"]["passthrough"].get<std::uint64_t>()
            << " faked=" << j["interception"]["faked"].get<std::uint64_t>() << "\n";
    }
    return report.verdict == deception::DiffVerdict::ForcedEvasion ? kExitOk : kExitNoChange;
}

namespace {

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;
};

Stats timing_stats(const std::vector<double>& xs) {
    Stats s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    var /= static_cast<double>(xs.size() - 1);
    s.stddev = std::sqrt(var);
    return s;
}

constexpr int kProbeHeavyReps = 50;  // suites per timed iteration
constexpr int kApiLightReps = 200;   // call mixes per timed iteration

void probe_heavy_workload(envmodel::ApiSurface& api, const probes::WatchlistSet& watchlists) {
    static const std::set<probes::Category> all = {probes::Category::Debugger,
                                                   probes::Category::Av, probes::Category::Vm};
    for (int i = 0; i < kProbeHeavyReps; ++i) {
        probes::SuiteReport r = probes::run_suite(api, watchlists, all);
        (void)r;
    }
}

// Fixed call mix touching only passthrough functions and names that hit no
// deception watchlist entry.
void api_light_workload(envmodel::ApiSurface& api) {
    for (int i = 0; i < kApiLightReps; ++i) {
        api.get_username();
        api.get_adapters();
        api.get_thread_context();
        api.find_window("Calculator");
        api.get_module_handle("shell32.dll");
        api.reg_open_key("HKLM\\SOFTWARE\\Microsoft\\Windows\\CurrentVersion");
        api.reg_query_value("HKLM\\SOFTWARE\\Microsoft\\Windows\\CurrentVersion", "ProgramFilesDir");
        api.create_file("C:\\Users\\Public\\readme.txt");
        api.get_file_attributes("C:\\Windows");
    }
}

std::vector<double> measure(int iterations, const std::function<void()>& workload) {
    std::vector<double> seconds;
    seconds.reserve(iterations);
    for (int i = 0; i < iterations; ++i) {
        auto start = std::chrono::steady_clock::now();
        workload();
        auto stop = std::chrono::steady_clock::now();
        seconds.push_back(std::chrono::duration<double>(stop - start).count());
    }
    return seconds;
}

}  // namespace

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
    if (opts.iterations < 2) {
        err << "usage error: --iterations must be at least 2\n";
        return kExitError;
    }
    if (opts.workload != "probe-heavy" && opts.workload != "api-light") {
        err << "usage error: unknown workload '" << opts.workload << "'\n";
        return kExitError;
    }

    envmodel::EnvironmentSnapshot snapshot;
    probes::WatchlistSet watchlists;
    deception::DeceptionPolicy policy = deception::DeceptionPolicy::defaults();
    try {
        std::string env_file =
            opts.env_file.empty() ? default_asset_dir() + "/envs/clean.env.json" : opts.env_file;
        snapshot = envmodel::load_snapshot_file(env_file);
        watchlists = probes::WatchlistSet::load_directory(watchlist_dir_or_default(opts.watchlist_dir));
        if (!opts.policy_file.empty()) policy = deception::load_policy_file(opts.policy_file);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }

    auto run_side = [&](bool with_countermeasure) {
        auto base = envmodel::bind_api(snapshot);
        std::unique_ptr<envmodel::ApiSurface> wrapped;
        envmodel::ApiSurface* api = base.get();
        if (with_countermeasure) {
            wrapped = deception::apply(policy, *base);
            api = wrapped.get();
        }
        std::function<void()> workload;
        if (opts.workload == "probe-heavy") {
            workload = [&]() { probe_heavy_workload(*api, watchlists); };
        } else {
            workload = [&]() { api_light_workload(*api); };
        }
        auto samples = measure(opts.iterations, workload);
        Stats stats = timing_stats(samples);
        std::uint64_t faked = with_countermeasure ? deception::interception_stats(*api).faked : 0;
        return std::pair<Stats, std::uint64_t>(stats, faked);
    };

    auto [on, on_faked] = run_side(true);
    auto [off, off_faked] = run_side(false);
    (void)off_faked;
    double overhead_pct = (on.mean - off.mean) / off.mean * 100.0;

    Json j;
    j["command"] = "bench";
    j["workload"] = opts.workload;
    j["iterations"] = opts.iterations;
    j["rows"] = Json::array();
    j["rows"].push_back(
        Json{{"countermeasure", true}, {"mean_s", on.mean}, {"stddev_s", on.stddev}});
    j["rows"].push_back(
        Json{{"countermeasure", false}, {"mean_s", off.mean}, {"stddev_s", off.stddev}});
    j["overhead_pct"] = overhead_pct;
    j["faked_answers"] = on_faked;

    if (opts.format == "json") {
        out << dump_json(j);
    } else {
        char buf[128];
        out << "workload        mean (s)     std dev (s)\n";
        std::snprintf(buf, sizeof(buf), "%-15s %-12.6f %-12.6f [countermeasure on]\n",
                      opts.workload.c_str(), on.mean, on.stddev);
        out << buf;
        std::snprintf(buf, sizeof(buf), "%-15s %-12.6f %-12.6f [countermeasure off]\n", "",
                      off.mean, off.stddev);
        out << buf;
        std::snprintf(buf, sizeof(buf), "overhead: %+.2f%%  (faked answers: %llu)\n", overhead_pct,
                      static_cast<unsigned long long>(on_faked));
        out << buf;
    }
    return kExitOk;
}

}  // namespace mirage::cli
