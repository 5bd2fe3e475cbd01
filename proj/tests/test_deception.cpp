#include <doctest.h>

#include <set>
#include <string>

#include "mirage/deception/diff.hpp"
#include "mirage/deception/interceptor.hpp"
#include "mirage/deception/policy.hpp"
#include "mirage/util/text.hpp"

using namespace mirage;
using namespace mirage::deception;
using envmodel::ApiFunction;
using envmodel::kNotFound;
using envmodel::kSuccess;

namespace {

std::string asset(const std::string& rel) {
    return std::string(MIRAGE_TEST_ASSET_DIR) + "/" + rel;
}

envmodel::EnvironmentSnapshot env(const std::string& name) {
    return envmodel::load_snapshot_file(asset("envs/" + name));
}

probes::WatchlistSet shipped_watchlists() {
    return probes::WatchlistSet::load_directory(asset("watchlists"));
}

std::string schema_path(const std::string& doc) {
    try {
        load_policy(doc);
    } catch (const envmodel::SchemaError& e) {
        return e.path;
    }
    return "";
}

}  // namespace

TEST_CASE("empty document yields the all-defaults policy") {
    DeceptionPolicy p = load_policy("{}");
    REQUIRE(p.being_debugged.has_value());
    CHECK(*p.being_debugged == true);
    REQUIRE(p.cursor.has_value());
    CHECK(*p.cursor == envmodel::CursorPos{0, 0});
    CHECK_FALSE(p.name_watchlist.empty());
    CHECK_FALSE(p.fake_processes.empty());
    CHECK(p.fake_values.empty());
}

TEST_CASE("policy document overrides") {
    DeceptionPolicy p = load_policy(R"({
      "fixed": {"being_debugged": false, "cursor": [5, 6]},
      "watchlist": ["vbox"],
      "fake_values": {"HKLM\\K|V": "fake"},
      "fake_processes": ["wireshark.exe"]
    })");
    CHECK(*p.being_debugged == false);
    CHECK(*p.cursor == envmodel::CursorPos{5, 6});
    CHECK(p.name_watchlist == std::vector<std::string>{"vbox"});
    CHECK(p.fake_values.at("HKLM\\K|V") == "fake");
    CHECK(p.fake_processes == std::vector<std::string>{"wireshark.exe"});
}

TEST_CASE("null fixed returns mean pass-through") {
    DeceptionPolicy p = load_policy(R"({"fixed": {"being_debugged": null, "cursor": null}})");
    CHECK_FALSE(p.being_debugged.has_value());
    CHECK_FALSE(p.cursor.has_value());
}

TEST_CASE("policy schema errors carry the field path") {
    CHECK(schema_path(R"({"fixed": {"cursor": [0]}})") == "fixed.cursor");
    CHECK(schema_path(R"({"unknown_key": 1})") == "$.unknown_key");
    CHECK(schema_path(R"({"fixed": {"typo": 1}})") == "fixed.typo");
    CHECK(schema_path(R"({"watchlist": [""]})") == "watchlist[0]");
    CHECK(schema_path("[1,2]") == "$");
}

TEST_CASE("type 1: fixed returns") {
    auto snapshot = env("clean.env.json");
    auto base = envmodel::bind_api(snapshot);
    auto wrapped = apply(DeceptionPolicy::defaults(), *base);

    CHECK(wrapped->is_debugger_present());  // truthfully false on the clean host
    CHECK(wrapped->get_cursor_pos() == envmodel::CursorPos{0, 0});
    CHECK(wrapped->get_cursor_pos() == envmodel::CursorPos{0, 0});
}

TEST_CASE("type 2: name-gated fakes and bit-identical pass-through") {
    auto snapshot = env("clean.env.json");
    auto base = envmodel::bind_api(snapshot);
    auto wrapped = apply(DeceptionPolicy::defaults(), *base);

    // Watchlisted name, absent from the snapshot: fake success.
    auto fake = wrapped->reg_open_key("HKLM\\SOFTWARE\\Oracle\\VirtualBox Guest Additions");
    CHECK(fake.status == kSuccess);
    CHECK(fake.handle != 0);

    auto fake_module = wrapped->get_module_handle("sbiedll.dll");
    CHECK(fake_module.status == kSuccess);

    auto fake_value = wrapped->reg_query_value("HKLM\\SOFTWARE\\Wine", "Version");
    CHECK(fake_value.status == kSuccess);
    CHECK(fake_value.value == "Version");  // echoes the value name when unconfigured

    auto fake_attrs = wrapped->get_file_attributes("C:\\Program Files\\VMware\\VMware Tools");
    CHECK(fake_attrs.status == kSuccess);

    // Non-watchlisted names: answers identical to the truthful surface.
    auto truthful = envmodel::bind_api(snapshot);
    CHECK(wrapped->get_module_handle("kernel32.dll") == truthful->get_module_handle("kernel32.dll"));
    CHECK(wrapped->get_module_handle("nosuch.dll") == truthful->get_module_handle("nosuch.dll"));
    CHECK(wrapped->reg_open_key("HKLM\\SOFTWARE\\Microsoft\\Windows\\CurrentVersion") ==
          truthful->reg_open_key("HKLM\\SOFTWARE\\Microsoft\\Windows\\CurrentVersion"));
    CHECK(wrapped->reg_query_value("HKLM\\SOFTWARE\\Microsoft\\Windows\\CurrentVersion",
                                   "ProgramFilesDir") ==
          truthful->reg_query_value("HKLM\\SOFTWARE\\Microsoft\\Windows\\CurrentVersion",
                                    "ProgramFilesDir"));
    CHECK(wrapped->create_file("C:\\Users\\Public\\readme.txt") ==
          truthful->create_file("C:\\Users\\Public\\readme.txt"));
    CHECK(wrapped->get_file_attributes("C:\\none") == truthful->get_file_attributes("C:\\none"));
}

TEST_CASE("configured fake registry values are served") {
    DeceptionPolicy p = DeceptionPolicy::defaults();
    p.fake_values["HKLM\\SOFTWARE\\Oracle\\VirtualBox Guest Additions|Version"] = "6.1.38";
    auto snapshot = env("clean.env.json");
    auto base = envmodel::bind_api(snapshot);
    auto wrapped = apply(p, *base);
    auto value =
        wrapped->reg_query_value("HKLM\\SOFTWARE\\Oracle\\VirtualBox Guest Additions", "Version");
    CHECK(value.status == kSuccess);
    CHECK(value.value == "6.1.38");
}

TEST_CASE("type 3: fake processes appended unless already present") {
    auto snapshot = env("clean.env.json");
    snapshot.processes.push_back({"OLLYDBG.EXE", 777});  // case-insensitive duplicate
    auto base = envmodel::bind_api(snapshot);
    auto wrapped = apply(DeceptionPolicy::defaults(), *base);

    auto procs = wrapped->snapshot_processes();
    std::size_t olly = 0;
    bool wireshark = false;
    std::set<std::uint32_t> pids;
    for (const auto& p : procs) {
        if (util::equals_ci(p.name, "ollydbg.exe")) ++olly;
        if (p.name == "wireshark.exe") wireshark = true;
        CHECK(pids.insert(p.pid).second);  // injected pids stay unique
    }
    CHECK(olly == 1);  // not injected twice
    CHECK(wireshark);
    CHECK(procs.size() == snapshot.processes.size() + DeceptionPolicy::defaults().fake_processes.size() - 1);
}

TEST_CASE("hook set is exactly the eight instrumented functions") {
    const std::set<ApiFunction> expected = {
        ApiFunction::IsDebuggerPresent, ApiFunction::GetCursorPos,
        ApiFunction::GetModuleHandle,   ApiFunction::RegOpenKey,
        ApiFunction::RegQueryValue,     ApiFunction::CreateFile,
        ApiFunction::GetFileAttributes, ApiFunction::SnapshotProcesses,
    };
    CHECK(hooked_functions() == expected);

    // Drive every one of the 12 functions once and confirm which side of the
    // interception boundary each lands on.
    auto snapshot = env("clean.env.json");
    auto base = envmodel::bind_api(snapshot);
    auto wrapped = apply(DeceptionPolicy::defaults(), *base);

    auto call_one = [&](ApiFunction f) {
        switch (f) {
            case ApiFunction::SnapshotProcesses: wrapped->snapshot_processes(); break;
            case ApiFunction::FindWindow: wrapped->find_window("x"); break;
            case ApiFunction::IsDebuggerPresent: wrapped->is_debugger_present(); break;
            case ApiFunction::GetThreadContext: wrapped->get_thread_context(); break;
            case ApiFunction::GetCursorPos: wrapped->get_cursor_pos(); break;
            case ApiFunction::GetModuleHandle: wrapped->get_module_handle("x"); break;
            case ApiFunction::RegOpenKey: wrapped->reg_open_key("x"); break;
            case ApiFunction::RegQueryValue: wrapped->reg_query_value("x", "y"); break;
            case ApiFunction::CreateFile: wrapped->create_file("x"); break;
            case ApiFunction::GetFileAttributes: wrapped->get_file_attributes("x"); break;
            case ApiFunction::GetUsername: wrapped->get_username(); break;
            case ApiFunction::GetAdapters: wrapped->get_adapters(); break;
        }
    };

    for (ApiFunction f : envmodel::kAllApiFunctions) {
        auto before = interception_stats(*wrapped);
        call_one(f);
        auto after = interception_stats(*wrapped);
        CAPTURE(envmodel::to_string(f));
        if (expected.count(f)) {
            CHECK(after.intercepted == before.intercepted + 1);
            CHECK(after.passthrough == before.passthrough);
        } else {
            CHECK(after.passthrough == before.passthrough + 1);
            CHECK(after.intercepted == before.intercepted);
        }
    }
}

TEST_CASE("interception stats") {
    auto snapshot = env("clean.env.json");
    auto base = envmodel::bind_api(snapshot);
    auto wrapped = apply(DeceptionPolicy::defaults(), *base);

    CHECK(interception_stats(*wrapped) == InterceptionStats{0, 0, 0});
    wrapped->get_username();
    CHECK(interception_stats(*wrapped) == InterceptionStats{0, 1, 0});

    auto truthful = envmodel::bind_api(snapshot);
    CHECK_THROWS_AS(interception_stats(*truthful), InvalidSurface);
}

TEST_CASE("suite interception counts equal the hooked-call plan") {
    auto snapshot = env("clean.env.json");
    auto watchlists = shipped_watchlists();
    auto base = envmodel::bind_api(snapshot);
    auto wrapped = apply(DeceptionPolicy::defaults(), *base);
    probes::run_suite(*wrapped, watchlists,
                      {probes::Category::Debugger, probes::Category::Av, probes::Category::Vm});

    // Hooked: snapshot_processes(1) + is_debugger_present(1) + cursor(2)
    // + module lookups + registry opens + value queries on opened keys
    // + dll create_file + folder attribute checks. Under the default policy
    // every registry entry is gated, so each open succeeds and each
    // path|value entry issues one query.
    std::uint64_t value_queries = 0;
    for (const auto& e : watchlists.get(probes::watchlist_keys::kRegistryKeys)) {
        if (e.find('|') != std::string::npos) ++value_queries;
    }
    std::uint64_t expected_intercepted =
        1 + 1 + 2 + watchlists.get(probes::watchlist_keys::kModuleNames).size() +
        watchlists.get(probes::watchlist_keys::kRegistryKeys).size() + value_queries +
        watchlists.get(probes::watchlist_keys::kDllPaths).size() +
        watchlists.get(probes::watchlist_keys::kFolderNames).size();
    std::uint64_t expected_passthrough =
        watchlists.get(probes::watchlist_keys::kWindowNames).size() + 1 /*thread ctx*/ +
        1 /*username*/ + 1 /*adapters*/;

    auto stats = interception_stats(*wrapped);
    CHECK(stats.intercepted == expected_intercepted);
    CHECK(stats.passthrough == expected_passthrough);
    CHECK(stats.faked > 0);
}

TEST_CASE("non-interference: the snapshot stays pristine") {
    auto snapshot = env("clean.env.json");
    auto watchlists = shipped_watchlists();
    const std::set<probes::Category> all = {probes::Category::Debugger, probes::Category::Av,
                                            probes::Category::Vm};

    auto before_api = envmodel::bind_api(snapshot);
    auto before = probes::run_suite(*before_api, watchlists, all);

    auto base = envmodel::bind_api(snapshot);
    auto wrapped = apply(DeceptionPolicy::defaults(), *base);
    probes::run_suite(*wrapped, watchlists, all);

    auto after_api = envmodel::bind_api(snapshot);
    auto after = probes::run_suite(*after_api, watchlists, all);
    REQUIRE(before.findings.size() == after.findings.size());
    for (std::size_t i = 0; i < before.findings.size(); ++i) {
        CHECK(before.findings[i].detected == after.findings[i].detected);
        CHECK(before.findings[i].artifacts == after.findings[i].artifacts);
    }
}

TEST_CASE("idempotence: double wrap behaves like a single wrap") {
    auto snapshot = env("clean.env.json");
    DeceptionPolicy policy = DeceptionPolicy::defaults();

    auto base1 = envmodel::bind_api(snapshot);
    auto once = apply(policy, *base1);

    auto base2 = envmodel::bind_api(snapshot);
    auto inner = apply(policy, *base2);
    auto twice = apply(policy, *inner);

    CHECK(once->is_debugger_present() == twice->is_debugger_present());
    CHECK(once->get_cursor_pos() == twice->get_cursor_pos());
    CHECK(once->get_module_handle("sbiedll.dll") == twice->get_module_handle("sbiedll.dll"));
    CHECK(once->get_module_handle("kernel32.dll") == twice->get_module_handle("kernel32.dll"));
    CHECK(once->reg_open_key("HKLM\\SOFTWARE\\Wine") == twice->reg_open_key("HKLM\\SOFTWARE\\Wine"));
    CHECK(once->reg_query_value("HKLM\\SOFTWARE\\Wine", "V") ==
          twice->reg_query_value("HKLM\\SOFTWARE\\Wine", "V"));
    CHECK(once->create_file("C:\\Windows\\System32\\vboxdisp.dll") ==
          twice->create_file("C:\\Windows\\System32\\vboxdisp.dll"));
    CHECK(once->get_file_attributes("C:\\Windows") == twice->get_file_attributes("C:\\Windows"));
    CHECK(once->snapshot_processes().size() == twice->snapshot_processes().size());
}

TEST_CASE("diff_run on the clean host flips exactly the covered watchlist probes") {
    auto snapshot = env("clean.env.json");
    ForcedEvasionReport report =
        diff_run(snapshot, DeceptionPolicy::defaults(), shipped_watchlists());

    CHECK(report.verdict == DiffVerdict::ForcedEvasion);
    CHECK(report.flip_count == 7);

    // Enumerated before the build: probes whose API plan sits inside the
    // hooked set flip; the four relying on pass-through functions cannot.
    const std::set<std::string> expected_flips = {
        "proc_names",     "debugger_flag",      "cursor_static", "module_exports",
        "registry_artifacts", "folder_names",   "dll_names",
    };
    for (const auto& p : report.probes) {
        CAPTURE(p.probe);
        CHECK(p.flipped == (expected_flips.count(p.probe) > 0));
        CHECK(p.covered == (expected_flips.count(p.probe) > 0));
        if (p.flipped) {
            CHECK_FALSE(p.before.detected);
            CHECK(p.after.detected);
        }
    }
}

TEST_CASE("flip soundness: flipped findings cite policy-introduced artifacts") {
    auto snapshot = env("clean.env.json");
    DeceptionPolicy policy = DeceptionPolicy::defaults();
    ForcedEvasionReport report = diff_run(snapshot, policy, shipped_watchlists());

    for (const auto& p : report.probes) {
        if (!p.flipped) continue;
        CAPTURE(p.probe);
        REQUIRE_FALSE(p.after.artifacts.empty());
        for (const auto& artifact : p.after.artifacts) {
            bool from_fake_process = false;
            for (const auto& fp : policy.fake_processes) {
                if (util::equals_ci(fp, artifact)) from_fake_process = true;
            }
            bool gated = false;
            for (const auto& entry : policy.name_watchlist) {
                if (util::contains_ci(artifact, entry)) gated = true;
            }
            bool fixed_label = artifact == "BeingDebugged" ||
                               artifact.rfind("cursor_static@", 0) == 0;
            CHECK((from_fake_process || gated || fixed_label));
        }
    }
}

TEST_CASE("identity policy changes nothing") {
    auto snapshot = env("clean.env.json");
    DeceptionPolicy identity = load_policy_file(asset("policies/empty.policy.json"));
    ForcedEvasionReport report = diff_run(snapshot, identity, shipped_watchlists());
    CHECK(report.verdict == DiffVerdict::NoChange);
    CHECK(report.flip_count == 0);
    CHECK(report.stats.faked == 0);
}

TEST_CASE("saturated host cannot be flipped further") {
    auto snapshot = env("saturated.env.json");
    ForcedEvasionReport report =
        diff_run(snapshot, DeceptionPolicy::defaults(), shipped_watchlists());
    CHECK(report.verdict == DiffVerdict::NoChange);
    CHECK(report.flip_count == 0);
    for (const auto& p : report.probes) {
        CAPTURE(p.probe);
        CHECK(p.before.detected);
        CHECK(p.after.detected);
    }
}
