#include <doctest.h>

#include <functional>
#include <string>

#include "mirage/envmodel/api_surface.hpp"
#include "mirage/envmodel/snapshot.hpp"
#include "mirage/util/io.hpp"

using namespace mirage;
using namespace mirage::envmodel;

namespace {

const char* kMinimalDoc = R"({
  "processes": [], "windows": [], "folders": [], "registry": {},
  "modules": [], "users": [], "nics": [],
  "debugger": {"being_debugged": false, "hw_registers": [0, 0, 0, 0]},
  "cursor_trace": [[10, 10]]
})";

std::string asset(const std::string& rel) {
    return std::string(MIRAGE_TEST_ASSET_DIR) + "/" + rel;
}

std::string schema_path(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const SchemaError& e) {
        return e.path;
    }
    return "";
}

}  // namespace

TEST_CASE("minimal document loads an empty host") {
    EnvironmentSnapshot s = load_snapshot(kMinimalDoc);
    CHECK(s.processes.empty());
    CHECK(s.windows.empty());
    CHECK(s.folders.empty());
    CHECK(s.registry.empty());
    CHECK(s.modules.empty());
    CHECK(s.users.empty());
    CHECK(s.nics.empty());
    CHECK_FALSE(s.debugger.being_debugged);
    REQUIRE(s.cursor_trace.size() == 1);
    CHECK(s.cursor_trace[0] == CursorPos{10, 10});
}

TEST_CASE("schema violations carry the field path") {
    // 5-byte MAC
    std::string five_byte = R"({
      "processes": [], "windows": [], "folders": [], "registry": {},
      "modules": [], "users": [], "nics": [{"mac": "08:00:27:aa:bb"}],
      "debugger": {"being_debugged": false, "hw_registers": [0,0,0,0]},
      "cursor_trace": [[1,1]]
    })";
    CHECK(schema_path([&] { load_snapshot(five_byte); }) == "nics[0].mac");

    // unknown top-level field
    std::string unknown = R"({
      "processes": [], "windows": [], "folders": [], "registry": {},
      "modules": [], "users": [], "nics": [], "extra": 1,
      "debugger": {"being_debugged": false, "hw_registers": [0,0,0,0]},
      "cursor_trace": [[1,1]]
    })";
    CHECK(schema_path([&] { load_snapshot(unknown); }) == "$.extra");

    // missing top-level field
    std::string missing = R"({
      "processes": [], "windows": [], "folders": [], "registry": {},
      "modules": [], "users": [], "nics": [],
      "debugger": {"being_debugged": false, "hw_registers": [0,0,0,0]}
    })";
    CHECK(schema_path([&] { load_snapshot(missing); }) == "$.cursor_trace");

    // duplicate pid
    std::string dup_pid = R"({
      "processes": [{"name":"a.exe","pid":5},{"name":"b.exe","pid":5}],
      "windows": [], "folders": [], "registry": {},
      "modules": [], "users": [], "nics": [],
      "debugger": {"being_debugged": false, "hw_registers": [0,0,0,0]},
      "cursor_trace": [[1,1]]
    })";
    CHECK(schema_path([&] { load_snapshot(dup_pid); }) == "processes[1].pid");

    // wrong register count
    std::string regs = R"({
      "processes": [], "windows": [], "folders": [], "registry": {},
      "modules": [], "users": [], "nics": [],
      "debugger": {"being_debugged": false, "hw_registers": [0,0,0]},
      "cursor_trace": [[1,1]]
    })";
    CHECK(schema_path([&] { load_snapshot(regs); }) == "debugger.hw_registers");

    // empty cursor trace
    std::string cursor = R"({
      "processes": [], "windows": [], "folders": [], "registry": {},
      "modules": [], "users": [], "nics": [],
      "debugger": {"being_debugged": false, "hw_registers": [0,0,0,0]},
      "cursor_trace": []
    })";
    CHECK(schema_path([&] { load_snapshot(cursor); }) == "cursor_trace");

    // invalid JSON
    CHECK(schema_path([&] { load_snapshot("not json"); }) == "$");
}

TEST_CASE("shipped kaspersky fixture carries 4 AV folders and 4 AV processes") {
    EnvironmentSnapshot s = load_snapshot_file(asset("envs/kaspersky.env.json"));
    int av_folders = 0;
    for (const auto& f : s.folders) {
        if (f.find("Kaspersky") != std::string::npos) ++av_folders;
    }
    CHECK(av_folders == 4);
    int av_procs = 0;
    for (const auto& p : s.processes) {
        for (const char* name : {"avp.exe", "avpui.exe", "ksde.exe", "ksdeui.exe"}) {
            if (p.name == name) ++av_procs;
        }
    }
    CHECK(av_procs == 4);
}

TEST_CASE("bind_api answers truthfully from the snapshot") {
    std::string doc = R"({
      "processes": [{"name": "ollydbg.exe", "pid": 31}, {"name": "explorer.exe", "pid": 7}],
      "windows": ["OllyDbg - sample.exe", "Program Manager"],
      "folders": ["C:\\Program Files\\AVG"],
      "registry": {"HKLM\\SOFTWARE\\Wine": {"Version": "8.0"}},
      "modules": [{"name": "sbiedll.dll", "exports": ["SbieApi_Log"]}],
      "users": ["analyst", "guest"],
      "nics": [{"mac": "08:00:27:12:34:56"}],
      "debugger": {"being_debugged": true, "hw_registers": [1, 0, 0, 0]},
      "cursor_trace": [[1, 1], [2, 2]]
    })";
    EnvironmentSnapshot s = load_snapshot(doc);
    auto api = bind_api(s);

    auto procs = api->snapshot_processes();
    REQUIRE(procs.size() == 2);
    CHECK(procs[0].name == "ollydbg.exe");

    CHECK(api->is_debugger_present());
    CHECK(api->get_thread_context() == std::array<std::uint64_t, 4>{1, 0, 0, 0});

    // window lookup is case-insensitive substring
    CHECK(api->find_window("ollydbg").status == kSuccess);
    CHECK(api->find_window("OLLYDBG").status == kSuccess);
    CHECK(api->find_window("x64dbg").status == kNotFound);

    // module lookup is case-insensitive exact
    CHECK(api->get_module_handle("SBIEDLL.DLL").status == kSuccess);
    CHECK(api->get_module_handle("sbiedll").status == kNotFound);

    // registry paths and value names are case-insensitive
    CHECK(api->reg_open_key("hklm\\software\\wine").status == kSuccess);
    CHECK(api->reg_open_key("HKLM\\SOFTWARE\\Missing").status == kNotFound);
    auto value = api->reg_query_value("HKLM\\SOFTWARE\\WINE", "version");
    CHECK(value.status == kSuccess);
    CHECK(value.value == "8.0");
    CHECK(api->reg_query_value("HKLM\\SOFTWARE\\Wine", "Other").status == kNotFound);

    // path existence by containment
    CHECK(api->get_file_attributes("C:\\Program Files\\AVG").status == kSuccess);
    CHECK(api->create_file("avg").status == kSuccess);
    CHECK(api->get_file_attributes("C:\\Program Files\\Avast").status == kNotFound);

    auto user = api->get_username();
    CHECK(user.status == kSuccess);
    CHECK(user.name == "analyst");  // users[0]

    auto macs = api->get_adapters();
    REQUIRE(macs.size() == 1);
    CHECK(macs[0].str() == "08:00:27:12:34:56");
    CHECK(macs[0].oui_str() == "08:00:27");
}

TEST_CASE("cursor trace advances and the last element repeats") {
    std::string doc = R"({
      "processes": [], "windows": [], "folders": [], "registry": {},
      "modules": [], "users": [], "nics": [],
      "debugger": {"being_debugged": false, "hw_registers": [0,0,0,0]},
      "cursor_trace": [[1, 1], [2, 2]]
    })";
    EnvironmentSnapshot s = load_snapshot(doc);
    auto api = bind_api(s);
    CHECK(api->get_cursor_pos() == CursorPos{1, 1});
    CHECK(api->get_cursor_pos() == CursorPos{2, 2});
    for (int i = 0; i < 5; ++i) CHECK(api->get_cursor_pos() == CursorPos{2, 2});
}

TEST_CASE("truthfulness: absent subjects return the not-found code") {
    EnvironmentSnapshot s = load_snapshot(kMinimalDoc);
    auto api = bind_api(s);
    CHECK(api->find_window("anything").status == kNotFound);
    CHECK(api->get_module_handle("none.dll").status == kNotFound);
    CHECK(api->reg_open_key("HKLM\\NONE").status == kNotFound);
    CHECK(api->reg_query_value("HKLM\\NONE", "v").status == kNotFound);
    CHECK(api->create_file("C:\\none").status == kNotFound);
    CHECK(api->get_file_attributes("C:\\none").status == kNotFound);
    CHECK(api->get_username().status == kNotFound);  // no users on this host
    CHECK(api->get_adapters().empty());
    CHECK_FALSE(api->is_debugger_present());
}

TEST_CASE("call counters") {
    EnvironmentSnapshot s = load_snapshot(kMinimalDoc);
    auto api = bind_api(s);

    auto zeros = call_counts(*api);
    REQUIRE(zeros.size() == kAllApiFunctions.size());
    for (const auto& [name, count] : zeros) CHECK(count == 0);

    api->reg_open_key("a");
    api->reg_open_key("b");
    api->reg_open_key("c");
    api->get_username();
    auto counts = call_counts(*api);
    CHECK(counts["reg_open_key"] == 3);
    CHECK(counts["get_username"] == 1);
    CHECK(counts["snapshot_processes"] == 0);
}

TEST_CASE("determinism: same snapshot and call sequence, same answers and log") {
    EnvironmentSnapshot s = load_snapshot_file(asset("envs/saturated.env.json"));
    auto drive = [&](ApiSurface& api) {
        std::string trace;
        trace += std::to_string(api.is_debugger_present());
        auto c1 = api.get_cursor_pos();
        trace += "," + std::to_string(c1.x) + ":" + std::to_string(c1.y);
        trace += "," + std::to_string(api.find_window("OLLYDBG").status);
        trace += "," + std::to_string(api.get_module_handle("sbiedll.dll").handle);
        trace += "," + api.reg_query_value("HKLM\\SOFTWARE\\Oracle\\VirtualBox Guest Additions",
                                           "Version")
                           .value;
        for (const auto& p : api.snapshot_processes()) trace += "," + p.name;
        return trace;
    };
    auto a1 = bind_api(s);
    auto a2 = bind_api(s);
    CHECK(drive(*a1) == drive(*a2));
    CHECK(a1->call_log() == a2->call_log());
}
