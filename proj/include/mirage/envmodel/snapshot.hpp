#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mirage::envmodel {

struct SchemaError : std::runtime_error {
    SchemaError(const std::string& path, const std::string& msg)
        : std::runtime_error(path + ": " + msg), path(path) {}
    std::string path;
};

struct ProcessEntry {
    std::string name;
    std::uint32_t pid = 0;
};

struct MacAddress {
    std::array<std::uint8_t, 6> bytes{};

    std::string str() const;
    std::string oui_str() const;  // first 3 bytes, "aa:bb:cc"

    // Accepts ':' or '-' separated hex pairs; exactly 6 bytes.
    static MacAddress parse(std::string_view text, const std::string& error_path);
};

struct ModuleEntry {
    std::string name;
    std::vector<std::string> exports;
};

struct DebuggerState {
    bool being_debugged = false;
    std::array<std::uint64_t, 4> hw_registers{};
};

struct CursorPos {
    int x = 0;
    int y = 0;
    bool operator==(const CursorPos&) const = default;
};

// Case-insensitive ordering for registry keys and value names.
struct CiLess {
    bool operator()(const std::string& a, const std::string& b) const;
};

// Declarative host state. Immutable once loaded; every API answer is fully
// determined by it.
struct EnvironmentSnapshot {
    std::vector<ProcessEntry> processes;
    std::vector<std::string> windows;
    std::vector<std::string> folders;  // deduplicated, input order
    std::map<std::string, std::map<std::string, std::string, CiLess>, CiLess> registry;
    std::vector<ModuleEntry> modules;
    std::vector<std::string> users;
    std::vector<MacAddress> nics;
    DebuggerState debugger;
    std::vector<CursorPos> cursor_trace;  // non-empty; last element repeats when exhausted
};

// Strict JSON schema: exactly the nine top-level keys, unknown fields
// rejected with the offending path.
EnvironmentSnapshot load_snapshot(std::string_view json_text);
EnvironmentSnapshot load_snapshot_file(const std::string& path);

}  // namespace mirage::envmodel
