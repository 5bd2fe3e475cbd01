#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mirage/envmodel/snapshot.hpp"

namespace mirage::envmodel {

// Status vocabulary, fixed so deception tests are bit-exact.
inline constexpr int kSuccess = 0;
inline constexpr int kNotFound = 2;
inline constexpr int kAccessDenied = 5;

enum class ApiFunction {
    SnapshotProcesses,
    FindWindow,
    IsDebuggerPresent,
    GetThreadContext,
    GetCursorPos,
    GetModuleHandle,
    RegOpenKey,
    RegQueryValue,
    CreateFile,
    GetFileAttributes,
    GetUsername,
    GetAdapters,
};

inline constexpr std::array<ApiFunction, 12> kAllApiFunctions = {
    ApiFunction::SnapshotProcesses, ApiFunction::FindWindow,     ApiFunction::IsDebuggerPresent,
    ApiFunction::GetThreadContext,  ApiFunction::GetCursorPos,   ApiFunction::GetModuleHandle,
    ApiFunction::RegOpenKey,        ApiFunction::RegQueryValue,  ApiFunction::CreateFile,
    ApiFunction::GetFileAttributes, ApiFunction::GetUsername,    ApiFunction::GetAdapters,
};

const char* to_string(ApiFunction f);

struct HandleResult {
    int status = kNotFound;
    std::uint64_t handle = 0;
    bool operator==(const HandleResult&) const = default;
};

struct ValueResult {
    int status = kNotFound;
    std::string value;
    bool operator==(const ValueResult&) const = default;
};

struct AttributesResult {
    int status = kNotFound;
    std::uint32_t attributes = 0;
    bool operator==(const AttributesResult&) const = default;
};

struct UserResult {
    int status = kNotFound;
    std::string name;
    bool operator==(const UserResult&) const = default;
};

using CallLog = std::array<std::uint64_t, kAllApiFunctions.size()>;

// The abstract host API the probes drive. A surface is confined to one
// logical session; concurrent sessions bind their own surface over the
// shared immutable snapshot. Counters are per-surface.
class ApiSurface {
public:
    virtual ~ApiSurface() = default;

    virtual std::vector<ProcessEntry> snapshot_processes() = 0;
    virtual HandleResult find_window(std::string_view title) = 0;
    virtual bool is_debugger_present() = 0;
    virtual std::array<std::uint64_t, 4> get_thread_context() = 0;
    virtual CursorPos get_cursor_pos() = 0;
    virtual HandleResult get_module_handle(std::string_view name) = 0;
    virtual HandleResult reg_open_key(std::string_view path) = 0;
    virtual ValueResult reg_query_value(std::string_view path, std::string_view name) = 0;
    virtual HandleResult create_file(std::string_view path) = 0;
    virtual AttributesResult get_file_attributes(std::string_view path) = 0;
    virtual UserResult get_username() = 0;
    virtual std::vector<MacAddress> get_adapters() = 0;

    const CallLog& call_log() const { return log_; }

protected:
    void record(ApiFunction f) { ++log_[static_cast<std::size_t>(f)]; }

private:
    CallLog log_{};
};

// Snapshot of the per-function counters, keyed by function name.
std::map<std::string, std::uint64_t> call_counts(const ApiSurface& api);

// Truthful surface over a snapshot. Lookups on names are ASCII
// case-insensitive; find_window / create_file / get_file_attributes answer
// by substring containment against the snapshot entries, get_module_handle
// by exact name. Queries whose subject is absent return kNotFound.
std::unique_ptr<ApiSurface> bind_api(const EnvironmentSnapshot& snapshot);

}  // namespace mirage::envmodel
