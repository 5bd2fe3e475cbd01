#include "mirage/envmodel/api_surface.hpp"

#include "mirage/util/text.hpp"

namespace mirage::envmodel {

const char* to_string(ApiFunction f) {
    switch (f) {
        case ApiFunction::SnapshotProcesses: return "snapshot_processes";
        case ApiFunction::FindWindow: return "find_window";
        case ApiFunction::IsDebuggerPresent: return "is_debugger_present";
        case ApiFunction::GetThreadContext: return "get_thread_context";
        case ApiFunction::GetCursorPos: return "get_cursor_pos";
        case ApiFunction::GetModuleHandle: return "get_module_handle";
        case ApiFunction::RegOpenKey: return "reg_open_key";
        case ApiFunction::RegQueryValue: return "reg_query_value";
        case ApiFunction::CreateFile: return "create_file";
        case ApiFunction::GetFileAttributes: return "get_file_attributes";
        case ApiFunction::GetUsername: return "get_username";
        case ApiFunction::GetAdapters: return "get_adapters";
    }
    return "?";
}

std::map<std::string, std::uint64_t> call_counts(const ApiSurface& api) {
    std::map<std::string, std::uint64_t> out;
    for (ApiFunction f : kAllApiFunctions) {
        out[to_string(f)] = api.call_log()[static_cast<std::size_t>(f)];
    }
    return out;
}

namespace {

constexpr std::uint32_t kDirectoryAttributes = 0x10;

// Synthetic handle spaces keep truthful handles deterministic and disjoint
// per object family.
constexpr std::uint64_t kWindowHandleBase = 0x57000000;
constexpr std::uint64_t kModuleHandleBase = 0x4D000000;
constexpr std::uint64_t kRegistryHandleBase = 0x4B000000;
constexpr std::uint64_t kFileHandleBase = 0x46000000;

class SnapshotApiSurface final : public ApiSurface {
public:
    explicit SnapshotApiSurface(const EnvironmentSnapshot& snapshot) : snap_(snapshot) {}

    std::vector<ProcessEntry> snapshot_processes() override {
        record(ApiFunction::SnapshotProcesses);
        return snap_.processes;
    }

    HandleResult find_window(std::string_view title) override {
        record(ApiFunction::FindWindow);
        for (std::size_t i = 0; i < snap_.windows.size(); ++i) {
            if (util::contains_ci(snap_.windows[i], title)) {
                return {kSuccess, kWindowHandleBase + i};
            }
        }
        return {kNotFound, 0};
    }

    bool is_debugger_present() override {
        record(ApiFunction::IsDebuggerPresent);
        return snap_.debugger.being_debugged;
    }

    std::array<std::uint64_t, 4> get_thread_context() override {
        record(ApiFunction::GetThreadContext);
        return snap_.debugger.hw_registers;
    }

    CursorPos get_cursor_pos() override {
        record(ApiFunction::GetCursorPos);
        // Successive reads walk the trace; the last element repeats forever.
        CursorPos pos = snap_.cursor_trace[std::min(cursor_index_, snap_.cursor_trace.size() - 1)];
        if (cursor_index_ + 1 < snap_.cursor_trace.size()) ++cursor_index_;
        return pos;
    }

    HandleResult get_module_handle(std::string_view name) override {
        record(ApiFunction::GetModuleHandle);
        for (std::size_t i = 0; i < snap_.modules.size(); ++i) {
            if (util::equals_ci(snap_.modules[i].name, name)) {
                return {kSuccess, kModuleHandleBase + i};
            }
        }
        return {kNotFound, 0};
    }

    HandleResult reg_open_key(std::string_view path) override {
        record(ApiFunction::RegOpenKey);
        auto it = snap_.registry.find(std::string(path));
        if (it == snap_.registry.end()) return {kNotFound, 0};
        std::size_t index = std::distance(snap_.registry.begin(), it);
        return {kSuccess, kRegistryHandleBase + index};
    }

    ValueResult reg_query_value(std::string_view path, std::string_view name) override {
        record(ApiFunction::RegQueryValue);
        auto it = snap_.registry.find(std::string(path));
        if (it == snap_.registry.end()) return {kNotFound, {}};
        auto vit = it->second.find(std::string(name));
        if (vit == it->second.end()) return {kNotFound, {}};
        return {kSuccess, vit->second};
    }

    HandleResult create_file(std::string_view path) override {
        record(ApiFunction::CreateFile);
        return lookup_path(path, kFileHandleBase);
    }

    AttributesResult get_file_attributes(std::string_view path) override {
        record(ApiFunction::GetFileAttributes);
        HandleResult r = lookup_path(path, kFileHandleBase);
        if (r.status != kSuccess) return {kNotFound, 0};
        return {kSuccess, kDirectoryAttributes};
    }

    UserResult get_username() override {
        record(ApiFunction::GetUsername);
        if (snap_.users.empty()) return {kNotFound, {}};
        return {kSuccess, snap_.users.front()};
    }

    std::vector<MacAddress> get_adapters() override {
        record(ApiFunction::GetAdapters);
        return snap_.nics;
    }

private:
    HandleResult lookup_path(std::string_view query, std::uint64_t handle_base) const {
        for (std::size_t i = 0; i < snap_.folders.size(); ++i) {
            if (util::contains_ci(snap_.folders[i], query)) {
                return {kSuccess, handle_base + i};
            }
        }
        return {kNotFound, 0};
    }

    const EnvironmentSnapshot& snap_;
    std::size_t cursor_index_ = 0;
};

}  // namespace

std::unique_ptr<ApiSurface> bind_api(const EnvironmentSnapshot& snapshot) {
    return std::make_unique<SnapshotApiSurface>(snapshot);
}

}  // namespace mirage::envmodel
