#include "mirage/deception/interceptor.hpp"

#include <algorithm>

#include "mirage/util/text.hpp"

namespace mirage::deception {

using namespace envmodel;

const std::set<ApiFunction>& hooked_functions() {
    static const std::set<ApiFunction> hooks = {
        ApiFunction::IsDebuggerPresent, ApiFunction::GetCursorPos,
        ApiFunction::GetModuleHandle,   ApiFunction::RegOpenKey,
        ApiFunction::RegQueryValue,     ApiFunction::CreateFile,
        ApiFunction::GetFileAttributes, ApiFunction::SnapshotProcesses,
    };
    return hooks;
}

namespace {

constexpr std::uint64_t kFakeHandle = 0xFADEFADE;
constexpr std::uint32_t kFakeAttributes = 0x10;  // directory
constexpr std::uint32_t kFakePidBase = 59000;

class DeceptionSurface final : public ApiSurface {
public:
    DeceptionSurface(DeceptionPolicy policy, ApiSurface& base)
        : policy_(std::move(policy)), base_(base) {}

    const InterceptionStats& stats() const { return stats_; }

    std::vector<ProcessEntry> snapshot_processes() override {
        record(ApiFunction::SnapshotProcesses);
        ++stats_.intercepted;
        auto list = base_.snapshot_processes();
        bool added = false;
        std::uint32_t next_pid = kFakePidBase;
        for (const auto& fake : policy_.fake_processes) {
            bool running = std::any_of(list.begin(), list.end(), [&](const ProcessEntry& p) {
                return util::equals_ci(p.name, fake);
            });
            if (running) continue;  // only inject what is not already there
            while (std::any_of(list.begin(), list.end(),
                               [&](const ProcessEntry& p) { return p.pid == next_pid; })) {
                ++next_pid;
            }
            list.push_back({fake, next_pid++});
            added = true;
        }
        if (added) ++stats_.faked;
        return list;
    }

    HandleResult find_window(std::string_view title) override {
        record(ApiFunction::FindWindow);
        ++stats_.passthrough;
        return base_.find_window(title);
    }

    bool is_debugger_present() override {
        record(ApiFunction::IsDebuggerPresent);
        ++stats_.intercepted;
        if (policy_.being_debugged) {
            ++stats_.faked;
            return *policy_.being_debugged;
        }
        return base_.is_debugger_present();
    }

    std::array<std::uint64_t, 4> get_thread_context() override {
        record(ApiFunction::GetThreadContext);
        ++stats_.passthrough;
        return base_.get_thread_context();
    }

    CursorPos get_cursor_pos() override {
        record(ApiFunction::GetCursorPos);
        ++stats_.intercepted;
        if (policy_.cursor) {
            ++stats_.faked;
            return *policy_.cursor;
        }
        return base_.get_cursor_pos();
    }

    HandleResult get_module_handle(std::string_view name) override {
        record(ApiFunction::GetModuleHandle);
        ++stats_.intercepted;
        if (gated(name)) {
            ++stats_.faked;
            return {kSuccess, kFakeHandle};
        }
        return base_.get_module_handle(name);
    }

    HandleResult reg_open_key(std::string_view path) override {
        record(ApiFunction::RegOpenKey);
        ++stats_.intercepted;
        if (gated(path)) {
            ++stats_.faked;
            return {kSuccess, kFakeHandle};
        }
        return base_.reg_open_key(path);
    }

    ValueResult reg_query_value(std::string_view path, std::string_view name) override {
        record(ApiFunction::RegQueryValue);
        ++stats_.intercepted;
        if (gated(path) || gated(name)) {
            ++stats_.faked;
            auto it = policy_.fake_values.find(std::string(path) + "|" + std::string(name));
            // No configured value: echo the value name back, visibly fake but
            // enough to flip existence checks.
            return {kSuccess, it != policy_.fake_values.end() ? it->second : std::string(name)};
        }
        return base_.reg_query_value(path, name);
    }

    HandleResult create_file(std::string_view path) override {
        record(ApiFunction::CreateFile);
        ++stats_.intercepted;
        if (gated(path)) {
            ++stats_.faked;
            return {kSuccess, kFakeHandle};
        }
        return base_.create_file(path);
    }

    AttributesResult get_file_attributes(std::string_view path) override {
        record(ApiFunction::GetFileAttributes);
        ++stats_.intercepted;
        if (gated(path)) {
            ++stats_.faked;
            return {kSuccess, kFakeAttributes};
        }
        return base_.get_file_attributes(path);
    }

    UserResult get_username() override {
        record(ApiFunction::GetUsername);
        ++stats_.passthrough;
        return base_.get_username();
    }

    std::vector<MacAddress> get_adapters() override {
        record(ApiFunction::GetAdapters);
        ++stats_.passthrough;
        return base_.get_adapters();
    }

private:
    bool gated(std::string_view queried_name) const {
        for (const auto& entry : policy_.name_watchlist) {
            if (util::contains_ci(queried_name, entry)) return true;
        }
        return false;
    }

    DeceptionPolicy policy_;
    ApiSurface& base_;
    InterceptionStats stats_;
};

}  // namespace

std::unique_ptr<ApiSurface> apply(const DeceptionPolicy& policy, ApiSurface& base) {
    return std::make_unique<DeceptionSurface>(policy, base);
}

InterceptionStats interception_stats(const ApiSurface& api) {
    const auto* wrapped = dynamic_cast<const DeceptionSurface*>(&api);
    if (!wrapped) throw InvalidSurface("interception_stats requires a deception-wrapped surface");
    return wrapped->stats();
}

}  // namespace mirage::deception
