#pragma once

#include <memory>
#include <set>
#include <stdexcept>

#include "mirage/deception/policy.hpp"
#include "mirage/envmodel/api_surface.hpp"

namespace mirage::deception {

struct InvalidSurface : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InterceptionStats {
    std::uint64_t intercepted = 0;  // calls to the 8 hooked functions
    std::uint64_t passthrough = 0;  // calls to the other 4
    std::uint64_t faked = 0;        // answers synthesized instead of forwarded
    bool operator==(const InterceptionStats&) const = default;
};

// The 8 hooked functions: is_debugger_present and get_cursor_pos (fixed
// returns), get_module_handle / reg_open_key / reg_query_value / create_file
// / get_file_attributes (name-gated fakes), snapshot_processes (fake-process
// injection). find_window, get_thread_context, get_username and get_adapters
// pass through untouched.
const std::set<envmodel::ApiFunction>& hooked_functions();

// Wraps a surface with the policy's instrumentation. The returned surface
// references `base`, which must outlive it. The underlying snapshot is never
// modified.
std::unique_ptr<envmodel::ApiSurface> apply(const DeceptionPolicy& policy,
                                            envmodel::ApiSurface& base);

// Interception counters of a surface produced by apply(); InvalidSurface
// when called on an unwrapped surface.
InterceptionStats interception_stats(const envmodel::ApiSurface& api);

}  // namespace mirage::deception
