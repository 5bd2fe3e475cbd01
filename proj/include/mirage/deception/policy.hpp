#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mirage/envmodel/snapshot.hpp"

namespace mirage::deception {

// Countermeasure configuration. Three instrumentation families:
//   fixed returns        - being_debugged / cursor answers pinned to a value
//                          (nullopt passes the truthful answer through)
//   name-gated fakes     - queried names containing a watchlist entry get a
//                          fake success instead of the truthful answer
//   fake processes       - names appended to process listings when absent
struct DeceptionPolicy {
    std::optional<bool> being_debugged = true;
    std::optional<envmodel::CursorPos> cursor = envmodel::CursorPos{0, 0};
    std::vector<std::string> name_watchlist;
    std::map<std::string, std::string> fake_values;  // "path|name" -> value
    std::vector<std::string> fake_processes;

    // All-defaults policy: fixed returns per above, shipped name watchlist,
    // shipped fake process list.
    static DeceptionPolicy defaults();
};

// Shipped default tables.
const std::vector<std::string>& default_name_watchlist();
const std::vector<std::string>& default_fake_processes();

// JSON schema: {fixed: {being_debugged, cursor: [x, y]}, watchlist: [...],
// fake_values: {"path|name": value}, fake_processes: [...]}. Every key is
// optional and defaults apply; explicit null for a fixed return means "pass
// through". Unknown fields are rejected.
DeceptionPolicy load_policy(std::string_view json_text);
DeceptionPolicy load_policy_file(const std::string& path);

}  // namespace mirage::deception
