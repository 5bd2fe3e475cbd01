#pragma once

#include <map>
#include <string>
#include <vector>

namespace mirage::probes {

// Named artifact lists consumed by the probes. Asset format: one entry per
// line, '#' starts a comment, blank lines ignored.
class WatchlistSet {
public:
    void set(const std::string& key, std::vector<std::string> entries);
    const std::vector<std::string>& get(const std::string& key) const;  // empty list when absent
    bool has(const std::string& key) const;

    // Reads <dir>/<key>.txt for every *.txt file in dir.
    static WatchlistSet load_directory(const std::string& dir);
    static std::vector<std::string> parse_entries(const std::string& text);

private:
    std::map<std::string, std::vector<std::string>> lists_;
};

// Watchlist keys used by the shipped probe catalog.
namespace watchlist_keys {
inline constexpr const char* kProcessNames = "process_names";
inline constexpr const char* kWindowNames = "window_names";
inline constexpr const char* kModuleNames = "module_names";
inline constexpr const char* kRegistryKeys = "registry_keys";
inline constexpr const char* kFolderNames = "folder_names";
inline constexpr const char* kDllPaths = "dll_paths";
inline constexpr const char* kUsernames = "usernames";
inline constexpr const char* kMacOuis = "mac_ouis";
}  // namespace watchlist_keys

// AV name -> artifact fingerprint (a watchlist subset). File format:
// [Name] section headers, one artifact per line.
using AvFingerprints = std::map<std::string, std::vector<std::string>>;

AvFingerprints parse_fingerprints(const std::string& text);
AvFingerprints load_fingerprints_file(const std::string& path);

}  // namespace mirage::probes
