#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mirage::cli {

// Exit codes shared by the subcommands. Each code is a total function of the
// report content.
inline constexpr int kExitOk = 0;           // scan: no match; probe: proceed; deceive: forced evasion
inline constexpr int kExitMatch = 1;        // scan: at least one rule matched
inline constexpr int kExitError = 2;        // unusable inputs / all files failed
inline constexpr int kExitEvade = 3;        // probe: at least one enabled category detected
inline constexpr int kExitNoChange = 4;     // deceive: no probe flipped

// Source-tree asset directory baked in as the default; every path can be
// overridden per invocation.
std::string default_asset_dir();

struct ScanOptions {
    std::vector<std::string> paths;
    std::string rules_file;
    std::string format = "text";  // "text" | "json"
};

struct TriageOptions {
    std::string dir;
    std::string rules_file;
    std::string verdicts_file;
    std::string format = "text";
};

struct ProbeOptions {
    std::string env_file;
    std::string categories = "debugger,av,vm";  // comma list or "none"
    std::string watchlist_dir;                  // default: <assets>/watchlists
    std::string fingerprints_file;              // default: <assets>/watchlists/av_fingerprints.txt
    std::string format = "text";
};

struct DeceiveOptions {
    std::string env_file;
    std::string policy_file;  // empty: all-defaults policy
    std::string watchlist_dir;
    std::string format = "text";
};

struct BenchOptions {
    int iterations = 100;
    std::string workload = "probe-heavy";  // "probe-heavy" | "api-light"
    std::string env_file;                  // default: <assets>/envs/clean.env.json
    std::string policy_file;
    std::string watchlist_dir;
    std::string format = "text";
};

int cmd_scan(const ScanOptions& opts, std::ostream& out, std::ostream& err);
int cmd_triage(const TriageOptions& opts, std::ostream& out, std::ostream& err);
int cmd_probe(const ProbeOptions& opts, std::ostream& out, std::ostream& err);
int cmd_deceive(const DeceiveOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace mirage::cli
