#include "mirage/deception/policy.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mirage::deception {

using envmodel::SchemaError;
using nlohmann::json;

const std::vector<std::string>& default_name_watchlist() {
    // Analysis-tool related name fragments gating the fake answers. Kept in
    // sync with the probe watchlists so a default diff run covers them.
    static const std::vector<std::string> names = {
        // hypervisors / guest additions
        "vbox", "virtualbox", "virtual machine", "vmware", "vmhgfs", "vmci", "vm3d",
        "vmguestlib", "qemu", "virtio", "xen", "parallels", "prl",
        // sandboxes and instrumentation
        "sandboxie", "sbiedll", "snxhk", "cmdvrt", "wpespy", "vmcheck", "cuckoo", "wine",
        // debuggers and monitors
        "ollydbg", "x64dbg", "x32dbg", "windbg", "idaq", "ida64", "immunity", "dbghelp",
        "wireshark", "procmon", "procexp", "processhacker", "fiddler", "regmon", "filemon",
        // AV products
        "kaspersky", "avast", "avira", "avguard", "defender", "msmpeng", "immunet", "avg",
        "k7 computing", "k7t", "clamav",
    };
    return names;
}

const std::vector<std::string>& default_fake_processes() {
    static const std::vector<std::string> names = {
        "ollydbg.exe",
        "wireshark.exe",
        "procmon.exe",
        "vboxservice.exe",
        "vmtoolsd.exe",
    };
    return names;
}

DeceptionPolicy DeceptionPolicy::defaults() {
    DeceptionPolicy p;
    p.name_watchlist = default_name_watchlist();
    p.fake_processes = default_fake_processes();
    return p;
}

DeceptionPolicy load_policy(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("$", "expected top-level object");

    static const std::set<std::string> top_keys = {"fixed", "watchlist", "fake_values",
                                                   "fake_processes"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!top_keys.count(it.key())) throw SchemaError("$." + it.key(), "unknown field");
    }

    DeceptionPolicy p = DeceptionPolicy::defaults();

    if (doc.contains("fixed")) {
        const json& fixed = doc["fixed"];
        if (!fixed.is_object()) throw SchemaError("fixed", "expected object");
        for (auto it = fixed.begin(); it != fixed.end(); ++it) {
            if (it.key() != "being_debugged" && it.key() != "cursor") {
                throw SchemaError("fixed." + it.key(), "unknown field");
            }
        }
        if (fixed.contains("being_debugged")) {
            const json& bd = fixed["being_debugged"];
            if (bd.is_null()) {
                p.being_debugged.reset();
            } else if (bd.is_boolean()) {
                p.being_debugged = bd.get<bool>();
            } else {
                throw SchemaError("fixed.being_debugged", "expected boolean or null");
            }
        }
        if (fixed.contains("cursor")) {
            const json& cur = fixed["cursor"];
            if (cur.is_null()) {
                p.cursor.reset();
            } else if (cur.is_array() && cur.size() == 2 && cur[0].is_number_integer() &&
                       cur[1].is_number_integer()) {
                p.cursor = envmodel::CursorPos{cur[0].get<int>(), cur[1].get<int>()};
            } else {
                throw SchemaError("fixed.cursor", "expected [x, y] integer pair or null");
            }
        }
    }

    if (doc.contains("watchlist")) {
        const json& wl = doc["watchlist"];
        if (!wl.is_array()) throw SchemaError("watchlist", "expected array");
        p.name_watchlist.clear();
        for (std::size_t i = 0; i < wl.size(); ++i) {
            if (!wl[i].is_string() || wl[i].get<std::string>().empty()) {
                throw SchemaError("watchlist[" + std::to_string(i) + "]",
                                  "expected non-empty string");
            }
            p.name_watchlist.push_back(wl[i].get<std::string>());
        }
    }

    if (doc.contains("fake_values")) {
        const json& fv = doc["fake_values"];
        if (!fv.is_object()) throw SchemaError("fake_values", "expected object");
        p.fake_values.clear();
        for (auto it = fv.begin(); it != fv.end(); ++it) {
            if (!it.value().is_string()) {
                throw SchemaError("fake_values." + it.key(), "expected string value");
            }
            p.fake_values[it.key()] = it.value().get<std::string>();
        }
    }

    if (doc.contains("fake_processes")) {
        const json& fp = doc["fake_processes"];
        if (!fp.is_array()) throw SchemaError("fake_processes", "expected array");
        p.fake_processes.clear();
        for (std::size_t i = 0; i < fp.size(); ++i) {
            if (!fp[i].is_string() || fp[i].get<std::string>().empty()) {
                throw SchemaError("fake_processes[" + std::to_string(i) + "]",
                                  "expected non-empty string");
            }
            p.fake_processes.push_back(fp[i].get<std::string>());
        }
    }

    return p;
}

DeceptionPolicy load_policy_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("$", "cannot open policy file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_policy(ss.str());
}

}  // namespace mirage::deception
