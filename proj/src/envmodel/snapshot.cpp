#include "mirage/envmodel/snapshot.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mirage/util/text.hpp"

namespace mirage::envmodel {

using nlohmann::json;

std::string MacAddress::str() const {
    char buf[18];
    std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", bytes[0], bytes[1], bytes[2],
                  bytes[3], bytes[4], bytes[5]);
    return buf;
}

std::string MacAddress::oui_str() const {
    char buf[9];
    std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x", bytes[0], bytes[1], bytes[2]);
    return buf;
}

MacAddress MacAddress::parse(std::string_view text, const std::string& error_path) {
    MacAddress mac;
    std::size_t byte_index = 0;
    std::size_t i = 0;
    auto hex = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    while (i < text.size()) {
        if (byte_index >= 6) throw SchemaError(error_path, "MAC address longer than 6 bytes");
        if (i + 1 >= text.size()) throw SchemaError(error_path, "truncated MAC byte");
        int hi = hex(text[i]);
        int lo = hex(text[i + 1]);
        if (hi < 0 || lo < 0) throw SchemaError(error_path, "invalid hex digit in MAC");
        mac.bytes[byte_index++] = static_cast<std::uint8_t>(hi * 16 + lo);
        i += 2;
        if (i < text.size()) {
            if (text[i] != ':' && text[i] != '-') {
                throw SchemaError(error_path, "expected ':' or '-' separator");
            }
            ++i;
        }
    }
    if (byte_index != 6) throw SchemaError(error_path, "MAC address must be exactly 6 bytes");
    return mac;
}

bool CiLess::operator()(const std::string& a, const std::string& b) const {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        char ca = util::ascii_lower(a[i]);
        char cb = util::ascii_lower(b[i]);
        if (ca != cb) return ca < cb;
    }
    return a.size() < b.size();
}

namespace {

const json& require_field(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path + "." + key, "missing field");
    return *it;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) throw SchemaError(path + "." + it.key(), "unknown field");
    }
}

std::string expect_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw SchemaError(path, "expected string");
    return v.get<std::string>();
}

}  // namespace

EnvironmentSnapshot load_snapshot(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("$", "expected top-level object");

    static const std::set<std::string> top_keys = {"processes", "windows", "folders",
                                                   "registry",  "modules", "users",
                                                   "nics",      "debugger", "cursor_trace"};
    reject_unknown(doc, top_keys, "$");
    for (const auto& k : top_keys) {
        if (!doc.contains(k)) throw SchemaError("$." + k, "missing field");
    }

    EnvironmentSnapshot s;

    {
        const json& arr = doc["processes"];
        if (!arr.is_array()) throw SchemaError("processes", "expected array");
        std::set<std::uint64_t> seen_pids;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string path = "processes[" + std::to_string(i) + "]";
            const json& p = arr[i];
            if (!p.is_object()) throw SchemaError(path, "expected object");
            reject_unknown(p, {"name", "pid"}, path);
            ProcessEntry entry;
            entry.name = expect_string(require_field(p, "name", path), path + ".name");
            const json& pid = require_field(p, "pid", path);
            if (!pid.is_number_integer() || pid.get<long long>() <= 0) {
                throw SchemaError(path + ".pid", "pid must be a positive integer");
            }
            entry.pid = pid.get<std::uint32_t>();
            if (!seen_pids.insert(entry.pid).second) {
                throw SchemaError(path + ".pid", "duplicate pid");
            }
            s.processes.push_back(std::move(entry));
        }
    }

    {
        const json& arr = doc["windows"];
        if (!arr.is_array()) throw SchemaError("windows", "expected array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            s.windows.push_back(expect_string(arr[i], "windows[" + std::to_string(i) + "]"));
        }
    }

    {
        const json& arr = doc["folders"];
        if (!arr.is_array()) throw SchemaError("folders", "expected array");
        std::set<std::string> seen;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string f = expect_string(arr[i], "folders[" + std::to_string(i) + "]");
            std::string lowered = util::to_lower(f);
            if (seen.insert(lowered).second) s.folders.push_back(std::move(f));
        }
    }

    {
        const json& reg = doc["registry"];
        if (!reg.is_object()) throw SchemaError("registry", "expected object");
        for (auto it = reg.begin(); it != reg.end(); ++it) {
            std::string key_path = "registry." + it.key();
            if (!it.value().is_object()) throw SchemaError(key_path, "expected object of values");
            auto& values = s.registry[it.key()];
            for (auto vit = it.value().begin(); vit != it.value().end(); ++vit) {
                const json& v = vit.value();
                std::string value_path = key_path + "." + vit.key();
                if (v.is_string()) {
                    values[vit.key()] = v.get<std::string>();
                } else if (v.is_number_integer()) {
                    values[vit.key()] = std::to_string(v.get<long long>());
                } else if (v.is_boolean()) {
                    values[vit.key()] = v.get<bool>() ? "1" : "0";
                } else {
                    throw SchemaError(value_path, "expected string, integer, or boolean value");
                }
            }
        }
    }

    {
        const json& arr = doc["modules"];
        if (!arr.is_array()) throw SchemaError("modules", "expected array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string path = "modules[" + std::to_string(i) + "]";
            const json& m = arr[i];
            if (!m.is_object()) throw SchemaError(path, "expected object");
            reject_unknown(m, {"name", "exports"}, path);
            ModuleEntry entry;
            entry.name = expect_string(require_field(m, "name", path), path + ".name");
            const json& exports = require_field(m, "exports", path);
            if (!exports.is_array()) throw SchemaError(path + ".exports", "expected array");
            for (std::size_t e = 0; e < exports.size(); ++e) {
                entry.exports.push_back(
                    expect_string(exports[e], path + ".exports[" + std::to_string(e) + "]"));
            }
            s.modules.push_back(std::move(entry));
        }
    }

    {
        const json& arr = doc["users"];
        if (!arr.is_array()) throw SchemaError("users", "expected array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            s.users.push_back(expect_string(arr[i], "users[" + std::to_string(i) + "]"));
        }
    }

    {
        const json& arr = doc["nics"];
        if (!arr.is_array()) throw SchemaError("nics", "expected array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string path = "nics[" + std::to_string(i) + "]";
            const json& n = arr[i];
            if (!n.is_object()) throw SchemaError(path, "expected object");
            reject_unknown(n, {"mac"}, path);
            std::string mac = expect_string(require_field(n, "mac", path), path + ".mac");
            s.nics.push_back(MacAddress::parse(mac, path + ".mac"));
        }
    }

    {
        const json& dbg = doc["debugger"];
        if (!dbg.is_object()) throw SchemaError("debugger", "expected object");
        reject_unknown(dbg, {"being_debugged", "hw_registers"}, "debugger");
        const json& bd = require_field(dbg, "being_debugged", "debugger");
        if (!bd.is_boolean()) throw SchemaError("debugger.being_debugged", "expected boolean");
        s.debugger.being_debugged = bd.get<bool>();
        const json& regs = require_field(dbg, "hw_registers", "debugger");
        if (!regs.is_array() || regs.size() != 4) {
            throw SchemaError("debugger.hw_registers", "expected array of exactly 4 values");
        }
        for (std::size_t i = 0; i < 4; ++i) {
            if (!regs[i].is_number_integer() || regs[i].get<long long>() < 0) {
                throw SchemaError("debugger.hw_registers[" + std::to_string(i) + "]",
                                  "expected non-negative integer");
            }
            s.debugger.hw_registers[i] = regs[i].get<std::uint64_t>();
        }
    }

    {
        const json& arr = doc["cursor_trace"];
        if (!arr.is_array()) throw SchemaError("cursor_trace", "expected array");
        if (arr.empty()) throw SchemaError("cursor_trace", "must be non-empty");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string path = "cursor_trace[" + std::to_string(i) + "]";
            const json& pos = arr[i];
            if (!pos.is_array() || pos.size() != 2 || !pos[0].is_number_integer() ||
                !pos[1].is_number_integer()) {
                throw SchemaError(path, "expected [x, y] integer pair");
            }
            s.cursor_trace.push_back({pos[0].get<int>(), pos[1].get<int>()});
        }
    }

    return s;
}

EnvironmentSnapshot load_snapshot_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("$", "cannot open snapshot file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_snapshot(ss.str());
}

}  // namespace mirage::envmodel
