#include "mirage/probes/runner.hpp"

#include <algorithm>
#include <optional>

#include "mirage/util/text.hpp"

namespace mirage::probes {

using envmodel::kSuccess;

const char* to_string(Verdict v) { return v == Verdict::Evade ? "evade" : "proceed"; }

const ProbeFinding* SuiteReport::finding(ProbeId id) const {
    for (const auto& f : findings) {
        if (f.id == id) return &f;
    }
    return nullptr;
}

namespace {

bool matches_any(std::string_view observed, const std::vector<std::string>& watchlist) {
    for (const auto& entry : watchlist) {
        if (util::contains_ci(observed, entry)) return true;
    }
    return false;
}

std::optional<std::array<std::uint8_t, 3>> parse_oui(std::string_view entry) {
    std::array<std::uint8_t, 3> oui{};
    std::size_t byte_index = 0;
    std::size_t i = 0;
    auto hex = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    while (i < entry.size() && byte_index < 3) {
        if (i + 1 >= entry.size()) return std::nullopt;
        int hi = hex(entry[i]);
        int lo = hex(entry[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        oui[byte_index++] = static_cast<std::uint8_t>(hi * 16 + lo);
        i += 2;
        if (i < entry.size() && (entry[i] == ':' || entry[i] == '-')) ++i;
    }
    if (byte_index != 3 || i != entry.size()) return std::nullopt;
    return oui;
}

char hex_digit(std::uint64_t v) { return "0123456789abcdef"[v & 0xF]; }

std::string hex_u64(std::uint64_t v) {
    std::string s = "0x";
    bool started = false;
    for (int shift = 60; shift >= 0; shift -= 4) {
        char d = hex_digit(v >> shift);
        if (d != '0' || started || shift == 0) {
            s.push_back(d);
            started = true;
        }
    }
    return s;
}

}  // namespace

ProbeFinding run_probe(const Probe& p, envmodel::ApiSurface& api, const WatchlistSet& watchlists) {
    ProbeFinding finding;
    finding.id = p.id;
    finding.probe = p.name;
    const std::vector<std::string>& list = watchlists.get(p.watchlist_key);

    switch (p.id) {
        case ProbeId::ProcNames: {
            for (const auto& proc : api.snapshot_processes()) {
                if (matches_any(proc.name, list)) finding.artifacts.push_back(proc.name);
            }
            break;
        }
        case ProbeId::WindowNames: {
            for (const auto& entry : list) {
                if (api.find_window(entry).status == kSuccess) finding.artifacts.push_back(entry);
            }
            break;
        }
        case ProbeId::DebuggerFlag: {
            if (api.is_debugger_present()) finding.artifacts.push_back("BeingDebugged");
            break;
        }
        case ProbeId::HwDebugRegisters: {
            auto regs = api.get_thread_context();
            for (std::size_t i = 0; i < regs.size(); ++i) {
                if (regs[i] != 0) {
                    finding.artifacts.push_back("dr" + std::to_string(i) + "=" + hex_u64(regs[i]));
                }
            }
            break;
        }
        case ProbeId::ModuleExports: {
            for (const auto& entry : list) {
                if (api.get_module_handle(entry).status == kSuccess) {
                    finding.artifacts.push_back(entry);
                }
            }
            break;
        }
        case ProbeId::RegistryArtifacts: {
            for (const auto& entry : list) {
                auto bar = entry.find('|');
                std::string path = entry.substr(0, bar);
                if (api.reg_open_key(path).status != kSuccess) continue;
                if (bar == std::string::npos) {
                    finding.artifacts.push_back(entry);
                } else {
                    std::string value_name = entry.substr(bar + 1);
                    if (api.reg_query_value(path, value_name).status == kSuccess) {
                        finding.artifacts.push_back(entry);
                    }
                }
            }
            break;
        }
        case ProbeId::FolderNames: {
            for (const auto& entry : list) {
                if (api.get_file_attributes(entry).status == kSuccess) {
                    finding.artifacts.push_back(entry);
                }
            }
            break;
        }
        case ProbeId::DllNames: {
            for (const auto& entry : list) {
                if (api.create_file(entry).status == kSuccess) finding.artifacts.push_back(entry);
            }
            break;
        }
        case ProbeId::Usernames: {
            auto user = api.get_username();
            if (user.status == kSuccess && matches_any(user.name, list)) {
                finding.artifacts.push_back(user.name);
            }
            break;
        }
        case ProbeId::MacPrefixes: {
            auto adapters = api.get_adapters();
            for (const auto& mac : adapters) {
                for (const auto& entry : list) {
                    auto oui = parse_oui(entry);
                    if (!oui) continue;  // malformed asset entry, skipped
                    if (mac.bytes[0] == (*oui)[0] && mac.bytes[1] == (*oui)[1] &&
                        mac.bytes[2] == (*oui)[2]) {
                        finding.artifacts.push_back(mac.str());
                        break;
                    }
                }
            }
            break;
        }
        case ProbeId::CursorStatic: {
            auto first = api.get_cursor_pos();
            auto second = api.get_cursor_pos();
            if (first == second) {
                finding.artifacts.push_back("cursor_static@(" + std::to_string(first.x) + "," +
                                            std::to_string(first.y) + ")");
            }
            break;
        }
    }

    finding.detected = !finding.artifacts.empty();
    return finding;
}

SuiteReport run_suite(envmodel::ApiSurface& api, const WatchlistSet& watchlists,
                      const std::set<Category>& enabled, const AvFingerprints* fingerprints) {
    SuiteReport report;
    report.verdicts = {{Category::Debugger, Verdict::Proceed},
                       {Category::Av, Verdict::Proceed},
                       {Category::Vm, Verdict::Proceed}};

    for (const auto& probe : probe_catalog()) {
        bool wanted = std::any_of(probe.categories.begin(), probe.categories.end(),
                                  [&](Category c) { return enabled.count(c) > 0; });
        if (!wanted) continue;
        ProbeFinding finding = run_probe(probe, api, watchlists);
        if (finding.detected) {
            for (Category c : probe.categories) report.verdicts[c] = Verdict::Evade;
        }
        report.findings.push_back(std::move(finding));
    }

    if (enabled.count(Category::Av) && fingerprints) {
        report.identified_av = identify_av(report, *fingerprints);
    }
    return report;
}

std::optional<std::string> identify_av(const SuiteReport& report,
                                       const AvFingerprints& fingerprints) {
    std::vector<std::string> artifacts;
    for (const auto& f : report.findings) {
        artifacts.insert(artifacts.end(), f.artifacts.begin(), f.artifacts.end());
    }

    std::optional<std::string> best;
    std::size_t best_overlap = 0;
    for (const auto& [name, entries] : fingerprints) {
        std::size_t overlap = 0;
        for (const auto& entry : entries) {
            for (const auto& artifact : artifacts) {
                if (util::contains_ci(artifact, entry)) {
                    ++overlap;
                    break;
                }
            }
        }
        // std::map iterates names in ascending order, so ties keep the
        // lexicographically first AV.
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = name;
        }
    }
    return best;
}

}  // namespace mirage::probes
