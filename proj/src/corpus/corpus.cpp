#include "mirage/corpus/corpus.hpp"

#include <cstdio>
#include <filesystem>
#include <random>

#include "mirage/pefile/pe_builder.hpp"
#include "mirage/util/hash.hpp"
#include "mirage/util/io.hpp"

namespace mirage::corpus {

namespace {

std::vector<std::uint8_t> deterministic_bytes(std::uint32_t seed, std::size_t n) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> dist(0, 255);
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(dist(rng));
    if (!out.empty()) out.back() = 0xC3;  // keep the tail nonzero (ret)
    return out;
}

// Shared .text seeds for the two code-sharing families; everything else gets
// per-sample code.
std::uint32_t text_seed(const SampleBlueprint& bp) {
    if (bp.group == 'A') return 86001;
    if (bp.group == 'B') return 86002;
    return 91000 + static_cast<std::uint32_t>(bp.index);
}

std::size_t text_size(const SampleBlueprint& bp) {
    if (bp.group == 'A') return 448;
    if (bp.group == 'B') return 384;
    return 256 + static_cast<std::size_t>(bp.index % 5) * 32;
}

std::vector<std::uint8_t> rdata_bytes(const SampleBlueprint& bp) {
    char marker[64];
    std::snprintf(marker, sizeof(marker), "build-tag sample-%03d rev 2", bp.index);
    std::string text = marker;
    // Two samples hit the debugger rule through string evidence alone.
    if (bp.group == 'D' || bp.group == 'E') {
        text += '\0';
        text += "CheckRemoteDebuggerPresent";
        text += '\0';
        text += "NtQueryInformationProcess";
    }
    std::vector<std::uint8_t> out(text.begin(), text.end());
    out.push_back(0);
    auto pad = deterministic_bytes(77000 + static_cast<std::uint32_t>(bp.index), 64);
    out.insert(out.end(), pad.begin(), pad.end());
    return out;
}

}  // namespace

const std::vector<SampleBlueprint>& corpus_blueprints() {
    static const std::vector<SampleBlueprint> blueprints = [] {
        std::vector<SampleBlueprint> out;
        int index = 1;
        auto add = [&](const std::string& family, char group, bool cert,
                       const std::string& verdict) {
            SampleBlueprint bp;
            bp.index = index++;
            char name[32];
            std::snprintf(name, sizeof(name), "sample_%03d.exe", bp.index);
            bp.filename = name;
            bp.family = family;
            bp.group = group;
            bp.with_certificate = cert;
            bp.verdict = verdict;
            out.push_back(std::move(bp));
        };

        // Debugger-indicator samples (20). Groups A (7) and B (6) share their
        // .text; C, D, E are one-off selected samples; four are screened out
        // by the selection predicate.
        for (int i = 0; i < 7; ++i) add("debugger", 'A', false, "malicious");
        for (int i = 0; i < 6; ++i) add("debugger", 'B', false, "malicious");
        add("debugger", 'C', false, "malicious");
        add("debugger", 'D', false, "malicious");
        add("debugger", 'E', false, "malicious");
        add("debugger", 0, true, "malicious");   // signed
        add("debugger", 0, true, "malicious");   // signed
        add("debugger", 0, false, "benign");
        add("debugger", 0, false, "");           // no verdict record -> unknown

        // MAC-lookup samples (37); F and G selected.
        add("mac", 'F', false, "malicious");
        add("mac", 'G', false, "malicious");
        for (int i = 0; i < 12; ++i) add("mac", 0, true, "malicious");
        for (int i = 0; i < 12; ++i) add("mac", 0, false, "benign");
        for (int i = 0; i < 4; ++i) add("mac", 0, false, "unknown");
        for (int i = 0; i < 7; ++i) add("mac", 0, false, "");

        // Folder-iteration samples (5), none selected.
        add("folder", 0, true, "malicious");
        add("folder", 0, true, "malicious");
        for (int i = 0; i < 3; ++i) add("folder", 0, false, "benign");

        return out;
    }();
    return blueprints;
}

std::vector<std::uint8_t> build_sample(const SampleBlueprint& bp) {
    pefile::PeFileSpec spec;
    spec.sections.push_back({".text", deterministic_bytes(text_seed(bp), text_size(bp)),
                             0x60000020});
    spec.sections.push_back({".rdata", rdata_bytes(bp), 0x40000040});

    pefile::ImportSpec kernel32{"kernel32.dll", {"ExitProcess"}};
    if (bp.family == "debugger" && bp.group != 'D' && bp.group != 'E') {
        kernel32.functions.insert(kernel32.functions.begin(), "IsDebuggerPresent");
    }
    if (bp.family == "folder") {
        kernel32.functions.push_back("FindFirstFileW");
        kernel32.functions.push_back("FindNextFileW");
    }
    spec.imports.push_back(std::move(kernel32));
    if (bp.family == "mac") {
        spec.imports.push_back({"iphlpapi.dll", {"GetAdaptersInfo"}});
    }

    spec.with_certificate = bp.with_certificate;
    spec.overlay = deterministic_bytes(55000 + static_cast<std::uint32_t>(bp.index),
                                       16 + static_cast<std::size_t>(bp.index % 32));
    return pefile::build_pe(spec);
}

std::vector<WrittenSample> write_corpus(const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<WrittenSample> written;
    std::string csv;
    for (const auto& bp : corpus_blueprints()) {
        auto bytes = build_sample(bp);
        util::write_file(dir + "/" + bp.filename, bytes);
        WrittenSample ws{bp, util::md5_hex(bytes)};
        if (!bp.verdict.empty()) {
            csv += ws.md5 + "," + bp.verdict + "\n";
        }
        written.push_back(std::move(ws));
    }
    util::write_text_file(dir + "/verdicts.csv", csv);
    return written;
}

}  // namespace mirage::corpus
