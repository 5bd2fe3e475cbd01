#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mirage::corpus {

// Blueprint for one benign synthetic sample. The 62-sample corpus exercises
// the triage pipeline end to end: 20 samples carry debugger-detection
// indicators, 5 folder-iteration indicators, 37 NIC/MAC lookup indicators.
// 18 of them are unsigned and flagged malicious by the bundled verdict file,
// falling into code-sharing groups of sizes 7, 6, 1, 1, 1, 1, 1.
struct SampleBlueprint {
    int index = 0;             // 1-based
    std::string filename;      // "sample_001.exe"
    std::string family;        // "debugger" | "folder" | "mac"
    char group = 0;            // 'A'..'G' for the selected samples, 0 otherwise
    bool with_certificate = false;
    std::string verdict;       // "malicious" | "benign" | "unknown" | "" (absent from CSV)
};

const std::vector<SampleBlueprint>& corpus_blueprints();

// Deterministic: identical bytes on every call.
std::vector<std::uint8_t> build_sample(const SampleBlueprint& bp);

struct WrittenSample {
    SampleBlueprint blueprint;
    std::string md5;
};

// Writes the samples plus verdicts.csv into dir (created if missing).
std::vector<WrittenSample> write_corpus(const std::string& dir);

}  // namespace mirage::corpus
