#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mirage::pefile {

// Assembles minimal, well-formed PE32 images for fixtures and the synthetic
// corpus. Field-by-field layout: DOS header, PE signature, COFF, optional
// header with 16 data directories, section table, section raw data, optional
// certificate blob and overlay.

struct SectionSpec {
    std::string name;  // at most 8 bytes
    std::vector<std::uint8_t> data;
    std::uint32_t characteristics = 0x60000020;  // code | execute | read
};

struct ImportSpec {
    std::string dll;
    std::vector<std::string> functions;  // "#<n>" entries import by ordinal
};

struct PeFileSpec {
    std::uint16_t machine = 0x014c;  // i386
    std::vector<SectionSpec> sections;
    std::vector<ImportSpec> imports;  // emitted into a synthesized .idata section
    bool with_certificate = false;    // appends a dummy Authenticode blob + security directory entry
    std::vector<std::uint8_t> overlay;
};

std::vector<std::uint8_t> build_pe(const PeFileSpec& spec);

}  // namespace mirage::pefile
