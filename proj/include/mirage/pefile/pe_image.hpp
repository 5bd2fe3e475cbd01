#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mirage::pefile {

struct Section {
    std::string name;  // up to 8 bytes, trailing NULs stripped
    std::uint32_t raw_offset = 0;
    std::uint32_t raw_size = 0;  // clamped to file bounds
    std::uint32_t virtual_address = 0;
    std::uint32_t virtual_size = 0;
    std::uint32_t characteristics = 0;
    double entropy = 0.0;  // bits/byte over the raw range
};

struct ImportEntry {
    std::string dll;
    std::vector<std::string> functions;  // by-ordinal imports recorded as "#<ordinal>"
};

struct PeImage {
    std::uint16_t machine = 0;
    bool pe32_plus = false;
    std::vector<Section> sections;
    std::vector<ImportEntry> imports;
    bool has_certificate_table = false;
    std::uint32_t resource_entry_count = 0;
    double file_entropy = 0.0;
};

}  // namespace mirage::pefile
