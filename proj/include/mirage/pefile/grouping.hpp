#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mirage/pefile/pe_image.hpp"

namespace mirage::pefile {

struct SampleGroup {
    std::string key;                   // digest of the normalized .text bytes
    std::vector<std::string> members;  // sample ids, input order
};

struct GroupInput {
    std::string id;
    const PeImage* image = nullptr;
    std::span<const std::uint8_t> bytes;
};

// Normalized .text bytes: the raw ".text" section with trailing zero padding
// stripped. Empty when the sample has no .text section.
std::vector<std::uint8_t> normalized_text_section(const PeImage& img,
                                                  std::span<const std::uint8_t> bytes);

// Partition samples by shared code. Samples without a .text section form
// singleton groups. Output ordered by descending group size, then key.
std::vector<SampleGroup> group_samples(const std::vector<GroupInput>& samples);

}  // namespace mirage::pefile
