#pragma once

#include <cstdint>
#include <span>

#include "mirage/pefile/pe_image.hpp"

namespace mirage::pefile {

// Shannon entropy in bits/byte over the 256-value histogram.
// Empty input returns 0 by convention.
double shannon_entropy(std::span<const std::uint8_t> bytes);

// True iff file_entropy >= threshold. Threshold must lie in [0, 8].
inline constexpr double kDefaultPackednessThreshold = 6.5;
bool packedness_flag(const PeImage& img, double threshold = kDefaultPackednessThreshold);

}  // namespace mirage::pefile
