#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "mirage/pefile/pe_image.hpp"

namespace mirage::pefile {

struct MalformedHeader : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OversizeInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseOptions {
    std::size_t max_input_size = 256ull * 1024 * 1024;
};

// Structured facts from a PE image. Header-level damage raises
// MalformedHeader; a damaged or out-of-range import directory is skipped,
// never fatal. Never reads outside the input buffer.
PeImage parse_pe(std::span<const std::uint8_t> bytes, const ParseOptions& opts = {});

}  // namespace mirage::pefile
