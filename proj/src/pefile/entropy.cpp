#include "mirage/pefile/entropy.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace mirage::pefile {

double shannon_entropy(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) return 0.0;
    std::array<std::uint64_t, 256> histogram{};
    for (std::uint8_t b : bytes) ++histogram[b];
    const double n = static_cast<double>(bytes.size());
    double h = 0.0;
    for (std::uint64_t count : histogram) {
        if (count == 0) continue;
        const double p = static_cast<double>(count) / n;
        h -= p * std::log2(p);
    }
    return h;
}

bool packedness_flag(const PeImage& img, double threshold) {
    if (threshold < 0.0 || threshold > 8.0) {
        throw std::invalid_argument("packedness threshold must lie in [0, 8]");
    }
    return img.file_entropy >= threshold;
}

}  // namespace mirage::pefile
