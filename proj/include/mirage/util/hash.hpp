#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace mirage::util {

// Lowercase hex digests (OpenSSL libcrypto backed).
std::string md5_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::span<const std::uint8_t> data);

std::string md5_hex(std::string_view data);
std::string sha256_hex(std::string_view data);

}  // namespace mirage::util
