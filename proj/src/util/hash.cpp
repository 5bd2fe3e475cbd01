#include "mirage/util/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace mirage::util {

namespace {

std::string digest_hex(std::span<const std::uint8_t> data, const EVP_MD* md) {
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int out_len = 0;
    if (EVP_Digest(data.data(), data.size(), out, &out_len, md, nullptr) != 1) {
        throw std::runtime_error("digest computation failed");
    }
    static const char* hexdigits = "0123456789abcdef";
    std::string hex;
    hex.reserve(out_len * 2);
    for (unsigned int i = 0; i < out_len; ++i) {
        hex.push_back(hexdigits[out[i] >> 4]);
        hex.push_back(hexdigits[out[i] & 0x0F]);
    }
    return hex;
}

std::span<const std::uint8_t> as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace

std::string md5_hex(std::span<const std::uint8_t> data) { return digest_hex(data, EVP_md5()); }
std::string sha256_hex(std::span<const std::uint8_t> data) { return digest_hex(data, EVP_sha256()); }

std::string md5_hex(std::string_view data) { return md5_hex(as_bytes(data)); }
std::string sha256_hex(std::string_view data) { return sha256_hex(as_bytes(data)); }

}  // namespace mirage::util
