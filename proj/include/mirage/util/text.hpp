#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mirage::util {

constexpr char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

constexpr unsigned char ascii_lower(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<unsigned char>(c - 'A' + 'a') : c;
}

std::string to_lower(std::string_view s);

// ASCII case folding only; bytes >= 0x80 compare verbatim.
bool equals_ci(std::string_view a, std::string_view b);

// Empty needle is contained in everything.
bool contains_ci(std::string_view haystack, std::string_view needle);

std::string trim(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace mirage::util
