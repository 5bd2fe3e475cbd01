#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mirage::util {

std::vector<std::uint8_t> read_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> data);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mirage::util
