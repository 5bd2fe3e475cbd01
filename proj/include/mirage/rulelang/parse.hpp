#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "mirage/rulelang/ast.hpp"

namespace mirage::rulelang {

struct SyntaxError : std::runtime_error {
    SyntaxError(const std::string& msg, int line, int col)
        : std::runtime_error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
          line(line),
          col(col) {}
    int line;
    int col;
};

struct SemanticError : std::runtime_error {
    explicit SemanticError(const std::string& msg) : std::runtime_error(msg) {}
};

// Engine bounds. Far above what the shipped rules need; rejected as
// SemanticError when exceeded.
inline constexpr std::size_t kMaxPatternBytes = 1024;
inline constexpr std::size_t kMaxPatternsPerSet = 10000;

RuleSet parse_ruleset(std::string_view source);

}  // namespace mirage::rulelang
