#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mirage/util/text.hpp"

namespace mirage::rulelang {

// Multi-pattern search automaton (Aho-Corasick NFA with failure links).
// Patterns are byte sequences; each carries a caller-supplied value emitted
// on every occurrence. Sparse child storage, binary search per transition.
class AhoCorasick {
public:
    void add_pattern(std::span<const std::uint8_t> pattern, std::uint32_t value);

    // Finalize failure and output links. No patterns may be added afterwards.
    void build();

    bool empty() const { return pattern_count_ == 0; }
    std::size_t pattern_count() const { return pattern_count_; }

    // Calls on_match(value, end_index) for every occurrence; end_index is the
    // index of the last matched byte. When fold is set, input bytes are
    // ASCII-lowercased before transitioning (patterns must have been added
    // pre-folded).
    template <typename F>
    void scan(std::span<const std::uint8_t> text, bool fold, F&& on_match) const {
        if (empty()) return;
        std::int32_t state = 0;
        for (std::size_t i = 0; i < text.size(); ++i) {
            std::uint8_t b = text[i];
            if (fold) b = util::ascii_lower(b);
            state = step(state, b);
            for (std::int32_t t = nodes_[state].values.empty() ? nodes_[state].output_link : state;
                 t != -1; t = nodes_[t].output_link) {
                for (std::uint32_t v : nodes_[t].values) on_match(v, i);
            }
        }
    }

private:
    struct Node {
        std::vector<std::pair<std::uint8_t, std::int32_t>> children;  // sorted by byte
        std::int32_t fail = 0;
        std::int32_t output_link = -1;  // nearest fail-ancestor with values
        std::vector<std::uint32_t> values;
    };

    std::int32_t child(std::int32_t node, std::uint8_t byte) const;
    std::int32_t step(std::int32_t state, std::uint8_t byte) const;

    std::vector<Node> nodes_{Node{}};
    std::size_t pattern_count_ = 0;
    bool built_ = false;
};

}  // namespace mirage::rulelang
