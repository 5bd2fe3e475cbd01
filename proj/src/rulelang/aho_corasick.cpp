#include "mirage/rulelang/aho_corasick.hpp"

#include <algorithm>
#include <cassert>
#include <deque>

namespace mirage::rulelang {

std::int32_t AhoCorasick::child(std::int32_t node, std::uint8_t byte) const {
    const auto& kids = nodes_[node].children;
    auto it = std::lower_bound(kids.begin(), kids.end(), byte,
                               [](const auto& e, std::uint8_t b) { return e.first < b; });
    if (it != kids.end() && it->first == byte) return it->second;
    return -1;
}

std::int32_t AhoCorasick::step(std::int32_t state, std::uint8_t byte) const {
    std::int32_t next;
    while ((next = child(state, byte)) == -1 && state != 0) state = nodes_[state].fail;
    return next == -1 ? 0 : next;
}

void AhoCorasick::add_pattern(std::span<const std::uint8_t> pattern, std::uint32_t value) {
    assert(!built_);
    assert(!pattern.empty());
    std::int32_t node = 0;
    for (std::uint8_t b : pattern) {
        std::int32_t next = child(node, b);
        if (next == -1) {
            next = static_cast<std::int32_t>(nodes_.size());
            auto& kids = nodes_[node].children;
            auto it = std::lower_bound(kids.begin(), kids.end(), b,
                                       [](const auto& e, std::uint8_t x) { return e.first < x; });
            kids.insert(it, {b, next});
            nodes_.emplace_back();
        }
        node = next;
    }
    nodes_[node].values.push_back(value);
    ++pattern_count_;
}

void AhoCorasick::build() {
    assert(!built_);
    built_ = true;
    std::deque<std::int32_t> queue;
    for (const auto& [b, c] : nodes_[0].children) {
        nodes_[c].fail = 0;
        queue.push_back(c);
    }
    while (!queue.empty()) {
        std::int32_t node = queue.front();
        queue.pop_front();
        for (const auto& [b, c] : nodes_[node].children) {
            std::int32_t f = nodes_[node].fail;
            std::int32_t next;
            while ((next = child(f, b)) == -1 && f != 0) f = nodes_[f].fail;
            nodes_[c].fail = next == -1 ? 0 : next;
            if (nodes_[c].fail == c) nodes_[c].fail = 0;
            queue.push_back(c);
        }
        std::int32_t f = nodes_[node].fail;
        nodes_[node].output_link = nodes_[f].values.empty() ? nodes_[f].output_link : f;
    }
}

}  // namespace mirage::rulelang
