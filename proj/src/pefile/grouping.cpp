#include "mirage/pefile/grouping.hpp"

#include <algorithm>
#include <map>

#include "mirage/util/hash.hpp"

namespace mirage::pefile {

std::vector<std::uint8_t> normalized_text_section(const PeImage& img,
                                                  std::span<const std::uint8_t> bytes) {
    for (const auto& s : img.sections) {
        if (s.name != ".text") continue;
        if (s.raw_size == 0 || s.raw_offset >= bytes.size()) return {};
        std::uint64_t end = std::min<std::uint64_t>(bytes.size(),
                                                    static_cast<std::uint64_t>(s.raw_offset) + s.raw_size);
        std::vector<std::uint8_t> text(bytes.begin() + s.raw_offset, bytes.begin() + end);
        while (!text.empty() && text.back() == 0) text.pop_back();
        return text;
    }
    return {};
}

std::vector<SampleGroup> group_samples(const std::vector<GroupInput>& samples) {
    std::map<std::string, SampleGroup> by_key;
    std::vector<std::string> key_order;

    for (const auto& sample : samples) {
        bool has_text = false;
        if (sample.image) {
            for (const auto& s : sample.image->sections) {
                if (s.name == ".text" && s.raw_size > 0) has_text = true;
            }
        }
        std::string key;
        if (has_text) {
            key = util::sha256_hex(normalized_text_section(*sample.image, sample.bytes));
        } else {
            // No shared code to compare; keep the sample alone.
            key = "singleton:" + sample.id;
        }
        auto [it, inserted] = by_key.try_emplace(key, SampleGroup{key, {}});
        if (inserted) key_order.push_back(key);
        it->second.members.push_back(sample.id);
    }

    std::vector<SampleGroup> out;
    out.reserve(key_order.size());
    for (const auto& k : key_order) out.push_back(std::move(by_key[k]));
    std::stable_sort(out.begin(), out.end(), [](const SampleGroup& a, const SampleGroup& b) {
        if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
        return a.key < b.key;
    });
    return out;
}

}  // namespace mirage::pefile
