#include "mirage/pefile/parse.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "mirage/pefile/entropy.hpp"

namespace mirage::pefile {

namespace {

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    bool in_bounds(std::uint64_t off, std::uint64_t len) const {
        return off <= data_.size() && len <= data_.size() - off;
    }

    std::optional<std::uint8_t> u8(std::uint64_t off) const {
        if (!in_bounds(off, 1)) return std::nullopt;
        return data_[off];
    }

    std::optional<std::uint16_t> u16(std::uint64_t off) const {
        if (!in_bounds(off, 2)) return std::nullopt;
        return static_cast<std::uint16_t>(data_[off] | (data_[off + 1] << 8));
    }

    std::optional<std::uint32_t> u32(std::uint64_t off) const {
        if (!in_bounds(off, 4)) return std::nullopt;
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | data_[off + i];
        return v;
    }

    std::optional<std::uint64_t> u64(std::uint64_t off) const {
        if (!in_bounds(off, 8)) return std::nullopt;
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | data_[off + i];
        return v;
    }

    // NUL-terminated string, bounded; nullopt when the terminator is missing
    // before the bound or the offset is outside the buffer.
    std::optional<std::string> cstring(std::uint64_t off, std::size_t max_len = 512) const {
        if (off >= data_.size()) return std::nullopt;
        std::string s;
        for (std::uint64_t i = off; i < data_.size() && s.size() < max_len; ++i) {
            if (data_[i] == 0) return s;
            s.push_back(static_cast<char>(data_[i]));
        }
        return std::nullopt;
    }

    std::size_t size() const { return data_.size(); }
    std::span<const std::uint8_t> slice(std::uint64_t off, std::uint64_t len) const {
        return data_.subspan(off, len);
    }

private:
    std::span<const std::uint8_t> data_;
};

template <typename T>
T require(std::optional<T> v, const char* what) {
    if (!v) throw MalformedHeader(what);
    return *v;
}

// RVA -> file offset through the section table. Headers are mapped 1:1.
std::optional<std::uint64_t> rva_to_offset(const std::vector<Section>& sections,
                                           std::uint64_t headers_size, std::uint32_t rva) {
    for (const auto& s : sections) {
        std::uint32_t extent = std::max(s.virtual_size, s.raw_size);
        if (rva >= s.virtual_address && rva < static_cast<std::uint64_t>(s.virtual_address) + extent) {
            std::uint64_t delta = rva - s.virtual_address;
            if (delta >= s.raw_size) return std::nullopt;  // in virtual-only tail
            return s.raw_offset + delta;
        }
    }
    if (rva < headers_size) return rva;
    return std::nullopt;
}

void parse_imports(const ByteReader& r, const std::vector<Section>& sections,
                   std::uint64_t headers_size, std::uint32_t dir_rva, bool pe32_plus,
                   std::vector<ImportEntry>& out) {
    auto dir_off = rva_to_offset(sections, headers_size, dir_rva);
    if (!dir_off) return;

    const std::uint64_t max_descriptors = r.size() / 20 + 1;
    for (std::uint64_t d = 0; d < max_descriptors; ++d) {
        std::uint64_t desc = *dir_off + d * 20;
        auto oft = r.u32(desc);
        auto name_rva = r.u32(desc + 12);
        auto ft = r.u32(desc + 16);
        if (!oft || !name_rva || !ft) return;  // table runs off the file
        if (*oft == 0 && *name_rva == 0 && *ft == 0) return;

        ImportEntry entry;
        auto name_off = rva_to_offset(sections, headers_size, *name_rva);
        if (!name_off) continue;  // skip entries pointing outside mapped sections
        auto dll = r.cstring(*name_off);
        if (!dll || dll->empty()) continue;
        entry.dll = *dll;

        std::uint32_t thunk_rva = *oft ? *oft : *ft;
        auto thunk_off = rva_to_offset(sections, headers_size, thunk_rva);
        if (!thunk_off) continue;

        const std::uint64_t thunk_size = pe32_plus ? 8 : 4;
        const std::uint64_t max_thunks = r.size() / thunk_size + 1;
        for (std::uint64_t t = 0; t < max_thunks; ++t) {
            std::uint64_t toff = *thunk_off + t * thunk_size;
            std::uint64_t value;
            if (pe32_plus) {
                auto v = r.u64(toff);
                if (!v) break;
                value = *v;
            } else {
                auto v = r.u32(toff);
                if (!v) break;
                value = *v;
            }
            if (value == 0) break;

            const bool by_ordinal =
                pe32_plus ? (value & 0x8000000000000000ull) : (value & 0x80000000ull);
            if (by_ordinal) {
                entry.functions.push_back("#" + std::to_string(value & 0xFFFF));
            } else {
                auto hint_off = rva_to_offset(sections, headers_size,
                                              static_cast<std::uint32_t>(value));
                if (!hint_off) continue;
                auto fn = r.cstring(*hint_off + 2);
                if (fn && !fn->empty()) entry.functions.push_back(*fn);
            }
        }
        out.push_back(std::move(entry));
    }
}

}  // namespace

PeImage parse_pe(std::span<const std::uint8_t> bytes, const ParseOptions& opts) {
    if (bytes.size() > opts.max_input_size) {
        throw OversizeInput("input exceeds configured size cap");
    }
    ByteReader r(bytes);

    if (require(r.u8(0), "truncated DOS header") != 'M' || require(r.u8(1), "truncated DOS header") != 'Z') {
        throw MalformedHeader("missing MZ signature");
    }
    std::uint32_t e_lfanew = require(r.u32(0x3C), "truncated DOS header");
    std::uint32_t sig = require(r.u32(e_lfanew), "truncated PE signature");
    if (sig != 0x00004550) {  // "PE\0\0"
        throw MalformedHeader("missing PE signature");
    }

    PeImage img;
    std::uint64_t coff = static_cast<std::uint64_t>(e_lfanew) + 4;
    img.machine = require(r.u16(coff), "truncated COFF header");
    std::uint16_t nsections = require(r.u16(coff + 2), "truncated COFF header");
    std::uint16_t opt_size = require(r.u16(coff + 16), "truncated COFF header");

    std::uint64_t opt = coff + 20;
    std::uint16_t magic = require(r.u16(opt), "truncated optional header");
    if (magic == 0x010B) {
        img.pe32_plus = false;
    } else if (magic == 0x020B) {
        img.pe32_plus = true;
    } else {
        throw MalformedHeader("unknown optional header magic");
    }

    std::uint32_t size_of_headers = require(r.u32(opt + 60), "truncated optional header");

    std::uint64_t dirs = opt + (img.pe32_plus ? 112 : 96);
    std::uint32_t num_dirs = require(r.u32(opt + (img.pe32_plus ? 108 : 92)),
                                     "truncated optional header");
    num_dirs = std::min<std::uint32_t>(num_dirs, 16);

    auto directory = [&](std::uint32_t index) -> std::pair<std::uint32_t, std::uint32_t> {
        if (index >= num_dirs) return {0, 0};
        auto rva = r.u32(dirs + index * 8);
        auto size = r.u32(dirs + index * 8 + 4);
        if (!rva || !size) return {0, 0};
        return {*rva, *size};
    };

    // Section table
    std::uint64_t sect = opt + opt_size;
    for (std::uint16_t i = 0; i < nsections; ++i) {
        std::uint64_t entry = sect + static_cast<std::uint64_t>(i) * 40;
        if (!r.in_bounds(entry, 40)) throw MalformedHeader("truncated section table");
        Section s;
        for (int c = 0; c < 8; ++c) {
            std::uint8_t ch = *r.u8(entry + c);
            if (ch == 0) break;
            s.name.push_back(static_cast<char>(ch));
        }
        s.virtual_size = *r.u32(entry + 8);
        s.virtual_address = *r.u32(entry + 12);
        s.raw_size = *r.u32(entry + 16);
        s.raw_offset = *r.u32(entry + 20);
        s.characteristics = *r.u32(entry + 36);

        // Clamp the raw range into file bounds.
        if (s.raw_offset >= bytes.size()) {
            s.raw_offset = 0;
            s.raw_size = 0;
        } else if (static_cast<std::uint64_t>(s.raw_offset) + s.raw_size > bytes.size()) {
            s.raw_size = static_cast<std::uint32_t>(bytes.size() - s.raw_offset);
        }
        s.entropy = s.raw_size ? shannon_entropy(r.slice(s.raw_offset, s.raw_size)) : 0.0;
        img.sections.push_back(std::move(s));
    }

    auto [sec_off, sec_size] = directory(4);  // security: file offset, not an RVA
    img.has_certificate_table = sec_off != 0 && sec_size != 0;

    auto [res_rva, res_size] = directory(2);
    if (res_rva && res_size) {
        if (auto res_off = rva_to_offset(img.sections, size_of_headers, res_rva)) {
            auto named = r.u16(*res_off + 12);
            auto ids = r.u16(*res_off + 14);
            if (named && ids) img.resource_entry_count = *named + *ids;
        }
    }

    auto [imp_rva, imp_size] = directory(1);
    (void)imp_size;
    if (imp_rva) {
        parse_imports(r, img.sections, size_of_headers, imp_rva, img.pe32_plus, img.imports);
    }

    img.file_entropy = shannon_entropy(bytes);
    return img;
}

}  // namespace mirage::pefile
