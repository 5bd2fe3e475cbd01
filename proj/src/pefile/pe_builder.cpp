#include "mirage/pefile/pe_builder.hpp"

#include <cstring>
#include <stdexcept>

namespace mirage::pefile {

namespace {

constexpr std::uint32_t kFileAlignment = 0x200;
constexpr std::uint32_t kSectionAlignment = 0x1000;
constexpr std::uint32_t kImageBase = 0x00400000;

std::uint32_t align_up(std::uint32_t v, std::uint32_t a) { return (v + a - 1) & ~(a - 1); }

void put_u16(std::vector<std::uint8_t>& b, size_t off, std::uint16_t v) {
    b[off] = static_cast<std::uint8_t>(v & 0xFF);
    b[off + 1] = static_cast<std::uint8_t>(v >> 8);
}

void put_u32(std::vector<std::uint8_t>& b, size_t off, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b[off + i] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF);
}

struct ImportBlob {
    std::vector<std::uint8_t> bytes;  // laid out relative to the .idata section VA
    std::uint32_t descriptor_size = 0;
};

// Descriptor array, then per-DLL lookup table, address table, hint/name
// entries and the DLL name string.
ImportBlob build_imports(const std::vector<ImportSpec>& imports, std::uint32_t base_rva) {
    ImportBlob blob;
    const size_t ndll = imports.size();
    blob.descriptor_size = static_cast<std::uint32_t>((ndll + 1) * 20);

    size_t cursor = blob.descriptor_size;
    struct DllLayout {
        std::uint32_t ilt_rva, iat_rva, name_rva;
        std::vector<std::uint32_t> thunks;
    };
    std::vector<DllLayout> layouts(ndll);

    // First pass: assign offsets.
    std::vector<std::vector<std::uint8_t>> hint_names(ndll);
    for (size_t d = 0; d < ndll; ++d) {
        const auto& imp = imports[d];
        const size_t nfun = imp.functions.size();
        layouts[d].ilt_rva = base_rva + static_cast<std::uint32_t>(cursor);
        cursor += (nfun + 1) * 4;
        layouts[d].iat_rva = base_rva + static_cast<std::uint32_t>(cursor);
        cursor += (nfun + 1) * 4;
        for (const auto& fn : imp.functions) {
            if (!fn.empty() && fn[0] == '#') {
                unsigned long ord = std::stoul(fn.substr(1));
                layouts[d].thunks.push_back(0x80000000u | static_cast<std::uint32_t>(ord));
            } else {
                layouts[d].thunks.push_back(base_rva + static_cast<std::uint32_t>(cursor));
                // hint (2 bytes) + name + NUL, padded to even length
                size_t len = 2 + fn.size() + 1;
                if (len % 2) ++len;
                auto& hn = hint_names[d];
                size_t start = hn.size();
                hn.resize(hn.size() + len, 0);
                std::memcpy(hn.data() + start + 2, fn.data(), fn.size());
                cursor += len;
            }
        }
        layouts[d].name_rva = base_rva + static_cast<std::uint32_t>(cursor);
        cursor += imp.dll.size() + 1;
    }

    blob.bytes.resize(cursor, 0);

    // Second pass: fill.
    size_t write = blob.descriptor_size;
    for (size_t d = 0; d < ndll; ++d) {
        const auto& imp = imports[d];
        const auto& lay = layouts[d];
        size_t desc = d * 20;
        put_u32(blob.bytes, desc + 0, lay.ilt_rva);   // OriginalFirstThunk
        put_u32(blob.bytes, desc + 12, lay.name_rva);  // Name
        put_u32(blob.bytes, desc + 16, lay.iat_rva);   // FirstThunk

        for (std::uint32_t t : lay.thunks) {
            put_u32(blob.bytes, write, t);
            write += 4;
        }
        write += 4;  // NUL thunk
        size_t iat_start = write;
        for (std::uint32_t t : lay.thunks) {
            put_u32(blob.bytes, write, t);
            write += 4;
        }
        write += 4;
        (void)iat_start;
        std::memcpy(blob.bytes.data() + write, hint_names[d].data(), hint_names[d].size());
        write += hint_names[d].size();
        std::memcpy(blob.bytes.data() + write, imp.dll.data(), imp.dll.size());
        write += imp.dll.size() + 1;
    }
    return blob;
}

}  // namespace

std::vector<std::uint8_t> build_pe(const PeFileSpec& spec) {
    struct PlacedSection {
        std::string name;
        std::vector<std::uint8_t> data;
        std::uint32_t characteristics;
        std::uint32_t va, vsize, raw_off, raw_size;
    };

    std::vector<PlacedSection> placed;
    for (const auto& s : spec.sections) {
        if (s.name.size() > 8) throw std::invalid_argument("section name longer than 8 bytes");
        placed.push_back({s.name, s.data, s.characteristics, 0, 0, 0, 0});
    }

    // Assign virtual addresses before synthesizing imports so the .idata RVA
    // is known.
    std::uint32_t next_va = kSectionAlignment;
    for (auto& p : placed) {
        p.va = next_va;
        p.vsize = static_cast<std::uint32_t>(p.data.size() ? p.data.size() : 1);
        next_va = align_up(p.va + std::max<std::uint32_t>(p.vsize, 1), kSectionAlignment);
    }

    std::uint32_t import_dir_rva = 0, import_dir_size = 0;
    if (!spec.imports.empty()) {
        std::uint32_t idata_va = next_va;
        ImportBlob blob = build_imports(spec.imports, idata_va);
        import_dir_rva = idata_va;
        import_dir_size = blob.descriptor_size;
        placed.push_back({".idata", std::move(blob.bytes), 0xC0000040 /* initialized | rw */,
                          idata_va, 0, 0, 0});
        auto& p = placed.back();
        p.vsize = static_cast<std::uint32_t>(p.data.size());
        next_va = align_up(p.va + p.vsize, kSectionAlignment);
    }

    const std::uint16_t nsections = static_cast<std::uint16_t>(placed.size());
    const std::uint32_t headers_size =
        64 + 4 + 20 + 224 + static_cast<std::uint32_t>(nsections) * 40;
    const std::uint32_t headers_aligned = align_up(headers_size, kFileAlignment);

    std::uint32_t raw_cursor = headers_aligned;
    for (auto& p : placed) {
        p.raw_off = raw_cursor;
        p.raw_size = align_up(static_cast<std::uint32_t>(p.data.size()), kFileAlignment);
        raw_cursor += p.raw_size;
    }

    std::vector<std::uint8_t> out(raw_cursor, 0);

    // DOS header
    out[0] = 'M';
    out[1] = 'Z';
    put_u32(out, 0x3C, 64);  // e_lfanew

    // PE signature
    size_t pe = 64;
    out[pe] = 'P';
    out[pe + 1] = 'E';

    // COFF header
    size_t coff = pe + 4;
    put_u16(out, coff + 0, spec.machine);
    put_u16(out, coff + 2, nsections);
    put_u32(out, coff + 4, 0x5E000000);  // TimeDateStamp, fixed for determinism
    put_u16(out, coff + 16, 224);        // SizeOfOptionalHeader
    put_u16(out, coff + 18, 0x0102);     // executable | 32-bit

    // Optional header (PE32)
    size_t opt = coff + 20;
    put_u16(out, opt + 0, 0x010B);  // magic
    out[opt + 2] = 14;              // linker major
    std::uint32_t size_of_code = 0;
    for (const auto& p : placed) {
        if (p.characteristics & 0x20) size_of_code += p.raw_size;
    }
    put_u32(out, opt + 4, size_of_code);
    put_u32(out, opt + 16, placed.empty() ? 0 : placed.front().va);  // entry point
    put_u32(out, opt + 20, placed.empty() ? 0 : placed.front().va);  // base of code
    put_u32(out, opt + 28, kImageBase);
    put_u32(out, opt + 32, kSectionAlignment);
    put_u32(out, opt + 36, kFileAlignment);
    put_u16(out, opt + 40, 6);  // os major
    put_u16(out, opt + 48, 6);  // subsystem major
    put_u32(out, opt + 56, next_va);          // SizeOfImage
    put_u32(out, opt + 60, headers_aligned);  // SizeOfHeaders
    put_u16(out, opt + 68, 3);                // subsystem: console
    put_u32(out, opt + 72, 0x00100000);       // stack reserve
    put_u32(out, opt + 76, 0x00001000);       // stack commit
    put_u32(out, opt + 80, 0x00100000);       // heap reserve
    put_u32(out, opt + 84, 0x00001000);       // heap commit
    put_u32(out, opt + 92, 16);               // NumberOfRvaAndSizes

    size_t dirs = opt + 96;
    if (import_dir_rva) {
        put_u32(out, dirs + 1 * 8, import_dir_rva);
        put_u32(out, dirs + 1 * 8 + 4, import_dir_size);
    }

    // Section table
    size_t sect = opt + 224;
    for (const auto& p : placed) {
        std::memcpy(out.data() + sect, p.name.data(), p.name.size());
        put_u32(out, sect + 8, p.vsize);
        put_u32(out, sect + 12, p.va);
        put_u32(out, sect + 16, p.raw_size);
        put_u32(out, sect + 20, p.raw_off);
        put_u32(out, sect + 36, p.characteristics);
        sect += 40;
    }

    // Raw section data
    for (const auto& p : placed) {
        std::memcpy(out.data() + p.raw_off, p.data.data(), p.data.size());
    }

    if (!spec.overlay.empty()) {
        out.insert(out.end(), spec.overlay.begin(), spec.overlay.end());
    }

    if (spec.with_certificate) {
        // WIN_CERTIFICATE: dwLength, wRevision 0x0200, wCertificateType 0x0002
        while (out.size() % 8) out.push_back(0);
        std::uint32_t cert_off = static_cast<std::uint32_t>(out.size());
        std::vector<std::uint8_t> cert(8 + 56, 0);
        put_u32(cert, 0, static_cast<std::uint32_t>(cert.size()));
        put_u16(cert, 4, 0x0200);
        put_u16(cert, 6, 0x0002);
        out.insert(out.end(), cert.begin(), cert.end());
        put_u32(out, dirs + 4 * 8, cert_off);  // security directory holds a file offset
        put_u32(out, dirs + 4 * 8 + 4, static_cast<std::uint32_t>(cert.size()));
    }

    return out;
}

}  // namespace mirage::pefile
