#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdfcsa/common.hpp"
#include "rdfcsa/core.hpp"
#include "rdfcsa/dictionary.hpp"

namespace rdfcsa {

// Index file layout: fixed header, eight-entry section table (absolute
// offset + length), section payloads, then a CRC-32 over the concatenated
// section bytes. All integers little-endian.
inline constexpr char kMagic[8] = {'R', 'D', 'F', 'C', 'S', 'A', '1', '\0'};
inline constexpr uint16_t kFormatVersion = 1;

enum : uint16_t {
    kFlagHybrid = 1 << 0,
    kFlagDictionary = 1 << 1,
    kFlagDirectories = 1 << 2,
};

inline constexpr std::array<const char*, 8> kSectionNames = {
    "dictionary", "d_s", "d_p_select", "d_p_rank", "d_o", "psi_s", "psi_p", "psi_o",
};

struct IndexFileInfo {
    uint16_t version = kFormatVersion;
    uint16_t flags = 0;
    uint64_t n = 0, n_s = 0, n_p = 0, n_o = 0;
    uint32_t t_psi = 0;
    uint64_t so_count = kNoSoCount;
    std::array<uint64_t, 8> section_offset{};
    std::array<uint64_t, 8> section_length{};
    uint64_t total_bytes = 0;
};

inline std::vector<uint8_t> write_index(const Index& idx, const Dictionary* dict,
                                        bool embed_directories = true) {
    std::array<std::vector<uint8_t>, 8> sections;
    {
        ByteWriter w;
        if (dict) dict->serialize(w);
        sections[0] = w.take();
    }
    {
        ByteWriter w;
        idx.d_s().serialize(w, embed_directories);
        idx.occupancy_bits(Region::S).serialize(w, embed_directories);
        sections[1] = w.take();
    }
    {
        ByteWriter w;
        w.u64(idx.d_p_select().size());
        for (uint64_t p : idx.d_p_select()) w.u64(p);
        sections[2] = w.take();
    }
    {
        ByteWriter w;
        idx.d_p_rank().serialize(w, embed_directories);
        idx.occupancy_bits(Region::P).serialize(w, embed_directories);
        sections[3] = w.take();
    }
    {
        ByteWriter w;
        idx.d_o().serialize(w, embed_directories);
        idx.occupancy_bits(Region::O).serialize(w, embed_directories);
        sections[4] = w.take();
    }
    for (int r = 0; r < 3; ++r) {
        ByteWriter w;
        idx.psi(static_cast<Region>(r)).serialize(w);
        sections[5 + r] = w.take();
    }

    ByteWriter out;
    out.bytes(kMagic, 8);
    out.u16(kFormatVersion);
    uint16_t flags = 0;
    if (idx.mode() == BuildMode::Hybrid) flags |= kFlagHybrid;
    if (dict) flags |= kFlagDictionary;
    if (embed_directories) flags |= kFlagDirectories;
    out.u16(flags);
    out.u64(idx.size());
    out.u64(idx.n_s());
    out.u64(idx.n_p());
    out.u64(idx.n_o());
    out.u32(idx.t_psi());
    out.u64(idx.so_count());
    uint64_t offset = out.size() + 8 * 16;
    for (const auto& s : sections) {
        out.u64(offset);
        out.u64(s.size());
        offset += s.size();
    }
    uint32_t crc = 0;
    for (const auto& s : sections) {
        out.bytes(s.data(), s.size());
        crc = crc32(s, crc);
    }
    out.u32(crc);
    return out.take();
}

inline IndexFileInfo read_index_info(std::span<const uint8_t> bytes) {
    ByteReader in(bytes);
    auto magic = in.raw(8);
    if (std::memcmp(magic.data(), kMagic, 8) != 0) throw std::runtime_error("not an index file");
    IndexFileInfo info;
    info.version = in.u16();
    if (info.version != kFormatVersion) throw std::runtime_error("unsupported index version");
    info.flags = in.u16();
    info.n = in.u64();
    info.n_s = in.u64();
    info.n_p = in.u64();
    info.n_o = in.u64();
    info.t_psi = in.u32();
    info.so_count = in.u64();
    for (int s = 0; s < 8; ++s) {
        info.section_offset[s] = in.u64();
        info.section_length[s] = in.u64();
        if (info.section_offset[s] + info.section_length[s] > bytes.size()) {
            throw std::runtime_error("section out of bounds");
        }
        if (s > 0 && info.section_offset[s] != info.section_offset[s - 1] + info.section_length[s - 1]) {
            throw std::runtime_error("overlapping sections");
        }
    }
    info.total_bytes = bytes.size();
    return info;
}

struct LoadedIndex {
    Index index;
    std::optional<Dictionary> dictionary;
    IndexFileInfo info;
};

inline LoadedIndex read_index(std::span<const uint8_t> bytes) {
    const IndexFileInfo info = read_index_info(bytes);
    uint32_t crc = 0;
    for (int s = 0; s < 8; ++s) {
        crc = crc32(bytes.subspan(info.section_offset[s], info.section_length[s]), crc);
    }
    ByteReader tail(bytes.subspan(info.section_offset[7] + info.section_length[7]));
    if (tail.u32() != crc) throw std::runtime_error("checksum mismatch");

    auto section = [&](int s) { return ByteReader(bytes.subspan(info.section_offset[s], info.section_length[s])); };

    LoadedIndex out;
    out.info = info;
    if (info.flags & kFlagDictionary) {
        ByteReader in = section(0);
        out.dictionary = Dictionary::deserialize(in);
    }
    Index::Parts parts;
    parts.n = info.n;
    parts.n_s = info.n_s;
    parts.n_p = info.n_p;
    parts.n_o = info.n_o;
    parts.so_count = info.so_count;
    parts.mode = (info.flags & kFlagHybrid) ? BuildMode::Hybrid : BuildMode::Compressed;
    parts.t_psi = info.t_psi;
    {
        ByteReader in = section(1);
        parts.d_s = BitVector::deserialize(in, true);
        parts.occ_s = BitVector::deserialize(in, true);
    }
    {
        ByteReader in = section(2);
        parts.d_p_select.resize(in.u64());
        for (auto& p : parts.d_p_select) p = in.u64();
    }
    {
        ByteReader in = section(3);
        parts.d_p_rank = BitVector::deserialize(in, false);
        parts.occ_p = BitVector::deserialize(in, true);
    }
    {
        ByteReader in = section(4);
        parts.d_o = BitVector::deserialize(in, true);
        parts.occ_o = BitVector::deserialize(in, true);
    }
    {
        ByteReader in = section(5);
        parts.psi_s = PsiSegment::deserialize(in);
    }
    {
        ByteReader in = section(6);
        parts.psi_p = PsiSegment::deserialize(in);
    }
    {
        ByteReader in = section(7);
        parts.psi_o = PsiSegment::deserialize(in);
    }
    out.index = Index::from_parts(std::move(parts));
    return out;
}

inline void save_index_file(const std::string& path, std::span<const uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<uint8_t> load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open " + path);
    const auto size = in.tellg();
    in.seekg(0);
    std::vector<uint8_t> bytes(static_cast<size_t>(size));
    in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw std::runtime_error("read failed: " + path);
    return bytes;
}

struct PsiSectionStats {
    uint64_t bytes = 0;
    uint64_t plain_equivalent_bytes = 0;  // fixed-width layout of the same segment
    double ratio = 0.0;
    bool plain = false;
};

struct IndexStats {
    uint64_t n = 0;
    std::array<uint64_t, 8> section_bytes{};
    uint64_t header_bytes = 0;
    uint64_t trailer_bytes = 4;
    uint64_t total_bytes = 0;
    uint64_t baseline_bytes = 0;  // three 32-bit integers per triple
    double ratio_vs_baseline = 0.0;
    std::array<PsiSectionStats, 3> psi{};
};

inline IndexStats index_stats(const IndexFileInfo& info) {
    IndexStats st;
    st.n = info.n;
    st.section_bytes = info.section_length;
    st.header_bytes = info.section_offset[0];
    st.total_bytes = info.total_bytes;
    st.baseline_bytes = info.n * 12;
    st.ratio_vs_baseline =
        st.baseline_bytes == 0 ? 0.0 : static_cast<double>(st.total_bytes) / static_cast<double>(st.baseline_bytes);
    const uint64_t psi_header = 1 + 8 + 4 + 1;
    const uint64_t plain_bytes = psi_header + (info.n * bits_for(info.n) + 7) / 8;
    for (int k = 0; k < 3; ++k) {
        st.psi[k].bytes = info.section_length[5 + k];
        st.psi[k].plain_equivalent_bytes = plain_bytes;
        st.psi[k].ratio = static_cast<double>(st.psi[k].bytes) / static_cast<double>(plain_bytes);
    }
    return st;
}

struct VerifyReport {
    bool cyclic_ok = false;
    bool monotonic_ok = false;
    bool extract_count_ok = false;
    std::string first_failure;

    bool ok() const { return cyclic_ok && monotonic_ok && extract_count_ok; }
};

// Structural invariants of a loaded index: the three-step cycle returns to
// its start for every position, Psi is strictly increasing inside every
// symbol run, and extraction covers exactly n triples.
inline VerifyReport verify_structure(const Index& idx) {
    VerifyReport rep;
    const uint64_t n = idx.size();
    const auto ps = idx.psi(Region::S).decode_range(1, n);
    const auto pp = idx.psi(Region::P).decode_range(1, n);
    const auto po = idx.psi(Region::O).decode_range(1, n);
    rep.cyclic_ok = true;
    for (const auto* seg : {&ps, &pp, &po}) {
        for (uint64_t v : *seg) {
            if (v < 1 || v > n) {
                rep.cyclic_ok = false;
                rep.first_failure = "psi value out of [1,n]";
                break;
            }
        }
        if (!rep.cyclic_ok) break;
    }
    for (uint64_t i = 1; rep.cyclic_ok && i <= n; ++i) {
        if (po[pp[ps[i - 1] - 1] - 1] != i) {
            rep.cyclic_ok = false;
            rep.first_failure = "cycle broken at position " + std::to_string(i);
        }
    }
    rep.monotonic_ok = true;
    auto check_region = [&](Region r, const std::vector<uint64_t>& vals) {
        for (uint64_t i = 2; i <= n && rep.monotonic_ok; ++i) {
            const bool boundary = idx.symbol_rank(r, i) != idx.symbol_rank(r, i - 1);
            if (!boundary && vals[i - 1] <= vals[i - 2]) {
                rep.monotonic_ok = false;
                if (rep.first_failure.empty()) {
                    rep.first_failure = std::string("psi not increasing in region ") + region_name(r) +
                                        " at position " + std::to_string(i);
                }
            }
        }
    };
    check_region(Region::S, ps);
    check_region(Region::P, pp);
    check_region(Region::O, po);
    try {
        rep.extract_count_ok = rep.cyclic_ok && idx.extract_all().size() == n;
    } catch (const std::exception&) {
        rep.extract_count_ok = false;
    }
    if (!rep.extract_count_ok && rep.first_failure.empty()) rep.first_failure = "extract_all count mismatch";
    return rep;
}

}  // namespace rdfcsa
