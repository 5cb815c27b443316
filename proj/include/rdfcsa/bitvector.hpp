#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rdfcsa/common.hpp"

namespace rdfcsa {

namespace detail {

struct PopcountTable {
    uint8_t t[256];
    constexpr PopcountTable() : t{} {
        for (unsigned b = 0; b < 256; ++b) {
            unsigned c = 0;
            for (unsigned k = 0; k < 8; ++k) c += (b >> k) & 1;
            t[b] = static_cast<uint8_t>(c);
        }
    }
};
inline constexpr PopcountTable kPopByte{};

// kSelByte[b][k] = bit offset of the (k+1)-th set bit of byte b; 8 if absent.
struct SelectByteTable {
    uint8_t t[256][8];
    constexpr SelectByteTable() : t{} {
        for (unsigned b = 0; b < 256; ++b) {
            unsigned seen = 0;
            for (unsigned k = 0; k < 8; ++k) t[b][k] = 8;
            for (unsigned bit = 0; bit < 8; ++bit) {
                if ((b >> bit) & 1) t[b][seen++] = static_cast<uint8_t>(bit);
            }
        }
    }
};
inline constexpr SelectByteTable kSelByte{};

inline unsigned popcount32(uint32_t w) {
    return kPopByte.t[w & 0xFF] + kPopByte.t[(w >> 8) & 0xFF] + kPopByte.t[(w >> 16) & 0xFF] +
           kPopByte.t[w >> 24];
}

}  // namespace detail

// Plain bitmap with a two-level rank directory (cumulative counts every 256
// bits in 32-bit entries, counts relative to the superblock every 32 bits in
// 8-bit entries) and a sampled select: the position of every 256th 1 is kept
// so select binary-searches only between two superblock samples. Positions
// are 1-indexed in the public interface.
class BitVector {
public:
    static constexpr uint64_t kSuperblockBits = 256;
    static constexpr uint64_t kBlockBits = 32;
    static constexpr uint64_t kSelectSample = 256;

    BitVector() = default;

    explicit BitVector(const std::vector<bool>& bits, bool with_select = true) {
        len_ = bits.size();
        words_.assign(word_count(), 0);
        for (uint64_t i = 0; i < len_; ++i) {
            if (bits[i]) words_[i >> 5] |= uint32_t{1} << (i & 31);
        }
        build_directories(with_select);
    }

    uint64_t size() const { return len_; }
    uint64_t ones_count() const { return ones_; }

    bool get(uint64_t i) const {
        check_pos(i);
        return (words_[(i - 1) >> 5] >> ((i - 1) & 31)) & 1;
    }

    // Number of 1s in positions [1, i]; rank1(0) == 0.
    uint64_t rank1(uint64_t i) const {
        if (i == 0) return 0;
        check_pos(i);
        const uint64_t z = i - 1;
        const uint64_t w = z >> 5;
        const uint32_t masked = words_[w] & (~uint32_t{0} >> (31 - (z & 31)));
        return superblocks_[z >> 8] + blocks_[w] + detail::popcount32(masked);
    }

    // Position of the j-th 1.
    uint64_t select1(uint64_t j) const {
        if (j == 0 || j > ones_) throw std::out_of_range("select1: ordinal out of range");
        const bool sampled = !sampler_.sOnes.empty() || ones_ < kSelectSample;
        const uint64_t k = sampled ? j / kSelectSample : 0;
        if (k > 0 && j % kSelectSample == 0) return sampler_.sOnes[k - 1];
        // superblock range bracketed by the neighbouring samples
        uint64_t lo = k >= 1 ? (sampler_.sOnes[k - 1] - 1) >> 8 : 0;
        uint64_t hi = k < sampler_.sOnes.size() ? (sampler_.sOnes[k] - 1) >> 8 : superblock_count() - 1;
        while (lo < hi) {
            const uint64_t mid = (lo + hi + 1) / 2;
            if (superblocks_[mid] < j) lo = mid;
            else hi = mid - 1;
        }
        return descend(lo, j - superblocks_[lo]);
    }

    // Smallest position p > j holding a 1, if any.
    std::optional<uint64_t> selectnext1(uint64_t j) const {
        if (j == 0 || j > len_) throw std::out_of_range("selectnext1: position out of range");
        if (j == len_) return std::nullopt;
        const uint64_t z = j;  // 0-based index of position j+1
        uint64_t w = z >> 5;
        uint32_t cur = words_[w] & ~((uint32_t{1} << (z & 31)) - 1);
        if (cur != 0) return word_lowest(w, cur);
        uint64_t sb = z >> 8;
        const uint64_t sb_word_end = std::min(word_count(), (sb + 1) * 8);
        for (++w; w < sb_word_end; ++w) {
            if (words_[w] != 0) return word_lowest(w, words_[w]);
        }
        // skip empty superblocks: first boundary whose cumulative count grows
        const uint64_t seen = superblocks_[std::min(sb + 1, superblock_count())];
        if (seen >= ones_) return std::nullopt;
        uint64_t lo = sb + 1, hi = superblock_count() - 1;
        while (lo < hi) {
            const uint64_t mid = (lo + hi) / 2;
            if (superblocks_[mid + 1] > seen) hi = mid;
            else lo = mid + 1;
        }
        const uint64_t end = std::min(word_count(), (lo + 1) * 8);
        for (w = lo * 8; w < end; ++w) {
            if (words_[w] != 0) return word_lowest(w, words_[w]);
        }
        return std::nullopt;  // unreachable if directories are consistent
    }

    void serialize(ByteWriter& out, bool embed_directories) const {
        out.u64(len_);
        out.u8(embed_directories ? 1 : 0);
        out.bytes(words_.data(), words_.size() * sizeof(uint32_t));
        if (embed_directories) {
            out.u64(ones_);
            for (uint32_t v : superblocks_) out.u32(v);
            out.bytes(blocks_.data(), blocks_.size());
            out.u8(sampler_.sOnes.empty() && ones_ >= kSelectSample ? 0 : 1);
            for (uint32_t p : sampler_.sOnes) out.u32(p);
        }
    }

    static BitVector deserialize(ByteReader& in, bool with_select = true) {
        BitVector bv;
        bv.len_ = in.u64();
        const bool embedded = in.u8() != 0;
        auto raw = in.raw(bv.word_count() * sizeof(uint32_t));
        bv.words_.resize(bv.word_count());
        std::memcpy(bv.words_.data(), raw.data(), raw.size());
        if (embedded) {
            bv.ones_ = in.u64();
            bv.superblocks_.resize(bv.superblock_count() + 1);
            for (auto& v : bv.superblocks_) v = in.u32();
            auto braw = in.raw(bv.word_count());
            bv.blocks_.assign(braw.begin(), braw.end());
            const bool has_sampler = in.u8() != 0;
            if (has_sampler) {
                bv.sampler_.sOnes.resize(bv.ones_ / kSelectSample);
                for (auto& p : bv.sampler_.sOnes) p = in.u32();
            }
        } else {
            bv.build_directories(with_select);
        }
        return bv;
    }

    // Directory overhead in bits (rank tables plus select samples).
    uint64_t directory_bits() const {
        return superblocks_.size() * 32 + blocks_.size() * 8 + sampler_.sOnes.size() * 32;
    }

private:
    struct SelectSampler {
        std::vector<uint32_t> sOnes;  // position of every 256th 1
    };

    uint64_t word_count() const { return (len_ + 31) / 32; }
    uint64_t superblock_count() const { return std::max<uint64_t>(1, (len_ + 255) / 256); }

    void check_pos(uint64_t i) const {
        if (i == 0 || i > len_) throw std::out_of_range("bit position out of range");
    }

    void build_directories(bool with_select) {
        superblocks_.assign(superblock_count() + 1, 0);
        blocks_.assign(word_count(), 0);
        uint64_t total = 0;
        uint32_t in_sb = 0;
        for (uint64_t w = 0; w < word_count(); ++w) {
            if ((w & 7) == 0) {
                superblocks_[w >> 3] = static_cast<uint32_t>(total);
                in_sb = 0;
            }
            blocks_[w] = static_cast<uint8_t>(in_sb);
            const unsigned c = detail::popcount32(words_[w]);
            total += c;
            in_sb += c;
        }
        for (uint64_t s = word_count() == 0 ? 0 : (word_count() - 1) / 8 + 1; s <= superblock_count(); ++s) {
            superblocks_[s] = static_cast<uint32_t>(total);
        }
        ones_ = total;
        if (with_select) {
            sampler_.sOnes.clear();
            sampler_.sOnes.reserve(ones_ / kSelectSample);
            uint64_t seen = 0;
            for (uint64_t w = 0; w < word_count(); ++w) {
                uint32_t word = words_[w];
                unsigned c = detail::popcount32(word);
                while (seen / kSelectSample != (seen + c) / kSelectSample) {
                    const uint64_t want = (seen / kSelectSample + 1) * kSelectSample - seen;
                    sampler_.sOnes.push_back(static_cast<uint32_t>(in_word_select(w, word, want)));
                    // consume up to the sampled 1 so repeated samples in one word work
                    uint64_t pos0 = sampler_.sOnes.back() - 1;
                    const uint32_t below = (pos0 & 31) == 31 ? word : word & ((uint32_t{1} << ((pos0 & 31) + 1)) - 1);
                    const unsigned consumed = detail::popcount32(below);
                    seen += consumed;
                    c -= consumed;
                    word &= ~below;
                }
                seen += c;
            }
        }
    }

    // j-th 1 inside superblock sb (j relative to the superblock start).
    uint64_t descend(uint64_t sb, uint64_t j) const {
        uint64_t w = sb * 8;
        const uint64_t end = std::min(word_count(), (sb + 1) * 8);
        while (w + 1 < end && blocks_[w + 1] < j) ++w;
        return in_word_select(w, words_[w], j - blocks_[w]);
    }

    static uint64_t in_word_select(uint64_t w, uint32_t word, uint64_t j) {
        for (unsigned byte = 0; byte < 4; ++byte) {
            const uint8_t b = static_cast<uint8_t>(word >> (byte * 8));
            const unsigned c = detail::kPopByte.t[b];
            if (j <= c) return w * 32 + byte * 8 + detail::kSelByte.t[b][j - 1] + 1;
            j -= c;
        }
        throw std::logic_error("select descent past word");
    }

    uint64_t word_lowest(uint64_t w, uint32_t word) const {
        return in_word_select(w, word, 1);
    }

    std::vector<uint32_t> words_;
    uint64_t len_ = 0;
    uint64_t ones_ = 0;
    std::vector<uint32_t> superblocks_;  // cumulative 1s at each 256-bit boundary
    std::vector<uint8_t> blocks_;        // 1s from superblock start to each 32-bit block
    SelectSampler sampler_;
};

}  // namespace rdfcsa
