#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdfcsa {

// Bits needed to store values in [0, universe); 0 for a one-value universe.
inline unsigned bits_for(uint64_t universe) {
    return universe <= 1 ? 0 : static_cast<unsigned>(std::bit_width(universe - 1));
}

inline uint64_t zigzag_encode(int64_t v) {
    return (static_cast<uint64_t>(v) << 1) ^ static_cast<uint64_t>(v >> 63);
}

inline int64_t zigzag_decode(uint64_t u) {
    return static_cast<int64_t>(u >> 1) ^ -static_cast<int64_t>(u & 1);
}

// LSB-first bit stream over 64-bit words.
class BitWriter {
public:
    void put(uint64_t value, unsigned nbits) {
        if (nbits == 0) return;
        if (nbits < 64) value &= (uint64_t{1} << nbits) - 1;
        const unsigned off = static_cast<unsigned>(bits_ & 63);
        if (off == 0) words_.push_back(0);
        words_.back() |= value << off;
        if (off + nbits > 64) words_.push_back(value >> (64 - off));
        bits_ += nbits;
    }

    uint64_t bit_count() const { return bits_; }
    const std::vector<uint64_t>& words() const { return words_; }
    std::vector<uint64_t> take_words() { return std::move(words_); }

private:
    std::vector<uint64_t> words_;
    uint64_t bits_ = 0;
};

class BitReader {
public:
    BitReader(std::span<const uint64_t> words, uint64_t bit_count)
        : words_(words), bit_count_(bit_count) {}

    void seek(uint64_t bit_pos) { pos_ = bit_pos; }
    uint64_t position() const { return pos_; }

    uint64_t get(unsigned nbits) {
        if (nbits == 0) return 0;
        if (pos_ + nbits > bit_count_) throw std::runtime_error("bit stream overrun");
        const uint64_t w = pos_ >> 6;
        const unsigned off = static_cast<unsigned>(pos_ & 63);
        uint64_t v = words_[w] >> off;
        if (off + nbits > 64) v |= words_[w + 1] << (64 - off);
        pos_ += nbits;
        if (nbits < 64) v &= (uint64_t{1} << nbits) - 1;
        return v;
    }

    uint64_t get_bit() { return get(1); }

private:
    std::span<const uint64_t> words_;
    uint64_t bit_count_;
    uint64_t pos_ = 0;
};

// Fixed-width packed integer array; width 0 means every value is 0.
class PackedIntVector {
public:
    PackedIntVector() = default;

    PackedIntVector(std::span<const uint64_t> values, unsigned width) : width_(width), size_(values.size()) {
        BitWriter w;
        for (uint64_t v : values) w.put(v, width_);
        words_ = w.take_words();
    }

    uint64_t get(uint64_t i) const {
        if (width_ == 0) return 0;
        const uint64_t bit = i * width_;
        const uint64_t w = bit >> 6;
        const unsigned off = static_cast<unsigned>(bit & 63);
        uint64_t v = words_[w] >> off;
        if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
        if (width_ < 64) v &= (uint64_t{1} << width_) - 1;
        return v;
    }

    uint64_t size() const { return size_; }
    unsigned width() const { return width_; }
    uint64_t bit_count() const { return size_ * width_; }
    const std::vector<uint64_t>& words() const { return words_; }

    static PackedIntVector from_raw(std::vector<uint64_t> words, unsigned width, uint64_t size) {
        PackedIntVector pv;
        pv.words_ = std::move(words);
        pv.width_ = width;
        pv.size_ = size;
        return pv;
    }

private:
    std::vector<uint64_t> words_;
    unsigned width_ = 0;
    uint64_t size_ = 0;
};

// Little-endian byte buffer used for all on-disk structures.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) { append(&v, 2); }
    void u32(uint32_t v) { append(&v, 4); }
    void u64(uint64_t v) { append(&v, 8); }

    void bytes(const void* p, size_t len) {
        const auto* b = static_cast<const uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + len);
    }

    // Word array as bytes, least significant byte first.
    void words(std::span<const uint64_t> ws, uint64_t bit_count) {
        const uint64_t nbytes = (bit_count + 7) / 8;
        for (uint64_t i = 0; i < nbytes; ++i) {
            buf_.push_back(static_cast<uint8_t>(ws[i >> 3] >> ((i & 7) * 8)));
        }
    }

    const std::vector<uint8_t>& data() const { return buf_; }
    std::vector<uint8_t> take() { return std::move(buf_); }
    size_t size() const { return buf_.size(); }

private:
    void append(const void* p, size_t len) {
        uint64_t v = 0;
        std::memcpy(&v, p, len);
        for (size_t i = 0; i < len; ++i) buf_.push_back(static_cast<uint8_t>(v >> (i * 8)));
    }

    std::vector<uint8_t> buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() { return static_cast<uint8_t>(read(1)); }
    uint16_t u16() { return static_cast<uint16_t>(read(2)); }
    uint32_t u32() { return static_cast<uint32_t>(read(4)); }
    uint64_t u64() { return read(8); }

    std::vector<uint64_t> words(uint64_t bit_count) {
        const uint64_t nbytes = (bit_count + 7) / 8;
        need(nbytes);
        std::vector<uint64_t> ws((bit_count + 63) / 64, 0);
        for (uint64_t i = 0; i < nbytes; ++i) {
            ws[i >> 3] |= static_cast<uint64_t>(data_[pos_ + i]) << ((i & 7) * 8);
        }
        pos_ += nbytes;
        return ws;
    }

    std::span<const uint8_t> raw(size_t len) {
        need(len);
        auto s = data_.subspan(pos_, len);
        pos_ += len;
        return s;
    }

    size_t remaining() const { return data_.size() - pos_; }
    size_t position() const { return pos_; }

private:
    uint64_t read(size_t len) {
        need(len);
        uint64_t v = 0;
        for (size_t i = 0; i < len; ++i) v |= static_cast<uint64_t>(data_[pos_ + i]) << (i * 8);
        pos_ += len;
        return v;
    }

    void need(size_t len) const {
        if (pos_ + len > data_.size()) throw std::runtime_error("truncated input");
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

// CRC-32 (IEEE), reflected, table-driven.
namespace detail {
struct Crc32Table {
    uint32_t t[256];
    constexpr Crc32Table() : t{} {
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
    }
};
inline constexpr Crc32Table kCrc32Table{};
}  // namespace detail

inline uint32_t crc32(std::span<const uint8_t> data, uint32_t seed = 0) {
    uint32_t c = ~seed;
    for (uint8_t b : data) c = detail::kCrc32Table.t[(c ^ b) & 0xFF] ^ (c >> 8);
    return ~c;
}

}  // namespace rdfcsa
