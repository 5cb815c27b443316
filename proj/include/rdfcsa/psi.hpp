#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "rdfcsa/common.hpp"

namespace rdfcsa {

enum class PsiMode : uint8_t { Compressed = 0, Plain = 1 };

namespace detail {

// Token space for the gap stream. A maximal run of r >= 2 consecutive +1
// gaps becomes RUN(r); any other single gap g becomes GAP(g), zig-zag mapped
// so negative gaps stay encodable. Both kinds share one integer id space:
// GAP ids are even, RUN ids odd.
inline uint64_t gap_token(int64_t gap) { return zigzag_encode(gap) << 1; }
inline uint64_t run_token(uint64_t len) { return ((len - 2) << 1) | 1; }
inline bool token_is_run(uint64_t id) { return id & 1; }
inline int64_t token_gap(uint64_t id) { return zigzag_decode(id >> 1); }
inline uint64_t token_run_len(uint64_t id) { return (id >> 1) + 2; }

constexpr uint64_t kEscapeSym = ~uint64_t{0};

// Canonical Huffman over at most kHead coded token values plus one escape
// symbol; escaped tokens follow as fixed-width raw ids.
class HuffmanCode {
public:
    static constexpr size_t kHead = 1024;

    struct Entry {
        uint64_t symbol;
        uint8_t length;
    };

    void build(const std::map<uint64_t, uint64_t>& freq) {
        entries_.clear();
        if (freq.empty()) return;
        std::vector<std::pair<uint64_t, uint64_t>> items(freq.begin(), freq.end());  // (symbol, count)
        if (items.size() > kHead) {
            // keep the kHead most frequent values, ties to the smaller symbol
            std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
            });
            uint64_t escaped = 0;
            for (size_t i = kHead; i < items.size(); ++i) escaped += items[i].second;
            items.resize(kHead);
            items.emplace_back(kEscapeSym, escaped);
            std::sort(items.begin(), items.end());
        }
        assign_lengths(items);
        finish();
    }

    bool empty() const { return entries_.empty(); }
    const std::vector<Entry>& entries() const { return entries_; }

    void set_entries(std::vector<Entry> entries) {
        entries_ = std::move(entries);
        finish();
    }

    bool lookup(uint64_t symbol, uint64_t& code, uint8_t& length) const {
        auto it = encode_.find(symbol);
        if (it == encode_.end()) return false;
        code = it->second.first;
        length = it->second.second;
        return true;
    }

    uint64_t decode(BitReader& in) const {
        uint64_t acc = 0;
        for (unsigned len = 1; len <= max_len_; ++len) {
            acc = (acc << 1) | in.get_bit();
            const uint64_t idx = acc - first_code_[len];
            if (acc >= first_code_[len] && idx < count_[len]) {
                return sorted_[offset_[len] + idx];
            }
        }
        throw std::runtime_error("corrupt token stream");
    }

private:
    void assign_lengths(std::vector<std::pair<uint64_t, uint64_t>>& items) {
        // ties resolved by (frequency, symbol); merged nodes order by the
        // smallest symbol they contain, with the escape symbol largest
        struct Node {
            uint64_t freq;
            uint64_t key;
            int left, right;  // -1 for leaves
            size_t item;
        };
        std::vector<Node> nodes;
        nodes.reserve(items.size() * 2);
        std::sort(items.begin(), items.end());
        for (size_t i = 0; i < items.size(); ++i) {
            nodes.push_back({items[i].second, items[i].first, -1, -1, i});
        }
        if (nodes.size() == 1) {
            entries_.push_back({items[0].first, 1});
            return;
        }
        auto cmp = [&](int a, int b) {
            if (nodes[a].freq != nodes[b].freq) return nodes[a].freq > nodes[b].freq;
            return nodes[a].key > nodes[b].key;
        };
        std::vector<int> heap(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) heap[i] = static_cast<int>(i);
        std::make_heap(heap.begin(), heap.end(), cmp);
        while (heap.size() > 1) {
            std::pop_heap(heap.begin(), heap.end(), cmp);
            const int a = heap.back();
            heap.pop_back();
            std::pop_heap(heap.begin(), heap.end(), cmp);
            const int b = heap.back();
            heap.pop_back();
            nodes.push_back({nodes[a].freq + nodes[b].freq, std::min(nodes[a].key, nodes[b].key), a, b, 0});
            heap.push_back(static_cast<int>(nodes.size() - 1));
            std::push_heap(heap.begin(), heap.end(), cmp);
        }
        std::vector<std::pair<int, unsigned>> stack{{heap[0], 0}};
        while (!stack.empty()) {
            auto [id, depth] = stack.back();
            stack.pop_back();
            if (nodes[id].left < 0) {
                entries_.push_back({items[nodes[id].item].first, static_cast<uint8_t>(depth)});
            } else {
                stack.push_back({nodes[id].left, depth + 1});
                stack.push_back({nodes[id].right, depth + 1});
            }
        }
        std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
            if (a.length != b.length) return a.length < b.length;
            return a.symbol < b.symbol;
        });
    }

    void finish() {
        encode_.clear();
        sorted_.clear();
        max_len_ = 0;
        for (const auto& e : entries_) max_len_ = std::max<unsigned>(max_len_, e.length);
        first_code_.assign(max_len_ + 1, 0);
        count_.assign(max_len_ + 1, 0);
        offset_.assign(max_len_ + 1, 0);
        std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
            if (a.length != b.length) return a.length < b.length;
            return a.symbol < b.symbol;
        });
        for (const auto& e : entries_) ++count_[e.length];
        uint64_t code = 0;
        size_t off = 0;
        for (unsigned len = 1; len <= max_len_; ++len) {
            code <<= 1;
            first_code_[len] = code;
            offset_[len] = off;
            code += count_[len];
            off += count_[len];
        }
        sorted_.reserve(entries_.size());
        uint64_t next = 0;
        unsigned cur_len = 0;
        for (const auto& e : entries_) {
            if (e.length != cur_len) {
                cur_len = e.length;
                next = first_code_[cur_len];
            }
            encode_[e.symbol] = {next++, e.length};
            sorted_.push_back(e.symbol);
        }
    }

    std::vector<Entry> entries_;
    std::unordered_map<uint64_t, std::pair<uint64_t, uint8_t>> encode_;
    std::vector<uint64_t> sorted_;
    std::vector<uint64_t> first_code_;
    std::vector<uint64_t> count_;
    std::vector<size_t> offset_;
    unsigned max_len_ = 0;
};

}  // namespace detail

// One partition of the index permutation, length n with values in [1, n].
// Compressed form keeps absolute values at positions 1 + k*t_psi and a
// Huffman/RLE gap stream between them; runs never cross a sample boundary,
// so every sample is an independent decode entry point. Plain form is a
// fixed-width array of ceil(log2 n) bits per entry.
class PsiSegment {
public:
    PsiSegment() = default;

    static PsiSegment build(std::span<const uint64_t> values, PsiMode mode, uint32_t t_psi) {
        if (values.empty()) throw std::invalid_argument("psi build: empty value sequence");
        PsiSegment seg;
        seg.n_ = values.size();
        seg.mode_ = mode;
        for (uint64_t v : values) {
            if (v < 1 || v > seg.n_) throw std::invalid_argument("psi build: value out of [1,n]");
        }
        if (mode == PsiMode::Plain) {
            std::vector<uint64_t> shifted(values.begin(), values.end());
            for (auto& v : shifted) --v;
            seg.plain_ = PackedIntVector(shifted, bits_for(seg.n_));
            return seg;
        }
        if (t_psi == 0) throw std::invalid_argument("psi build: t_psi must be positive");
        seg.t_psi_ = t_psi;
        seg.build_compressed(values);
        return seg;
    }

    uint64_t size() const { return n_; }
    PsiMode mode() const { return mode_; }
    uint32_t t_psi() const { return t_psi_; }
    uint64_t token_count() const { return token_count_; }

    uint64_t access(uint64_t i) const {
        if (i < 1 || i > n_) throw std::out_of_range("psi access: position out of range");
        if (mode_ == PsiMode::Plain) return plain_.get(i - 1) + 1;
        const uint64_t block = (i - 1) / t_psi_;
        if ((i - 1) % t_psi_ == 0) return samples_.get(block) + 1;
        Cursor c = cursor_at_block(block);
        while (c.pos < i) c.advance(*this);
        return c.value;
    }

    // Values at positions [l, r]; empty when l > r.
    std::vector<uint64_t> decode_range(uint64_t l, uint64_t r) const {
        std::vector<uint64_t> out;
        if (l > r) return out;
        if (l < 1 || r > n_) throw std::out_of_range("psi decode_range: bounds out of range");
        out.reserve(r - l + 1);
        if (mode_ == PsiMode::Plain) {
            for (uint64_t i = l; i <= r; ++i) out.push_back(plain_.get(i - 1) + 1);
            return out;
        }
        Cursor c = cursor_at_block((l - 1) / t_psi_);
        while (c.pos < l) c.advance(*this);
        out.push_back(c.value);
        while (c.pos < r) {
            c.advance(*this);
            out.push_back(c.value);
        }
        return out;
    }

    uint64_t payload_bits() const {
        if (mode_ == PsiMode::Plain) return plain_.bit_count();
        return samples_.bit_count() + stream_bits_;
    }

    void serialize(ByteWriter& out) const {
        out.u8(static_cast<uint8_t>(mode_));
        out.u64(n_);
        out.u32(mode_ == PsiMode::Plain ? 0 : t_psi_);
        out.u8(static_cast<uint8_t>(bits_for(n_)));
        if (mode_ == PsiMode::Plain) {
            out.words(plain_.words(), plain_.bit_count());
            return;
        }
        out.words(samples_.words(), samples_.bit_count());
        const auto& entries = code_.entries();
        out.u32(static_cast<uint32_t>(entries.size()));
        for (const auto& e : entries) {
            out.u64(e.symbol);
            out.u8(e.length);
        }
        out.u64(stream_bits_);
        out.words(stream_, stream_bits_);
    }

    static PsiSegment deserialize(ByteReader& in) {
        PsiSegment seg;
        seg.mode_ = static_cast<PsiMode>(in.u8());
        seg.n_ = in.u64();
        seg.t_psi_ = in.u32();
        const unsigned width = in.u8();
        if (width != bits_for(seg.n_)) throw std::runtime_error("psi section: width mismatch");
        if (seg.mode_ == PsiMode::Plain) {
            seg.plain_ = PackedIntVector::from_raw(in.words(seg.n_ * width), width, seg.n_);
            return seg;
        }
        const uint64_t sc = seg.sample_count();
        seg.samples_ = PackedIntVector::from_raw(in.words(sc * width), width, sc);
        const uint32_t table_size = in.u32();
        std::vector<detail::HuffmanCode::Entry> entries(table_size);
        for (auto& e : entries) {
            e.symbol = in.u64();
            e.length = in.u8();
        }
        if (table_size > 0) seg.code_.set_entries(std::move(entries));
        seg.stream_bits_ = in.u64();
        seg.stream_ = in.words(seg.stream_bits_);
        seg.rebuild_pointers();
        return seg;
    }

private:
    struct Cursor {
        uint64_t pos = 0;    // last decoded position
        uint64_t value = 0;  // value at pos
        uint64_t run_left = 0;
        BitReader reader{{}, 0};

        void advance(const PsiSegment& seg) {
            ++pos;
            if ((pos - 1) % seg.t_psi_ == 0) {
                const uint64_t block = (pos - 1) / seg.t_psi_;
                value = seg.samples_.get(block) + 1;
                run_left = 0;
                reader.seek(seg.pointers_[block]);
                return;
            }
            if (run_left > 0) {
                --run_left;
                ++value;
                return;
            }
            const uint64_t tok = seg.read_token(reader);
            if (detail::token_is_run(tok)) {
                run_left = detail::token_run_len(tok) - 1;
                ++value;
            } else {
                value = static_cast<uint64_t>(static_cast<int64_t>(value) + detail::token_gap(tok));
            }
        }
    };

    uint64_t sample_count() const { return (n_ - 1) / t_psi_ + 1; }

    uint64_t block_entries(uint64_t block) const {
        const uint64_t start = 1 + block * t_psi_;
        return std::min<uint64_t>(t_psi_ - 1, n_ - start);
    }

    unsigned escape_width() const { return bits_for(4 * n_ + 1); }

    Cursor cursor_at_block(uint64_t block) const {
        Cursor c;
        c.pos = 1 + block * t_psi_;
        c.value = samples_.get(block) + 1;
        c.reader = BitReader(stream_, stream_bits_);
        c.reader.seek(pointers_[block]);
        return c;
    }

    uint64_t read_token(BitReader& in) const {
        const uint64_t sym = code_.decode(in);
        if (sym == detail::kEscapeSym) return in.get(escape_width());
        return sym;
    }

    void build_compressed(std::span<const uint64_t> values) {
        // tokenize blockwise, then fit the code, then emit
        std::vector<std::vector<uint64_t>> block_tokens(sample_count());
        std::map<uint64_t, uint64_t> freq;
        std::vector<uint64_t> sample_vals(sample_count());
        for (uint64_t b = 0; b < sample_count(); ++b) {
            const uint64_t start = 1 + b * t_psi_;
            sample_vals[b] = values[start - 1] - 1;
            uint64_t prev = values[start - 1];
            const uint64_t entries = block_entries(b);
            auto& toks = block_tokens[b];
            for (uint64_t e = 0; e < entries;) {
                uint64_t run = 0;
                while (e + run < entries && values[start + e + run] == prev + run + 1) ++run;
                if (run >= 2) {
                    toks.push_back(detail::run_token(run));
                    prev += run;
                    e += run;
                } else {
                    const int64_t gap = static_cast<int64_t>(values[start + e]) - static_cast<int64_t>(prev);
                    toks.push_back(detail::gap_token(gap));
                    prev = values[start + e];
                    ++e;
                }
            }
            for (uint64_t t : toks) ++freq[t];
        }
        samples_ = PackedIntVector(sample_vals, bits_for(n_));
        // escape accounting happens inside build() when the alphabet overflows
        code_.build(freq);
        BitWriter w;
        pointers_.resize(sample_count());
        const unsigned esc_w = escape_width();
        uint64_t esc_code = 0;
        uint8_t esc_len = 0;
        const bool has_escape = code_.lookup(detail::kEscapeSym, esc_code, esc_len);
        token_count_ = 0;
        for (uint64_t b = 0; b < sample_count(); ++b) {
            pointers_[b] = w.bit_count();
            for (uint64_t tok : block_tokens[b]) {
                uint64_t c;
                uint8_t len;
                if (code_.lookup(tok, c, len)) {
                    put_code(w, c, len);
                } else {
                    if (!has_escape) throw std::logic_error("token missing from code with no escape");
                    put_code(w, esc_code, esc_len);
                    w.put(tok, esc_w);
                }
                ++token_count_;
            }
        }
        stream_bits_ = w.bit_count();
        stream_ = w.take_words();
    }

    // canonical codes are defined MSB-first
    static void put_code(BitWriter& w, uint64_t code, uint8_t len) {
        for (int b = len - 1; b >= 0; --b) w.put((code >> b) & 1, 1);
    }

    void rebuild_pointers() {
        pointers_.assign(sample_count(), 0);
        token_count_ = 0;
        BitReader in(stream_, stream_bits_);
        for (uint64_t b = 0; b < sample_count(); ++b) {
            pointers_[b] = in.position();
            uint64_t remaining = block_entries(b);
            while (remaining > 0) {
                const uint64_t tok = read_token(in);
                ++token_count_;
                remaining -= detail::token_is_run(tok) ? detail::token_run_len(tok) : 1;
            }
        }
        if (in.position() != stream_bits_) throw std::runtime_error("psi section: stream length mismatch");
    }

    PsiMode mode_ = PsiMode::Compressed;
    uint64_t n_ = 0;
    uint32_t t_psi_ = 0;
    PackedIntVector plain_;
    PackedIntVector samples_;
    detail::HuffmanCode code_;
    std::vector<uint64_t> stream_;
    uint64_t stream_bits_ = 0;
    std::vector<uint64_t> pointers_;  // bit offset of each block, rebuilt on load
    uint64_t token_count_ = 0;
};

}  // namespace rdfcsa
