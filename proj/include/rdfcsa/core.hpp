#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdfcsa/bitvector.hpp"
#include "rdfcsa/psi.hpp"
#include "rdfcsa/suffix_array.hpp"
#include "rdfcsa/types.hpp"

namespace rdfcsa {

constexpr uint64_t kNoSoCount = ~uint64_t{0};

// Deduplicated id triples plus their declared alphabet sizes. Ids may be
// sparse inside the declared ranges: an alphabet size comes from the
// dictionary, not from the observed maximum.
class TripleSet {
public:
    TripleSet(std::vector<Triple> triples, uint64_t n_s, uint64_t n_p, uint64_t n_o,
              uint64_t so_count = kNoSoCount)
        : n_s_(n_s), n_p_(n_p), n_o_(n_o), so_count_(so_count) {
        if (triples.empty()) throw std::invalid_argument("triple set: empty input");
        for (const Triple& t : triples) {
            if (t.s < 1 || t.s > n_s_ || t.p < 1 || t.p > n_p_ || t.o < 1 || t.o > n_o_) {
                throw std::invalid_argument("triple set: component out of declared range");
            }
        }
        std::sort(triples.begin(), triples.end());
        const auto last = std::unique(triples.begin(), triples.end());
        duplicates_removed_ = static_cast<uint64_t>(triples.end() - last);
        triples.erase(last, triples.end());
        triples_ = std::move(triples);
    }

    const std::vector<Triple>& triples() const { return triples_; }
    uint64_t size() const { return triples_.size(); }
    uint64_t n_s() const { return n_s_; }
    uint64_t n_p() const { return n_p_; }
    uint64_t n_o() const { return n_o_; }
    uint64_t so_count() const { return so_count_; }
    uint64_t duplicates_removed() const { return duplicates_removed_; }

private:
    std::vector<Triple> triples_;
    uint64_t n_s_, n_p_, n_o_;
    uint64_t so_count_;
    uint64_t duplicates_removed_ = 0;
};

enum class BuildMode : uint8_t { Compressed = 0, Hybrid = 1 };

struct BuildOptions {
    BuildMode mode = BuildMode::Compressed;
    uint32_t t_psi = 32;
    // keep a segment plain unless compression reaches this fraction of the
    // plain size (generalization of the hybrid layout; off by default)
    bool adaptive = false;
    double adaptive_threshold = 0.85;
};

struct Interval {
    uint64_t l = 1;
    uint64_t r = 0;  // default-constructed interval is empty

    bool empty() const { return l > r; }
    uint64_t count() const { return empty() ? 0 : r - l + 1; }
    bool operator==(const Interval&) const = default;
};

// Self-index over a triple set. The sorted triples are viewed as a text of
// 3n symbols over three disjoint alphabets (subjects, then predicates
// shifted by n_s, then objects shifted by n_s+n_p). A suffix array over
// that text splits into three length-n regions; the per-region change
// bitmaps (D) and the cycled permutation (Psi, each region rebased to
// [1,n]) replace the text and the suffix array completely:
//
//   psi_s: subject-region position  -> predicate-region position
//   psi_p: predicate-region position -> object-region position
//   psi_o: object-region position   -> subject-region position of the
//          same triple, so psi_o(psi_p(psi_s(i))) == i.
//
// Occupancy bitmaps over each declared alphabet translate between ids and
// the dense symbol ranks that rank1 on D produces.
class Index {
public:
    static Index build(const TripleSet& ts, const BuildOptions& opts = {}) {
        Index idx;
        idx.n_ = ts.size();
        idx.n_s_ = ts.n_s();
        idx.n_p_ = ts.n_p();
        idx.n_o_ = ts.n_o();
        idx.so_count_ = ts.so_count();
        idx.mode_ = opts.mode;
        idx.t_psi_ = opts.t_psi;
        const uint64_t n = idx.n_;
        const std::vector<Triple>& triples = ts.triples();

        // text with shifted alphabets plus a sentinel above every symbol
        std::vector<uint32_t> text(3 * n + 1);
        const uint64_t gap_p = idx.n_s_, gap_o = idx.n_s_ + idx.n_p_;
        for (uint64_t i = 0; i < n; ++i) {
            text[3 * i] = static_cast<uint32_t>(triples[i].s);
            text[3 * i + 1] = static_cast<uint32_t>(triples[i].p + gap_p);
            text[3 * i + 2] = static_cast<uint32_t>(triples[i].o + gap_o);
        }
        text[3 * n] = static_cast<uint32_t>(gap_o + idx.n_o_ + 1);

        const std::vector<uint32_t> sa_full = suffix_array(text);
        // drop the sentinel suffix; it is the largest, but assert rather
        // than assume
        std::vector<uint64_t> sa;
        sa.reserve(3 * n);
        for (uint32_t p : sa_full) {
            if (p != 3 * n) sa.push_back(p + 1);  // 1-based text positions
        }
        if (sa.size() != 3 * n) throw std::logic_error("suffix sort lost entries");

        std::vector<uint64_t> sa_inv(3 * n + 1);
        for (uint64_t i = 0; i < 3 * n; ++i) sa_inv[sa[i]] = i + 1;

        // global change bitmap and cycled permutation
        std::vector<bool> d_s(n), d_p(n), d_o(n);
        std::vector<uint64_t> psi_s(n), psi_p(n), psi_o(n);
        for (uint64_t i = 1; i <= 3 * n; ++i) {
            const uint64_t pos = sa[i - 1];
            const bool change = i == 1 || text[pos - 1] != text[sa[i - 2] - 1];
            uint64_t psi = pos == 3 * n ? sa_inv[1] : sa_inv[pos + 1];
            if (i <= n) {
                d_s[i - 1] = change;
                if (psi < n + 1 || psi > 2 * n) throw std::logic_error("psi_s out of predicate region");
                psi_s[i - 1] = psi - n;
            } else if (i <= 2 * n) {
                d_p[i - n - 1] = change;
                if (psi < 2 * n + 1 || psi > 3 * n) throw std::logic_error("psi_p out of object region");
                psi_p[i - n - 1] = psi - 2 * n;
            } else {
                // cycle back to the same triple's subject
                psi = psi == 1 ? n : psi - 1;
                if (psi < 1 || psi > n) throw std::logic_error("psi_o out of subject region");
                d_o[i - 2 * n - 1] = change;
                psi_o[i - 2 * n - 1] = psi;
            }
        }

        idx.d_s_ = BitVector(d_s, true);
        idx.d_o_ = BitVector(d_o, true);
        idx.d_p_rank_ = BitVector(d_p, false);
        idx.d_p_select_.clear();
        for (uint64_t i = 0; i < n; ++i) {
            if (d_p[i]) idx.d_p_select_.push_back(i + 1);
        }

        idx.occ_s_ = occupancy(triples, Region::S, idx.n_s_);
        idx.occ_p_ = occupancy(triples, Region::P, idx.n_p_);
        idx.occ_o_ = occupancy(triples, Region::O, idx.n_o_);

        idx.psi_s_ = encode_segment(psi_s, Region::S, opts);
        idx.psi_p_ = encode_segment(psi_p, Region::P, opts);
        idx.psi_o_ = encode_segment(psi_o, Region::O, opts);
        return idx;
    }

    uint64_t size() const { return n_; }
    uint64_t n_s() const { return n_s_; }
    uint64_t n_p() const { return n_p_; }
    uint64_t n_o() const { return n_o_; }
    uint64_t so_count() const { return so_count_; }
    BuildMode mode() const { return mode_; }
    uint32_t t_psi() const { return t_psi_; }

    uint64_t alphabet_size(Region r) const {
        switch (r) {
            case Region::S: return n_s_;
            case Region::P: return n_p_;
            case Region::O: return n_o_;
        }
        return 0;
    }

    const PsiSegment& psi(Region r) const {
        switch (r) {
            case Region::P: return psi_p_;
            case Region::O: return psi_o_;
            default: return psi_s_;
        }
    }

    const BitVector& occupancy_bits(Region r) const {
        switch (r) {
            case Region::P: return occ_p_;
            case Region::O: return occ_o_;
            default: return occ_s_;
        }
    }

    const BitVector& d_s() const { return d_s_; }
    const BitVector& d_o() const { return d_o_; }
    const BitVector& d_p_rank() const { return d_p_rank_; }
    const std::vector<uint64_t>& d_p_select() const { return d_p_select_; }

    // Dense symbol rank at a region position (1-based within the region).
    uint64_t symbol_rank(Region r, uint64_t pos) const {
        switch (r) {
            case Region::S: return d_s_.rank1(pos);
            case Region::P: return d_p_rank_.rank1(pos);
            case Region::O: return d_o_.rank1(pos);
        }
        return 0;
    }

    // Component id at a region position.
    uint64_t id_at(Region r, uint64_t pos) const {
        return occupancy_bits(r).select1(symbol_rank(r, pos));
    }

    // Region interval of all positions whose leading symbol is id; empty if
    // the id does not occur in that role.
    Interval symbol_range(Region r, uint64_t id) const {
        const BitVector& occ = occupancy_bits(r);
        if (id < 1 || id > occ.size() || !occ.get(id)) return {};
        const uint64_t c = occ.rank1(id);
        if (r == Region::P) {
            const uint64_t l = d_p_select_[c - 1];
            const uint64_t rr = c < d_p_select_.size() ? d_p_select_[c] - 1 : n_;
            return {l, rr};
        }
        const BitVector& d = r == Region::S ? d_s_ : d_o_;
        const uint64_t l = d.select1(c);
        const auto nxt = d.selectnext1(l);
        return {l, nxt ? *nxt - 1 : n_};
    }

    // The i-th triple of the sorted set, recovered from the index alone.
    Triple extract_triple(uint64_t i) const {
        if (i < 1 || i > n_) throw std::out_of_range("extract_triple: position out of range");
        const uint64_t s = id_at(Region::S, i);
        const uint64_t j = psi_s_.access(i);
        const uint64_t p = id_at(Region::P, j);
        const uint64_t k = psi_p_.access(j);
        const uint64_t o = id_at(Region::O, k);
        return {s, p, o};
    }

    std::vector<Triple> extract_all() const {
        std::vector<Triple> out;
        out.reserve(n_);
        const std::vector<uint64_t> ps = psi_s_.decode_range(1, n_);
        const std::vector<uint64_t> pp = psi_p_.decode_range(1, n_);
        for (uint64_t i = 1; i <= n_; ++i) {
            const uint64_t j = ps[i - 1];
            const uint64_t k = pp[j - 1];
            out.push_back({id_at(Region::S, i), id_at(Region::P, j), id_at(Region::O, k)});
        }
        return out;
    }

    // Restore an index from deserialized parts (see serialize.hpp).
    struct Parts {
        uint64_t n, n_s, n_p, n_o, so_count;
        BuildMode mode;
        uint32_t t_psi;
        BitVector d_s, d_p_rank, d_o, occ_s, occ_p, occ_o;
        std::vector<uint64_t> d_p_select;
        PsiSegment psi_s, psi_p, psi_o;
    };

    static Index from_parts(Parts parts) {
        Index idx;
        idx.n_ = parts.n;
        idx.n_s_ = parts.n_s;
        idx.n_p_ = parts.n_p;
        idx.n_o_ = parts.n_o;
        idx.so_count_ = parts.so_count;
        idx.mode_ = parts.mode;
        idx.t_psi_ = parts.t_psi;
        idx.d_s_ = std::move(parts.d_s);
        idx.d_p_rank_ = std::move(parts.d_p_rank);
        idx.d_o_ = std::move(parts.d_o);
        idx.occ_s_ = std::move(parts.occ_s);
        idx.occ_p_ = std::move(parts.occ_p);
        idx.occ_o_ = std::move(parts.occ_o);
        idx.d_p_select_ = std::move(parts.d_p_select);
        idx.psi_s_ = std::move(parts.psi_s);
        idx.psi_p_ = std::move(parts.psi_p);
        idx.psi_o_ = std::move(parts.psi_o);
        return idx;
    }

private:
    static BitVector occupancy(const std::vector<Triple>& triples, Region r, uint64_t alphabet) {
        std::vector<bool> bits(alphabet, false);
        for (const Triple& t : triples) {
            const uint64_t id = r == Region::S ? t.s : r == Region::P ? t.p : t.o;
            bits[id - 1] = true;
        }
        return BitVector(bits, true);
    }

    static PsiSegment encode_segment(const std::vector<uint64_t>& values, Region r, const BuildOptions& opts) {
        const bool plain_by_mode = opts.mode == BuildMode::Hybrid && r != Region::P;
        if (plain_by_mode && !opts.adaptive) return PsiSegment::build(values, PsiMode::Plain, opts.t_psi);
        PsiSegment compressed = PsiSegment::build(values, PsiMode::Compressed, opts.t_psi);
        if (opts.adaptive) {
            PsiSegment plain = PsiSegment::build(values, PsiMode::Plain, opts.t_psi);
            const double ratio = plain.payload_bits() == 0
                                     ? 1.0
                                     : static_cast<double>(compressed.payload_bits()) /
                                           static_cast<double>(plain.payload_bits());
            if (ratio > opts.adaptive_threshold) return plain;
        }
        return compressed;
    }

    uint64_t n_ = 0;
    uint64_t n_s_ = 0, n_p_ = 0, n_o_ = 0;
    uint64_t so_count_ = kNoSoCount;
    BuildMode mode_ = BuildMode::Compressed;
    uint32_t t_psi_ = 32;

    BitVector d_s_, d_o_;
    BitVector d_p_rank_;
    std::vector<uint64_t> d_p_select_;
    BitVector occ_s_, occ_p_, occ_o_;
    PsiSegment psi_s_, psi_p_, psi_o_;
};

}  // namespace rdfcsa
