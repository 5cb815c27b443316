#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdfcsa/types.hpp"

namespace rdfcsa::testkit {

// splitmix64; bounded draws use the multiply-shift trick so corpora stay
// identical across standard libraries.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [1, n]
    uint64_t uniform(uint64_t n) {
        return static_cast<uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64) + 1;
    }

    double unit() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }
};

// Ground truth store: the deduplicated ingestion input and nothing else.
// Matching logic is written directly from the pattern definition and shares
// no code with the index modules.
struct OracleStore {
    std::vector<Triple> triples;  // SPO-sorted, unique
    uint64_t n_s = 0, n_p = 0, n_o = 0;
    uint64_t so_count = ~uint64_t{0};

    static OracleStore from(std::vector<Triple> ts, uint64_t n_s, uint64_t n_p, uint64_t n_o,
                            uint64_t so_count = ~uint64_t{0}) {
        OracleStore st;
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        st.triples = std::move(ts);
        st.n_s = n_s;
        st.n_p = n_p;
        st.n_o = n_o;
        st.so_count = so_count;
        return st;
    }
};

inline std::vector<Triple> oracle_match(const OracleStore& store, const TriplePattern& tp) {
    std::vector<Triple> out;
    for (const Triple& t : store.triples) {
        const bool s_ok = tp.s == 0 || tp.s == t.s;
        const bool p_ok = tp.p == 0 || tp.p == t.p;
        const bool o_ok = tp.o == 0 || tp.o == t.o;
        if (s_ok && p_ok && o_ok) out.push_back(t);
    }
    return out;  // store order is already SPO
}

inline std::vector<JoinBinding> oracle_join(const OracleStore& store, const JoinQuery& jq) {
    const std::vector<Triple> left = oracle_match(store, jq.left);
    const std::vector<Triple> right = oracle_match(store, jq.right);
    auto slot_value = [](const Triple& t, Region r) { return r == Region::S ? t.s : r == Region::P ? t.p : t.o; };
    const Region ls = join_slot_left(jq.kind), rs = join_slot_right(jq.kind);
    std::vector<JoinBinding> out;
    for (const Triple& lt : left) {
        for (const Triple& rt : right) {
            if (slot_value(lt, ls) == slot_value(rt, rs)) out.push_back({slot_value(lt, ls), lt, rt});
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct DatasetSpec {
    uint64_t n = 100;
    uint64_t n_s = 10, n_p = 4, n_o = 10;
    double skew = 0.0;  // 0 = uniform predicates; approaching 1 concentrates on the first
    uint64_t seed = 1;
};

// Id triples with the requested predicate skew; distinct by construction.
// When both subject and object alphabets have room, id 1 is forced to occur
// in both roles so the shared-id machinery is always exercised.
inline std::vector<Triple> gen_id_triples(const DatasetSpec& spec) {
    if (spec.n_s < 1 || spec.n_p < 1 || spec.n_o < 1 || spec.n < 1) {
        throw std::invalid_argument("dataset spec: sizes must be at least 1");
    }
    const unsigned __int128 space =
        static_cast<unsigned __int128>(spec.n_s) * spec.n_p * spec.n_o;
    if (static_cast<unsigned __int128>(spec.n) > space) {
        throw std::invalid_argument("dataset spec: more triples than distinct combinations");
    }
    Rng rng(spec.seed);
    // truncated geometric over predicate ids
    std::vector<double> cdf(spec.n_p);
    double acc = 0.0, w = 1.0;
    for (uint64_t k = 0; k < spec.n_p; ++k) {
        acc += w;
        cdf[k] = acc;
        w *= (1.0 - spec.skew);
    }
    auto draw_pred = [&]() -> uint64_t {
        const double x = rng.unit() * acc;
        return static_cast<uint64_t>(std::lower_bound(cdf.begin(), cdf.end(), x) - cdf.begin()) + 1;
    };
    std::set<Triple> seen;
    uint64_t attempts = 0;
    const uint64_t max_attempts = 50 * spec.n + 1000000;
    while (seen.size() < spec.n) {
        if (++attempts > max_attempts) {
            throw std::invalid_argument("dataset spec: saturated, cannot reach requested size");
        }
        Triple t{rng.uniform(spec.n_s), draw_pred(), rng.uniform(spec.n_o)};
        seen.insert(t);
    }
    std::vector<Triple> out(seen.begin(), seen.end());
    if (spec.n_s >= 2 && spec.n_o >= 2) {
        out.front().s = 1;
        out.back().o = 1;
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return out;
}

// Deterministic term spelling: ids low enough to be shared between the
// subject and object pools become so-terms, the rest stay role-local.
struct TermScheme {
    uint64_t overlap;

    explicit TermScheme(const DatasetSpec& spec)
        : overlap(spec.n_s >= 2 && spec.n_o >= 2 ? std::max<uint64_t>(1, std::min(spec.n_s, spec.n_o) / 4)
                                                 : 0) {}

    std::string subject(uint64_t id) const {
        return id <= overlap ? "so" + std::to_string(id) : "s" + std::to_string(id);
    }
    std::string object(uint64_t id) const {
        return id <= overlap ? "so" + std::to_string(id) : "o" + std::to_string(id);
    }
    std::string predicate(uint64_t id) const { return "p" + std::to_string(id); }
};

struct RawDataset {
    std::vector<std::array<std::string, 3>> lines;
};

inline RawDataset gen_dataset(const DatasetSpec& spec) {
    const std::vector<Triple> ids = gen_id_triples(spec);
    const TermScheme scheme(spec);
    RawDataset out;
    out.lines.reserve(ids.size());
    for (const Triple& t : ids) {
        out.lines.push_back({scheme.subject(t.s), scheme.predicate(t.p), scheme.object(t.o)});
    }
    return out;
}

// Seed manifest for the equivalence suites: 100 datasets across degenerate
// and realistic regimes, fixed seeds.
inline std::vector<DatasetSpec> corpus_specs() {
    std::vector<DatasetSpec> specs;
    uint64_t seed = 0x5EED0000;
    auto push = [&](uint64_t count, uint64_t n, uint64_t n_s, uint64_t n_p, uint64_t n_o, double skew) {
        for (uint64_t i = 0; i < count; ++i) specs.push_back({n, n_s, n_p, n_o, skew, seed++});
    };
    push(8, 1, 1, 1, 1, 0.0);
    push(8, 2, 2, 2, 2, 0.0);
    push(10, 10, 4, 3, 4, 0.0);
    push(10, 10, 6, 2, 6, 0.7);
    push(16, 100, 20, 8, 20, 0.5);
    push(16, 100, 12, 4, 30, 0.8);
    push(12, 1000, 120, 12, 150, 0.6);
    push(10, 1000, 60, 6, 60, 0.9);
    push(6, 10000, 900, 16, 900, 0.7);
    push(4, 10000, 400, 24, 1200, 0.9);
    return specs;  // 100 total
}

// 200 smaller datasets for the join suites; nested-loop ground truth keeps
// their sizes modest.
inline std::vector<DatasetSpec> join_corpus_specs() {
    std::vector<DatasetSpec> specs;
    uint64_t seed = 0x1055EED;
    auto push = [&](uint64_t count, uint64_t n, uint64_t n_s, uint64_t n_p, uint64_t n_o, double skew) {
        for (uint64_t i = 0; i < count; ++i) specs.push_back({n, n_s, n_p, n_o, skew, seed++});
    };
    push(20, 1, 1, 1, 1, 0.0);
    push(20, 2, 2, 2, 2, 0.0);
    push(40, 10, 4, 3, 4, 0.3);
    push(40, 50, 8, 4, 8, 0.6);
    push(40, 100, 10, 5, 12, 0.7);
    push(20, 300, 25, 6, 25, 0.8);
    push(20, 1000, 40, 8, 50, 0.8);
    return specs;  // 200 total
}

// Comparison sort over circular readings of the text; reference for the
// production suffix sorter at small sizes.
inline std::vector<uint32_t> reference_suffix_array(const std::vector<uint32_t>& text) {
    const size_t n = text.size();
    std::vector<uint32_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = static_cast<uint32_t>(i);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        for (size_t k = 0; k < n; ++k) {
            const uint32_t ca = text[(a + k) % n], cb = text[(b + k) % n];
            if (ca != cb) return ca < cb;
        }
        return a < b;
    });
    return order;
}

}  // namespace rdfcsa::testkit
