#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace rdfcsa {

// Suffix array by prefix doubling with radix passes; O(n log n), stable for
// integer alphabets of any size. Returns 0-based start positions.
inline std::vector<uint32_t> suffix_array(const std::vector<uint32_t>& text) {
    const size_t n = text.size();
    std::vector<uint32_t> sa(n), rank(n), tmp(n), cnt;
    if (n == 0) return sa;

    // initial order by first symbol
    const uint32_t sigma = n ? *std::max_element(text.begin(), text.end()) + 1 : 1;
    cnt.assign(std::max<size_t>(sigma, n + 1), 0);
    for (uint32_t c : text) ++cnt[c];
    for (size_t i = 1; i < cnt.size(); ++i) cnt[i] += cnt[i - 1];
    for (size_t i = n; i-- > 0;) sa[--cnt[text[i]]] = static_cast<uint32_t>(i);
    rank[sa[0]] = 0;
    for (size_t i = 1; i < n; ++i) {
        rank[sa[i]] = rank[sa[i - 1]] + (text[sa[i]] != text[sa[i - 1]] ? 1 : 0);
    }

    for (size_t k = 1; k < n && rank[sa[n - 1]] != n - 1; k <<= 1) {
        // sort by second key: suffixes with no second half come first,
        // the rest follow the current order shifted by k
        size_t fill = 0;
        for (size_t i = n - k; i < n; ++i) tmp[fill++] = static_cast<uint32_t>(i);
        for (size_t i = 0; i < n; ++i) {
            if (sa[i] >= k) tmp[fill++] = sa[i] - static_cast<uint32_t>(k);
        }
        // stable radix pass on the first key
        cnt.assign(rank[sa[n - 1]] + 2, 0);
        for (size_t i = 0; i < n; ++i) ++cnt[rank[i] + 1];
        for (size_t i = 1; i < cnt.size(); ++i) cnt[i] += cnt[i - 1];
        for (size_t i = 0; i < n; ++i) sa[cnt[rank[tmp[i]]]++] = tmp[i];
        // refresh ranks; a missing second half sorts before any present one
        std::vector<uint32_t>& nrank = tmp;
        auto second_key = [&](uint32_t i) -> uint32_t { return i + k < n ? rank[i + k] + 1 : 0; };
        nrank[sa[0]] = 0;
        for (size_t i = 1; i < n; ++i) {
            const uint32_t a = sa[i - 1], b = sa[i];
            const bool same = rank[a] == rank[b] && second_key(a) == second_key(b);
            nrank[b] = nrank[a] + (same ? 0 : 1);
        }
        rank.swap(nrank);
    }
    return sa;
}

}  // namespace rdfcsa
