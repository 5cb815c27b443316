#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rdfcsa/core.hpp"
#include "rdfcsa/types.hpp"

namespace rdfcsa {

enum class Strategy : uint8_t {
    Auto = 0,
    Base = 1,      // binary search on the circular readings
    Forward = 2,   // D-select + forward range filtering
    Backward = 3,  // D-select + backward subinterval search
};

// Rotation with every bound component in front, per pattern shape.
struct SearchPlan {
    std::vector<std::pair<Region, uint64_t>> alpha;
    Strategy strategy = Strategy::Auto;
};

inline SearchPlan plan(const TriplePattern& tp) {
    SearchPlan sp;
    auto add = [&](Region r) {
        if (tp.bound(r)) sp.alpha.emplace_back(r, tp.get(r));
    };
    if (tp.bound(Region::S)) {
        add(Region::S), add(Region::P), add(Region::O);
        if (!tp.bound(Region::P) && tp.bound(Region::O)) {
            // (s,?p,o) rotates to object-subject
            sp.alpha = {{Region::O, tp.o}, {Region::S, tp.s}};
        }
    } else if (tp.bound(Region::P)) {
        add(Region::P), add(Region::O);
    } else {
        add(Region::O);
    }
    if (tp.bound_count() >= 2) {
        const bool spo_with_free_subject = !tp.bound(Region::S) && tp.bound(Region::P) && tp.bound(Region::O);
        sp.strategy = spo_with_free_subject ? Strategy::Backward : Strategy::Forward;
    }
    return sp;
}

struct ResultInterval {
    Region region = Region::S;
    Interval interval;
};

namespace detail {

// Psi values at ascending positions; decodes the covering span when that is
// cheaper than pointwise sync.
inline std::vector<uint64_t> psi_at_many(const PsiSegment& seg, std::span<const uint64_t> positions) {
    std::vector<uint64_t> out;
    out.reserve(positions.size());
    if (positions.empty()) return out;
    const bool ascending = std::is_sorted(positions.begin(), positions.end());
    const uint64_t span = ascending ? positions.back() - positions.front() + 1 : ~uint64_t{0};
    if (seg.mode() == PsiMode::Compressed && ascending &&
        span <= 2 * positions.size() * seg.t_psi()) {
        const auto vals = seg.decode_range(positions.front(), positions.back());
        for (uint64_t p : positions) out.push_back(vals[p - positions.front()]);
        return out;
    }
    for (uint64_t p : positions) out.push_back(seg.access(p));
    return out;
}

inline std::vector<Interval> bound_ranges(const Index& idx, const SearchPlan& sp) {
    std::vector<Interval> rs;
    rs.reserve(sp.alpha.size());
    for (const auto& [region, id] : sp.alpha) rs.push_back(idx.symbol_range(region, id));
    return rs;
}

}  // namespace detail

// Binary search for the rotated bound components; comparisons read one
// symbol at a time and stop at the first inequality.
inline ResultInterval search_base(const Index& idx, const SearchPlan& sp) {
    if (sp.alpha.empty()) throw std::invalid_argument("search_base: no bound components");
    const Region start = sp.alpha.front().first;
    const uint64_t n = idx.size();
    auto compare = [&](uint64_t i) -> int {
        uint64_t pos = i;
        for (size_t t = 0; t < sp.alpha.size(); ++t) {
            const auto [region, id] = sp.alpha[t];
            const uint64_t c = idx.id_at(region, pos);
            if (c != id) return c < id ? -1 : 1;
            if (t + 1 < sp.alpha.size()) pos = idx.psi(region).access(pos);
        }
        return 0;
    };
    uint64_t lo = 1, hi = n + 1;  // first position comparing >= alpha
    while (lo < hi) {
        const uint64_t mid = lo + (hi - lo) / 2;
        if (compare(mid) < 0) lo = mid + 1;
        else hi = mid;
    }
    const uint64_t first = lo;
    hi = n + 1;  // first position comparing > alpha
    while (lo < hi) {
        const uint64_t mid = lo + (hi - lo) / 2;
        if (compare(mid) <= 0) lo = mid + 1;
        else hi = mid;
    }
    if (first >= lo) return {start, {}};
    return {start, {first, lo - 1}};
}

// Sequentially filters the start interval through the bound intervals that
// follow in rotation order; survivors stay contiguous because Psi is
// increasing on a symbol run, so only the first and last survivor are kept.
inline ResultInterval search_forward(const Index& idx, const SearchPlan& sp) {
    if (sp.alpha.size() < 2) throw std::invalid_argument("search_forward: needs two bound components");
    auto ranges = detail::bound_ranges(idx, sp);
    for (const auto& r : ranges) {
        if (r.empty()) return {sp.alpha.front().first, {}};
    }
    size_t start = 0;
    if (sp.alpha.size() == 3) {
        for (size_t m = 1; m < 3; ++m) {
            if (ranges[m].count() < ranges[start].count()) start = m;
        }
    }
    const auto order = [&](size_t step) { return (start + step) % sp.alpha.size(); };
    const Region start_region = sp.alpha[order(0)].first;

    Interval cur = ranges[order(0)];
    std::vector<uint64_t> images = idx.psi(start_region).decode_range(cur.l, cur.r);
    uint64_t first = 0, last = 0;
    bool any = false;
    const Interval target1 = ranges[order(1)];
    for (uint64_t k = 0; k < images.size(); ++k) {
        if (images[k] >= target1.l && images[k] <= target1.r) {
            if (!any) first = k;
            last = k;
            any = true;
        }
    }
    if (!any) return {start_region, {}};
    cur = {cur.l + first, cur.l + last};
    if (sp.alpha.size() == 3) {
        const Region mid_region = sp.alpha[order(1)].first;
        const Interval target2 = ranges[order(2)];
        const std::span<const uint64_t> survivors(images.data() + first, last - first + 1);
        const std::vector<uint64_t> second = detail::psi_at_many(idx.psi(mid_region), survivors);
        any = false;
        uint64_t f2 = 0, l2 = 0;
        for (uint64_t k = 0; k < second.size(); ++k) {
            if (second[k] >= target2.l && second[k] <= target2.r) {
                if (!any) f2 = k;
                l2 = k;
                any = true;
            }
        }
        if (!any) return {start_region, {}};
        cur = {cur.l + f2, cur.l + l2};
    }
    return {start_region, cur};
}

// Starting from the last bound interval, binary searches each preceding
// interval for the subinterval whose Psi values land in the current one.
inline ResultInterval search_backward(const Index& idx, const SearchPlan& sp) {
    if (sp.alpha.size() < 2) throw std::invalid_argument("search_backward: needs two bound components");
    auto ranges = detail::bound_ranges(idx, sp);
    for (const auto& r : ranges) {
        if (r.empty()) return {sp.alpha.front().first, {}};
    }
    Interval cur = ranges.back();
    for (size_t t = sp.alpha.size() - 1; t-- > 0;) {
        const Region region = sp.alpha[t].first;
        const PsiSegment& seg = idx.psi(region);
        const Interval r = ranges[t];
        uint64_t lo = r.l, hi = r.r + 1;  // first i with psi(i) >= cur.l
        while (lo < hi) {
            const uint64_t mid = lo + (hi - lo) / 2;
            if (seg.access(mid) < cur.l) lo = mid + 1;
            else hi = mid;
        }
        const uint64_t first = lo;
        hi = r.r + 1;  // first i with psi(i) > cur.r
        while (lo < hi) {
            const uint64_t mid = lo + (hi - lo) / 2;
            if (seg.access(mid) <= cur.r) lo = mid + 1;
            else hi = mid;
        }
        if (first >= lo) return {sp.alpha.front().first, {}};
        cur = {first, lo - 1};
    }
    return {sp.alpha.front().first, cur};
}

constexpr unsigned component_bit(Region r) { return 1u << static_cast<unsigned>(r); }
constexpr unsigned kAllComponents = 7;

// Fills the components selected by `mask` for rows over a region interval;
// bound components are copied from the pattern, the rest walk Psi from the
// interval's region. Components outside the mask are left untouched.
inline void materialize_into(const Index& idx, const TriplePattern& tp, const ResultInterval& ri,
                             unsigned mask, std::vector<Triple>& rows) {
    const Interval iv = ri.interval;
    if (iv.empty()) return;
    const Region r0 = ri.region, r1 = next_region(r0), r2 = next_region(r1);
    for (uint64_t k = 0; k < rows.size(); ++k) {
        if (tp.bound(Region::S)) rows[k].s = tp.s;
        if (tp.bound(Region::P)) rows[k].p = tp.p;
        if (tp.bound(Region::O)) rows[k].o = tp.o;
    }
    auto set_comp = [&](Triple& t, Region r, uint64_t v) {
        switch (r) {
            case Region::S: t.s = v; break;
            case Region::P: t.p = v; break;
            case Region::O: t.o = v; break;
        }
    };
    const bool need0 = !tp.bound(r0) && (mask & component_bit(r0));
    const bool need1 = !tp.bound(r1) && (mask & component_bit(r1));
    const bool need2 = !tp.bound(r2) && (mask & component_bit(r2));
    if (need0) {
        for (uint64_t k = 0; k < rows.size(); ++k) set_comp(rows[k], r0, idx.id_at(r0, iv.l + k));
    }
    if (!need1 && !need2) return;
    const std::vector<uint64_t> step1 = idx.psi(r0).decode_range(iv.l, iv.r);
    if (need1) {
        for (uint64_t k = 0; k < rows.size(); ++k) set_comp(rows[k], r1, idx.id_at(r1, step1[k]));
    }
    if (need2) {
        const std::vector<uint64_t> step2 = detail::psi_at_many(idx.psi(r1), step1);
        for (uint64_t k = 0; k < rows.size(); ++k) set_comp(rows[k], r2, idx.id_at(r2, step2[k]));
    }
}

struct QueryResult {
    ResultInterval at;
    std::vector<Triple> rows;  // ascending region position; unfilled ids are 0

    uint64_t count() const { return at.interval.count(); }
};

struct ResolveOptions {
    Strategy strategy = Strategy::Auto;
    unsigned fill_mask = kAllComponents;  // needed-only resolves pass a subset
};

inline ResultInterval locate(const Index& idx, const TriplePattern& tp, Strategy strategy) {
    SearchPlan sp = plan(tp);
    const int bound = tp.bound_count();
    if (strategy != Strategy::Auto) {
        if (bound < 2) throw std::invalid_argument("strategy override requires two bound components");
        sp.strategy = strategy;
    }
    if (bound == 0) return {Region::S, {1, idx.size()}};
    if (bound == 1) return {sp.alpha[0].first, idx.symbol_range(sp.alpha[0].first, sp.alpha[0].second)};
    switch (sp.strategy) {
        case Strategy::Base: return search_base(idx, sp);
        case Strategy::Forward: return search_forward(idx, sp);
        case Strategy::Backward: return search_backward(idx, sp);
        default: return search_base(idx, sp);
    }
}

inline QueryResult resolve(const Index& idx, const TriplePattern& tp, const ResolveOptions& opts = {}) {
    QueryResult qr;
    if (tp.bound_count() == 0 && opts.fill_mask == kAllComponents && opts.strategy == Strategy::Auto) {
        qr.at = {Region::S, {1, idx.size()}};
        qr.rows = idx.extract_all();
        return qr;
    }
    qr.at = locate(idx, tp, opts.strategy);
    qr.rows.assign(qr.at.interval.count(), Triple{});
    materialize_into(idx, tp, qr.at, opts.fill_mask, qr.rows);
    return qr;
}

// Completes components that an earlier needed-only resolve left unfilled.
inline void fill_remaining(const Index& idx, const TriplePattern& tp, QueryResult& qr, unsigned mask) {
    materialize_into(idx, tp, qr.at, mask, qr.rows);
}

// True when rows come out ordered by the given component: every region
// crossed between the interval's region and the component's region must be
// bound for the Psi walk to stay inside single symbol runs.
inline bool naturally_sorted_by(const TriplePattern& tp, Region interval_region, Region component) {
    Region r = interval_region;
    while (r != component) {
        if (r != interval_region && !tp.bound(r)) return false;
        r = next_region(r);
    }
    return true;
}

}  // namespace rdfcsa
