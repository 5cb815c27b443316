#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdfcsa/query.hpp"

namespace rdfcsa {

enum class JoinStrategy : uint8_t { Auto = 0, Merge = 1, LeftChain = 2, RightChain = 3 };

inline const char* join_strategy_name(JoinStrategy s) {
    switch (s) {
        case JoinStrategy::Auto: return "auto";
        case JoinStrategy::Merge: return "merge";
        case JoinStrategy::LeftChain: return "left";
        case JoinStrategy::RightChain: return "right";
    }
    return "?";
}

struct JoinOptions {
    JoinStrategy strategy = JoinStrategy::Auto;
    bool so_filter = true;
    bool dedup = true;
    bool deferred_fill = true;
};

struct JoinPlan {
    JoinStrategy strategy = JoinStrategy::Merge;
    unsigned left_fill_mask = kAllComponents;   // components needed before the join
    unsigned right_fill_mask = kAllComponents;  // the rest are refilled afterwards
};

namespace detail {

inline void check_join_query(const JoinQuery& jq) {
    if (jq.left.bound(join_slot_left(jq.kind)) || jq.right.bound(join_slot_right(jq.kind))) {
        throw std::invalid_argument("join: the join slots must be unbound in both patterns");
    }
}

inline bool fully_unbound(const TriplePattern& tp) { return tp.bound_count() == 0; }

inline uint64_t get_comp(const Triple& t, Region r) {
    return r == Region::S ? t.s : r == Region::P ? t.p : t.o;
}

}  // namespace detail

// A strategy is usable unless its first step would evaluate a pattern with
// every component unbound, which would stream the whole store.
inline bool join_planable(const JoinQuery& jq, JoinStrategy s) {
    switch (s) {
        case JoinStrategy::Merge:
            return !detail::fully_unbound(jq.left) && !detail::fully_unbound(jq.right);
        case JoinStrategy::LeftChain: return !detail::fully_unbound(jq.left);
        case JoinStrategy::RightChain: return !detail::fully_unbound(jq.right);
        default: return false;
    }
}

// Chain from the side with more bound components; on ties object-object
// joins between two fully bound patterns merge their sorted object lists,
// anything else chains from the left.
inline JoinPlan plan_join(const JoinQuery& jq) {
    detail::check_join_query(jq);
    JoinPlan jp;
    const int lb = jq.left.bound_count();
    const int rb = jq.right.bound_count();
    std::vector<JoinStrategy> preference;
    if (lb > rb) {
        preference = {JoinStrategy::LeftChain, JoinStrategy::RightChain, JoinStrategy::Merge};
    } else if (rb > lb) {
        preference = {JoinStrategy::RightChain, JoinStrategy::LeftChain, JoinStrategy::Merge};
    } else if (jq.kind == JoinKind::OO && lb == 2 && rb == 2) {
        preference = {JoinStrategy::Merge, JoinStrategy::LeftChain, JoinStrategy::RightChain};
    } else {
        preference = {JoinStrategy::LeftChain, JoinStrategy::RightChain, JoinStrategy::Merge};
    }
    for (JoinStrategy s : preference) {
        if (join_planable(jq, s)) {
            jp.strategy = s;
            break;
        }
    }
    jp.left_fill_mask = component_bit(join_slot_left(jq.kind));
    jp.right_fill_mask = component_bit(join_slot_right(jq.kind));
    return jp;
}

namespace detail {

struct Side {
    QueryResult result;
    std::vector<uint32_t> order;  // row indices ordered by join value
};

inline Side eval_side(const Index& idx, const TriplePattern& tp, Region slot, bool deferred) {
    Side side;
    ResolveOptions opts;
    opts.fill_mask = deferred ? component_bit(slot) : kAllComponents;
    side.result = resolve(idx, tp, opts);
    side.order.resize(side.result.rows.size());
    for (uint32_t i = 0; i < side.order.size(); ++i) side.order[i] = i;
    if (!naturally_sorted_by(tp, side.result.at.region, slot)) {
        std::stable_sort(side.order.begin(), side.order.end(), [&](uint32_t a, uint32_t b) {
            return get_comp(side.result.rows[a], slot) < get_comp(side.result.rows[b], slot);
        });
    }
    return side;
}

inline void finish(std::vector<JoinBinding>& out) {
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

}  // namespace detail

// Solves both patterns with the join variable unbound and intersects the
// two result lists on it; a list that does not come out ordered by the
// join component is sorted first.
inline std::vector<JoinBinding> join_merge(const Index& idx, const JoinQuery& jq,
                                           const JoinOptions& opts = {}) {
    detail::check_join_query(jq);
    if (!join_planable(jq, JoinStrategy::Merge)) {
        throw std::invalid_argument("join merge: a side would evaluate a fully unbound pattern");
    }
    const Region ls = join_slot_left(jq.kind), rs = join_slot_right(jq.kind);
    detail::Side left = detail::eval_side(idx, jq.left, ls, opts.deferred_fill);
    detail::Side right = detail::eval_side(idx, jq.right, rs, opts.deferred_fill);

    std::vector<std::pair<uint32_t, uint32_t>> matches;
    size_t i = 0, j = 0;
    while (i < left.order.size() && j < right.order.size()) {
        const uint64_t lv = detail::get_comp(left.result.rows[left.order[i]], ls);
        const uint64_t rv = detail::get_comp(right.result.rows[right.order[j]], rs);
        if (lv < rv) ++i;
        else if (rv < lv) ++j;
        else {
            size_t ie = i, je = j;
            while (ie < left.order.size() &&
                   detail::get_comp(left.result.rows[left.order[ie]], ls) == lv) ++ie;
            while (je < right.order.size() &&
                   detail::get_comp(right.result.rows[right.order[je]], rs) == lv) ++je;
            for (size_t a = i; a < ie; ++a) {
                for (size_t b = j; b < je; ++b) matches.emplace_back(left.order[a], right.order[b]);
            }
            i = ie;
            j = je;
        }
    }
    if (opts.deferred_fill) {
        fill_remaining(idx, jq.left, left.result, kAllComponents);
        fill_remaining(idx, jq.right, right.result, kAllComponents);
    }
    std::vector<JoinBinding> out;
    out.reserve(matches.size());
    for (const auto& [a, b] : matches) {
        out.push_back({detail::get_comp(left.result.rows[a], ls), left.result.rows[a], right.result.rows[b]});
    }
    detail::finish(out);
    return out;
}

// Solves one pattern first, then re-runs the other once per join value
// found. Repeated values are probed once, and subject-object joins skip
// values above the shared subject-object id range before probing; the
// components not involved in the join are refilled only once it is done.
inline std::vector<JoinBinding> join_chain(const Index& idx, const JoinQuery& jq, JoinStrategy direction,
                                           const JoinOptions& opts = {}) {
    detail::check_join_query(jq);
    if (direction != JoinStrategy::LeftChain && direction != JoinStrategy::RightChain) {
        throw std::invalid_argument("join chain: direction must be left or right");
    }
    if (!join_planable(jq, direction)) {
        throw std::invalid_argument(
            "join chain: first step would evaluate a pattern with no bound component");
    }
    const bool from_left = direction == JoinStrategy::LeftChain;
    const TriplePattern& first_tp = from_left ? jq.left : jq.right;
    const TriplePattern& second_tp = from_left ? jq.right : jq.left;
    const Region first_slot = from_left ? join_slot_left(jq.kind) : join_slot_right(jq.kind);
    const Region second_slot = from_left ? join_slot_right(jq.kind) : join_slot_left(jq.kind);

    detail::Side first = detail::eval_side(idx, first_tp, first_slot, opts.deferred_fill);

    const bool so_cross = jq.kind == JoinKind::SO && idx.so_count() != kNoSoCount;
    struct Probe {
        uint64_t value;
        std::vector<uint32_t> members;  // first-side row indices carrying the value
        TriplePattern pattern;
        QueryResult result;
    };
    std::vector<Probe> probes;
    for (size_t i = 0; i < first.order.size();) {
        const uint64_t v = detail::get_comp(first.result.rows[first.order[i]], first_slot);
        size_t e = i;
        while (e < first.order.size() &&
               detail::get_comp(first.result.rows[first.order[e]], first_slot) == v) ++e;
        if (opts.so_filter && so_cross && v > idx.so_count()) {
            i = e;  // the id exists in only one of the two roles
            continue;
        }
        auto probe_one = [&](std::vector<uint32_t> members) {
            Probe pr;
            pr.value = v;
            pr.members = std::move(members);
            pr.pattern = second_tp;
            pr.pattern.set(second_slot, v);
            ResolveOptions popts;
            popts.fill_mask = opts.deferred_fill ? 0u : kAllComponents;
            pr.result = resolve(idx, pr.pattern, popts);
            if (!pr.result.rows.empty()) probes.push_back(std::move(pr));
        };
        if (opts.dedup) {
            std::vector<uint32_t> members(first.order.begin() + i, first.order.begin() + e);
            probe_one(std::move(members));
        } else {
            for (size_t k = i; k < e; ++k) probe_one({first.order[k]});
        }
        i = e;
    }
    if (opts.deferred_fill) {
        fill_remaining(idx, first_tp, first.result, kAllComponents);
        for (auto& pr : probes) fill_remaining(idx, pr.pattern, pr.result, kAllComponents);
    }
    std::vector<JoinBinding> out;
    for (const auto& pr : probes) {
        for (uint32_t m : pr.members) {
            for (const Triple& other : pr.result.rows) {
                out.push_back(from_left ? JoinBinding{pr.value, first.result.rows[m], other}
                                        : JoinBinding{pr.value, other, first.result.rows[m]});
            }
        }
    }
    detail::finish(out);
    return out;
}

inline std::vector<JoinBinding> join_evaluate(const Index& idx, const JoinQuery& jq,
                                              const JoinOptions& opts = {}, JoinStrategy* chosen = nullptr) {
    JoinStrategy s = opts.strategy;
    if (s == JoinStrategy::Auto) s = plan_join(jq).strategy;
    if (chosen) *chosen = s;
    switch (s) {
        case JoinStrategy::Merge: return join_merge(idx, jq, opts);
        case JoinStrategy::LeftChain: return join_chain(idx, jq, JoinStrategy::LeftChain, opts);
        case JoinStrategy::RightChain: return join_chain(idx, jq, JoinStrategy::RightChain, opts);
        default: throw std::invalid_argument("join: no usable strategy");
    }
}

// The two-pattern join taxonomy by bound/unbound placement. Every class
// instantiates in subject-subject, subject-object, and object-object form.
struct JoinClass {
    const char* name;
    bool left_other_bound;
    bool left_pred_bound;
    bool right_other_bound;
    bool right_pred_bound;
};

inline const std::array<JoinClass, 9>& join_classes() {
    static const std::array<JoinClass, 9> classes{{
        {"A", true, true, true, true},
        {"B", false, true, true, true},
        {"C", false, true, false, true},
        {"D", true, true, true, false},
        {"E1", false, true, true, false},
        {"E2", true, true, false, false},
        {"F", false, true, false, false},
        {"G", true, false, true, false},
        {"H", false, false, true, false},
    }};
    return classes;
}

// Builds the representative query of a class: bound slots get the supplied
// ids, the join slots follow the variant.
inline JoinQuery instantiate_join(const JoinClass& jc, JoinKind kind, uint64_t left_other,
                                  uint64_t left_pred, uint64_t right_other, uint64_t right_pred) {
    JoinQuery jq;
    jq.kind = kind;
    const Region lslot = join_slot_left(kind), rslot = join_slot_right(kind);
    const Region lother = lslot == Region::S ? Region::O : Region::S;
    const Region rother = rslot == Region::S ? Region::O : Region::S;
    if (jc.left_other_bound) jq.left.set(lother, left_other);
    if (jc.left_pred_bound) jq.left.set(Region::P, left_pred);
    if (jc.right_other_bound) jq.right.set(rother, right_other);
    if (jc.right_pred_bound) jq.right.set(Region::P, right_pred);
    return jq;
}

inline std::string join_pattern_text(const TriplePattern& tp, Region join_slot) {
    auto field = [&](Region r) -> std::string {
        if (r == join_slot) return "?x";
        if (!tp.bound(r)) return "?";
        return std::to_string(tp.get(r));
    };
    return "(" + field(Region::S) + "," + field(Region::P) + "," + field(Region::O) + ")";
}

// Detects which class a join query falls in, if any.
inline const JoinClass* classify_join(const JoinQuery& jq) {
    const Region lslot = join_slot_left(jq.kind), rslot = join_slot_right(jq.kind);
    const Region lother = lslot == Region::S ? Region::O : Region::S;
    const Region rother = rslot == Region::S ? Region::O : Region::S;
    for (const auto& jc : join_classes()) {
        if (jc.left_other_bound == jq.left.bound(lother) && jc.left_pred_bound == jq.left.bound(Region::P) &&
            jc.right_other_bound == jq.right.bound(rother) &&
            jc.right_pred_bound == jq.right.bound(Region::P)) {
            return &jc;
        }
    }
    return nullptr;
}

}  // namespace rdfcsa
