#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>

namespace rdfcsa {

struct Triple {
    uint64_t s = 0;
    uint64_t p = 0;
    uint64_t o = 0;

    auto operator<=>(const Triple&) const = default;
};

enum class Region : uint8_t { S = 0, P = 1, O = 2 };

inline Region next_region(Region r) {
    return static_cast<Region>((static_cast<uint8_t>(r) + 1) % 3);
}

inline const char* region_name(Region r) {
    switch (r) {
        case Region::S: return "S";
        case Region::P: return "P";
        case Region::O: return "O";
    }
    return "?";
}

// Component id 0 marks an unbound slot.
struct TriplePattern {
    uint64_t s = 0;
    uint64_t p = 0;
    uint64_t o = 0;

    uint64_t get(Region r) const {
        switch (r) {
            case Region::S: return s;
            case Region::P: return p;
            case Region::O: return o;
        }
        return 0;
    }

    void set(Region r, uint64_t id) {
        switch (r) {
            case Region::S: s = id; break;
            case Region::P: p = id; break;
            case Region::O: o = id; break;
        }
    }

    bool bound(Region r) const { return get(r) != 0; }
    int bound_count() const { return (s != 0) + (p != 0) + (o != 0); }
    bool matches(const Triple& t) const {
        return (s == 0 || s == t.s) && (p == 0 || p == t.p) && (o == 0 || o == t.o);
    }

    auto operator<=>(const TriplePattern&) const = default;
};

enum class JoinKind : uint8_t { SS = 0, SO = 1, OO = 2 };

inline const char* join_kind_name(JoinKind k) {
    switch (k) {
        case JoinKind::SS: return "ss";
        case JoinKind::SO: return "so";
        case JoinKind::OO: return "oo";
    }
    return "?";
}

// Slot of the join variable in each pattern: so joins share the left object
// with the right subject.
inline Region join_slot_left(JoinKind k) { return k == JoinKind::SS ? Region::S : Region::O; }
inline Region join_slot_right(JoinKind k) { return k == JoinKind::OO ? Region::O : Region::S; }

struct JoinQuery {
    TriplePattern left;
    TriplePattern right;
    JoinKind kind = JoinKind::SO;
};

struct JoinBinding {
    uint64_t value = 0;
    Triple left;
    Triple right;

    auto operator<=>(const JoinBinding&) const = default;
};

}  // namespace rdfcsa
