#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rdfcsa/common.hpp"
#include "rdfcsa/core.hpp"
#include "rdfcsa/types.hpp"

namespace rdfcsa {

struct RawTriple {
    std::string s, p, o;
};

class IngestError : public std::runtime_error {
public:
    IngestError(size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    size_t line() const { return line_; }

private:
    size_t line_;
};

// Four-set term dictionary: terms used as both subject and object share one
// id block [1,|SO|]; subject-only and object-only terms continue from
// |SO|+1 in their own role; predicates are numbered from 1 separately.
class Dictionary {
public:
    Dictionary() = default;

    static Dictionary build(const std::vector<RawTriple>& raw) {
        Dictionary d;
        std::set<std::string> subjects, objects, predicates;
        for (const auto& t : raw) {
            subjects.insert(t.s);
            predicates.insert(t.p);
            objects.insert(t.o);
        }
        for (const auto& s : subjects) {
            (objects.count(s) ? d.so_terms_ : d.s_terms_).push_back(s);
        }
        for (const auto& o : objects) {
            if (!subjects.count(o)) d.o_terms_.push_back(o);
        }
        d.p_terms_.assign(predicates.begin(), predicates.end());
        return d;  // std::set iteration is already bytewise-lexicographic
    }

    uint64_t so_count() const { return so_terms_.size(); }
    uint64_t n_s() const { return so_terms_.size() + s_terms_.size(); }
    uint64_t n_p() const { return p_terms_.size(); }
    uint64_t n_o() const { return so_terms_.size() + o_terms_.size(); }

    std::optional<uint64_t> encode(std::string_view term, Region role) const {
        if (role == Region::P) return find(p_terms_, term, 1);
        if (auto id = find(so_terms_, term, 1)) return id;
        const auto& tail = role == Region::S ? s_terms_ : o_terms_;
        return find(tail, term, so_terms_.size() + 1);
    }

    const std::string& decode(uint64_t id, Region role) const {
        if (id == 0) throw std::out_of_range("decode: id out of range");
        if (role == Region::P) {
            if (id > p_terms_.size()) throw std::out_of_range("decode: predicate id out of range");
            return p_terms_[id - 1];
        }
        if (id <= so_terms_.size()) return so_terms_[id - 1];
        const auto& tail = role == Region::S ? s_terms_ : o_terms_;
        const uint64_t off = id - so_terms_.size() - 1;
        if (off >= tail.size()) throw std::out_of_range("decode: id out of range");
        return tail[off];
    }

    TripleSet encode_triples(const std::vector<RawTriple>& raw) const {
        std::vector<Triple> ids;
        ids.reserve(raw.size());
        for (const auto& t : raw) {
            ids.push_back({*encode(t.s, Region::S), *encode(t.p, Region::P), *encode(t.o, Region::O)});
        }
        return TripleSet(std::move(ids), n_s(), n_p(), n_o(), so_count());
    }

    void serialize(ByteWriter& out) const {
        out.u64(so_terms_.size());
        out.u64(s_terms_.size());
        out.u64(p_terms_.size());
        out.u64(o_terms_.size());
        for (const auto* block : {&so_terms_, &s_terms_, &p_terms_, &o_terms_}) {
            for (const auto& term : *block) {
                out.u32(static_cast<uint32_t>(term.size()));
                out.bytes(term.data(), term.size());
            }
        }
    }

    static Dictionary deserialize(ByteReader& in) {
        Dictionary d;
        const uint64_t n_so = in.u64(), n_s = in.u64(), n_p = in.u64(), n_o = in.u64();
        auto read_block = [&](std::vector<std::string>& block, uint64_t count) {
            block.reserve(count);
            for (uint64_t i = 0; i < count; ++i) {
                const uint32_t len = in.u32();
                auto raw = in.raw(len);
                block.emplace_back(reinterpret_cast<const char*>(raw.data()), raw.size());
            }
        };
        read_block(d.so_terms_, n_so);
        read_block(d.s_terms_, n_s);
        read_block(d.p_terms_, n_p);
        read_block(d.o_terms_, n_o);
        return d;
    }

    bool operator==(const Dictionary&) const = default;

private:
    static std::optional<uint64_t> find(const std::vector<std::string>& sorted, std::string_view term,
                                        uint64_t base) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), term);
        if (it == sorted.end() || *it != term) return std::nullopt;
        return base + static_cast<uint64_t>(it - sorted.begin());
    }

    std::vector<std::string> so_terms_, s_terms_, p_terms_, o_terms_;
};

// One triple per line, three fields separated by single tabs.
inline std::vector<RawTriple> read_tsv(std::istream& in) {
    std::vector<RawTriple> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const size_t t1 = line.find('\t');
        const size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
            throw IngestError(lineno, "expected exactly three tab-separated fields");
        }
        RawTriple t{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)};
        if (t.s.empty() || t.p.empty() || t.o.empty()) throw IngestError(lineno, "empty field");
        out.push_back(std::move(t));
    }
    return out;
}

// Reduced N-Triples reader: subject and predicate tokens, the rest of the
// line up to the closing " ." is the object. Full grammar (escapes, blank
// node syntax validation) is out of scope.
inline std::vector<RawTriple> read_ntriples_subset(std::istream& in) {
    std::vector<RawTriple> out;
    std::string line;
    size_t lineno = 0;
    auto trim = [](std::string_view v) {
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r')) v.remove_suffix(1);
        return v;
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view v = trim(line);
        if (v.empty() || v.front() == '#') continue;
        if (v.back() != '.') throw IngestError(lineno, "missing terminating '.'");
        v.remove_suffix(1);
        v = trim(v);
        const size_t s1 = v.find_first_of(" \t");
        if (s1 == std::string_view::npos) throw IngestError(lineno, "expected three terms");
        std::string_view s = v.substr(0, s1);
        std::string_view rest = trim(v.substr(s1));
        const size_t s2 = rest.find_first_of(" \t");
        if (s2 == std::string_view::npos) throw IngestError(lineno, "expected three terms");
        std::string_view p = rest.substr(0, s2);
        std::string_view o = trim(rest.substr(s2));
        if (s.empty() || p.empty() || o.empty()) throw IngestError(lineno, "empty term");
        out.push_back({std::string(s), std::string(p), std::string(o)});
    }
    return out;
}

}  // namespace rdfcsa
