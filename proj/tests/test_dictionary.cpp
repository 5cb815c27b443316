#include <catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "rdfcsa/dictionary.hpp"
#include "rdfcsa/testkit.hpp"

using rdfcsa::Dictionary;
using rdfcsa::RawTriple;
using rdfcsa::Region;

TEST_CASE("shared subject-object terms come first") {
    // "a" is both subject and object, "b" only subject
    const std::vector<RawTriple> raw{{"a", "p", "a"}, {"b", "p", "a"}};
    const Dictionary d = Dictionary::build(raw);
    CHECK(d.so_count() == 1);
    CHECK(d.encode("a", Region::S) == 1);
    CHECK(d.encode("a", Region::O) == 1);
    CHECK(d.encode("b", Region::S) == 2);
    CHECK(d.n_s() == 2);
    CHECK(d.n_o() == 1);
    CHECK(d.n_p() == 1);
}

TEST_CASE("predicates are numbered independently") {
    const std::vector<RawTriple> raw{{"s1", "zzz", "o1"}, {"s2", "aaa", "o2"}};
    const Dictionary d = Dictionary::build(raw);
    CHECK(d.encode("aaa", Region::P) == 1);
    CHECK(d.encode("zzz", Region::P) == 2);
    CHECK(d.encode("aaa", Region::S) == std::nullopt);
}

TEST_CASE("decode(1, S) is the first shared term when the shared set is nonempty") {
    const std::vector<RawTriple> raw{{"m", "p", "z"}, {"z", "p", "m"}, {"k", "p", "q"}};
    const Dictionary d = Dictionary::build(raw);
    REQUIRE(d.so_count() == 2);  // m and z occur in both roles
    CHECK(d.decode(1, Region::S) == "m");
    CHECK(d.decode(1, Region::O) == "m");
}

TEST_CASE("unknown terms encode to nothing") {
    const Dictionary d = Dictionary::build({{"s", "p", "o"}});
    CHECK(d.encode("missing", Region::S) == std::nullopt);
    CHECK(d.encode("missing", Region::P) == std::nullopt);
    CHECK_THROWS_AS(d.decode(9, Region::S), std::out_of_range);
    CHECK_THROWS_AS(d.decode(0, Region::O), std::out_of_range);
}

TEST_CASE("encode and decode are inverse over a generated corpus") {
    const auto data = rdfcsa::testkit::gen_dataset({2000, 150, 12, 170, 0.5, 0xD1C7});
    std::vector<RawTriple> raw;
    for (const auto& l : data.lines) raw.push_back({l[0], l[1], l[2]});
    const Dictionary d = Dictionary::build(raw);

    // linear-scan oracle over the raw terms
    auto occurs = [&](const std::string& term, Region role) {
        for (const auto& t : raw) {
            if (role == Region::S && t.s == term) return true;
            if (role == Region::P && t.p == term) return true;
            if (role == Region::O && t.o == term) return true;
        }
        return false;
    };
    for (const auto& t : raw) {
        for (auto [term, role] : {std::pair{&t.s, Region::S}, {&t.p, Region::P}, {&t.o, Region::O}}) {
            const auto id = d.encode(*term, role);
            REQUIRE(id.has_value());
            REQUIRE(d.decode(*id, role) == *term);
            REQUIRE(occurs(*term, role));
        }
    }
    // ids stay inside the declared ranges and shared ids agree across roles
    const auto ts = d.encode_triples(raw);
    for (const auto& t : ts.triples()) {
        REQUIRE((t.s >= 1 && t.s <= ts.n_s()));
        REQUIRE((t.p >= 1 && t.p <= ts.n_p()));
        REQUIRE((t.o >= 1 && t.o <= ts.n_o()));
    }
    for (uint64_t id = 1; id <= d.so_count(); ++id) {
        REQUIRE(d.decode(id, Region::S) == d.decode(id, Region::O));
    }
}

TEST_CASE("dictionary serialization round trips") {
    const auto data = rdfcsa::testkit::gen_dataset({300, 40, 6, 50, 0.4, 0xD2});
    std::vector<RawTriple> raw;
    for (const auto& l : data.lines) raw.push_back({l[0], l[1], l[2]});
    const Dictionary d = Dictionary::build(raw);
    rdfcsa::ByteWriter w;
    d.serialize(w);
    auto bytes = w.take();
    rdfcsa::ByteReader r(bytes);
    const Dictionary back = Dictionary::deserialize(r);
    CHECK(back == d);
}

TEST_CASE("tsv reader reports malformed lines") {
    std::istringstream ok("a\tp\tb\nc\tq\td\n");
    CHECK(rdfcsa::read_tsv(ok).size() == 2);
    std::istringstream missing("a\tp\n");
    CHECK_THROWS_AS(rdfcsa::read_tsv(missing), rdfcsa::IngestError);
    std::istringstream extra("a\tp\tb\tc\n");
    CHECK_THROWS_AS(rdfcsa::read_tsv(extra), rdfcsa::IngestError);
    std::istringstream empty_field("a\t\tb\n");
    try {
        rdfcsa::read_tsv(empty_field);
        FAIL("expected ingest error");
    } catch (const rdfcsa::IngestError& e) {
        CHECK(e.line() == 1);
    }
}

TEST_CASE("reduced n-triples reader") {
    std::istringstream in(
        "<s> <p> <o> .\n"
        "# comment\n"
        "\n"
        "<s2> <p> \"a literal with spaces\" .\n");
    const auto raw = rdfcsa::read_ntriples_subset(in);
    REQUIRE(raw.size() == 2);
    CHECK(raw[0].s == "<s>");
    CHECK(raw[1].o == "\"a literal with spaces\"");
    std::istringstream bad("<s> <p> <o>\n");
    CHECK_THROWS_AS(rdfcsa::read_ntriples_subset(bad), rdfcsa::IngestError);
}
