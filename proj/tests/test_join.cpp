#include <catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "rdfcsa/dictionary.hpp"
#include "rdfcsa/join.hpp"
#include "rdfcsa/testkit.hpp"

using namespace rdfcsa;
using testkit::OracleStore;
using testkit::oracle_join;

namespace {

struct Fixture {
    Index idx;
    OracleStore store;
};

Fixture term_fixture(const testkit::DatasetSpec& spec, BuildMode mode = BuildMode::Compressed) {
    const auto data = testkit::gen_dataset(spec);
    std::vector<RawTriple> raw;
    for (const auto& l : data.lines) raw.push_back({l[0], l[1], l[2]});
    const Dictionary dict = Dictionary::build(raw);
    const TripleSet ts = dict.encode_triples(raw);
    Fixture f{Index::build(ts, {mode, 8, false, 0.85}),
              OracleStore::from(ts.triples(), ts.n_s(), ts.n_p(), ts.n_o(), ts.so_count())};
    return f;
}

// draws bound ids from the store so some probes hit and some miss
JoinQuery random_instance(const JoinClass& jc, JoinKind kind, const OracleStore& store,
                          testkit::Rng& rng) {
    auto pick = [&](Region r) -> uint64_t {
        if (!store.triples.empty() && rng.uniform(4) != 1) {
            const Triple& t = store.triples[rng.uniform(store.triples.size()) - 1];
            return r == Region::S ? t.s : r == Region::P ? t.p : t.o;
        }
        const uint64_t limit = r == Region::S ? store.n_s : r == Region::P ? store.n_p : store.n_o;
        return rng.uniform(limit);
    };
    const Region lslot = join_slot_left(kind), rslot = join_slot_right(kind);
    const Region lother = lslot == Region::S ? Region::O : Region::S;
    const Region rother = rslot == Region::S ? Region::O : Region::S;
    return instantiate_join(jc, kind, pick(lother), pick(Region::P), pick(rother), pick(Region::P));
}

}  // namespace

TEST_CASE("the catalog lists the nine classes with their shapes") {
    const auto& classes = join_classes();
    REQUIRE(classes.size() == 9);
    CHECK(std::string(classes[0].name) == "A");
    CHECK(std::string(classes[8].name) == "H");
    // D: everything bound except one predicate
    const JoinQuery d = instantiate_join(classes[3], JoinKind::SO, 7, 3, 9, 0);
    CHECK(d.left == TriplePattern{7, 3, 0});
    CHECK(d.right == TriplePattern{0, 0, 9});
    CHECK(classify_join(d)->name == std::string("D"));
    // E1 keeps the left subject unbound
    const JoinQuery e1 = instantiate_join(classes[4], JoinKind::SO, 7, 3, 9, 0);
    CHECK(e1.left == TriplePattern{0, 3, 0});
    CHECK(e1.right == TriplePattern{0, 0, 9});
    CHECK(classify_join(e1)->name == std::string("E1"));
    // the ss variant of A binds both objects
    const JoinQuery a_ss = instantiate_join(classes[0], JoinKind::SS, 5, 2, 6, 3);
    CHECK(a_ss.left == TriplePattern{0, 2, 5});
    CHECK(a_ss.right == TriplePattern{0, 3, 6});
}

TEST_CASE("planability excludes full scans as a first step") {
    const auto& classes = join_classes();
    auto jq = [&](const char* name) {
        for (const auto& jc : classes) {
            if (std::string(jc.name) == name) return instantiate_join(jc, JoinKind::SO, 1, 1, 1, 1);
        }
        throw std::logic_error("no class");
    };
    CHECK(join_planable(jq("A"), JoinStrategy::Merge));
    CHECK(!join_planable(jq("E2"), JoinStrategy::Merge));
    CHECK(!join_planable(jq("E2"), JoinStrategy::RightChain));
    CHECK(join_planable(jq("E2"), JoinStrategy::LeftChain));
    CHECK(!join_planable(jq("F"), JoinStrategy::Merge));
    CHECK(!join_planable(jq("F"), JoinStrategy::RightChain));
    CHECK(join_planable(jq("F"), JoinStrategy::LeftChain));
    CHECK(!join_planable(jq("H"), JoinStrategy::Merge));
    CHECK(!join_planable(jq("H"), JoinStrategy::LeftChain));
    CHECK(join_planable(jq("H"), JoinStrategy::RightChain));
    // the planner picks the lone usable strategy
    CHECK(plan_join(jq("E2")).strategy == JoinStrategy::LeftChain);
    CHECK(plan_join(jq("F")).strategy == JoinStrategy::LeftChain);
    CHECK(plan_join(jq("H")).strategy == JoinStrategy::RightChain);
    CHECK(plan_join(jq("A")).strategy == JoinStrategy::LeftChain);
    CHECK(plan_join(jq("D")).strategy == JoinStrategy::LeftChain);
}

TEST_CASE("oo join of two fully bound sides merges sorted object lists") {
    const auto& classes = join_classes();
    const JoinQuery a_oo = instantiate_join(classes[0], JoinKind::OO, 1, 1, 2, 1);
    CHECK(plan_join(a_oo).strategy == JoinStrategy::Merge);
}

TEST_CASE("the running example: two actors sharing a movie") {
    const std::vector<RawTriple> raw = {
        {"L. DiCaprio", "appears in", "Inception"},
        {"J. Gordon", "appears in", "Inception"},
        {"J. Gordon", "lives in", "L.A."},
        {"Inception", "filmed in", "L.A."},
        {"L. DiCaprio", "born in", "L.A."},
    };
    const Dictionary dict = Dictionary::build(raw);
    const TripleSet ts = dict.encode_triples(raw);
    const Index idx = Index::build(ts);
    JoinQuery jq;
    jq.kind = JoinKind::OO;
    jq.left = {*dict.encode("L. DiCaprio", Region::S), *dict.encode("appears in", Region::P), 0};
    jq.right = {*dict.encode("J. Gordon", Region::S), *dict.encode("appears in", Region::P), 0};
    for (JoinStrategy s : {JoinStrategy::Merge, JoinStrategy::LeftChain, JoinStrategy::RightChain}) {
        JoinOptions opts;
        opts.strategy = s;
        const auto bindings = join_evaluate(idx, jq, opts);
        REQUIRE(bindings.size() == 1);
        CHECK(dict.decode(bindings.front().value, Region::O) == "Inception");
    }
}

TEST_CASE("all classes and variants match the nested-loop oracle") {
    const std::vector<testkit::DatasetSpec> specs = {
        {1, 1, 1, 1, 0.0, 31},    {2, 2, 2, 2, 0.0, 32},   {12, 4, 3, 4, 0.2, 33},
        {60, 8, 4, 8, 0.6, 34},   {150, 10, 5, 12, 0.7, 35}, {400, 25, 6, 25, 0.8, 36},
    };
    for (const auto& spec : specs) {
        const Fixture f = term_fixture(spec);
        testkit::Rng rng(spec.seed ^ 0x101);
        for (const JoinClass& jc : join_classes()) {
            for (JoinKind kind : {JoinKind::SS, JoinKind::SO, JoinKind::OO}) {
                for (int round = 0; round < 3; ++round) {
                    const JoinQuery jq = random_instance(jc, kind, f.store, rng);
                    const auto expect = oracle_join(f.store, jq);
                    for (JoinStrategy s :
                         {JoinStrategy::Merge, JoinStrategy::LeftChain, JoinStrategy::RightChain}) {
                        if (!join_planable(jq, s)) continue;
                        JoinOptions opts;
                        opts.strategy = s;
                        REQUIRE(join_evaluate(f.idx, jq, opts) == expect);
                    }
                    JoinOptions autopick;
                    REQUIRE(join_evaluate(f.idx, jq, autopick) == expect);
                }
            }
        }
    }
}

TEST_CASE("optimization toggles never change results") {
    const Fixture f = term_fixture({250, 14, 5, 16, 0.7, 0x711});
    testkit::Rng rng(0x712);
    for (const JoinClass& jc : join_classes()) {
        for (JoinKind kind : {JoinKind::SS, JoinKind::SO, JoinKind::OO}) {
            const JoinQuery jq = random_instance(jc, kind, f.store, rng);
            const auto expect = oracle_join(f.store, jq);
            for (JoinStrategy s : {JoinStrategy::Merge, JoinStrategy::LeftChain, JoinStrategy::RightChain}) {
                if (!join_planable(jq, s)) continue;
                for (int toggle = 0; toggle < 8; ++toggle) {
                    JoinOptions opts;
                    opts.strategy = s;
                    opts.so_filter = toggle & 1;
                    opts.dedup = toggle & 2;
                    opts.deferred_fill = toggle & 4;
                    REQUIRE(join_evaluate(f.idx, jq, opts) == expect);
                }
            }
        }
    }
}

TEST_CASE("so filter prunes probes when ids sit outside the shared range") {
    // ids above |SO| cannot appear in the opposite role; results match with
    // the filter off, which is the soundness claim
    const Fixture f = term_fixture({300, 20, 4, 22, 0.5, 0x50F});
    REQUIRE(f.store.so_count != kNoSoCount);
    REQUIRE(f.idx.so_count() == f.store.so_count);
    testkit::Rng rng(0x50F0);
    for (int round = 0; round < 20; ++round) {
        const JoinQuery jq = random_instance(join_classes()[round % 9], JoinKind::SO, f.store, rng);
        for (JoinStrategy s : {JoinStrategy::LeftChain, JoinStrategy::RightChain}) {
            if (!join_planable(jq, s)) continue;
            JoinOptions on, off;
            on.strategy = off.strategy = s;
            off.so_filter = false;
            REQUIRE(join_evaluate(f.idx, jq, on) == join_evaluate(f.idx, jq, off));
        }
    }
}

TEST_CASE("chaining refuses a fully unbound first step") {
    const Fixture f = term_fixture({30, 5, 3, 5, 0.3, 0xBAD});
    JoinQuery jq;  // class H shape
    jq.kind = JoinKind::SO;
    jq.right = {0, 0, 1};
    CHECK_THROWS_AS(join_chain(f.idx, jq, JoinStrategy::LeftChain, {}), std::invalid_argument);
    CHECK_THROWS_AS(join_merge(f.idx, jq, {}), std::invalid_argument);
    CHECK_NOTHROW(join_chain(f.idx, jq, JoinStrategy::RightChain, {}));
}

TEST_CASE("a bound join slot is rejected") {
    const Fixture f = term_fixture({30, 5, 3, 5, 0.3, 0xBAE});
    JoinQuery jq;
    jq.kind = JoinKind::SS;
    jq.left = {3, 1, 0};  // join slot S must stay unbound
    jq.right = {0, 1, 0};
    CHECK_THROWS_AS(join_evaluate(f.idx, jq, {}), std::invalid_argument);
}

TEST_CASE("empty sides produce empty joins") {
    const Fixture f = term_fixture({40, 6, 3, 6, 0.4, 0xE4});
    JoinQuery jq;
    jq.kind = JoinKind::OO;
    jq.left = {f.store.n_s, f.store.n_p, 0};  // likely absent combination
    jq.right = {0, 1, 0};
    const auto expect = oracle_join(f.store, jq);
    for (JoinStrategy s : {JoinStrategy::Merge, JoinStrategy::LeftChain, JoinStrategy::RightChain}) {
        JoinOptions opts;
        opts.strategy = s;
        CHECK(join_evaluate(f.idx, jq, opts) == expect);
    }
}
