#include <catch_amalgamated.hpp>

#include <numeric>
#include <vector>

#include "rdfcsa/psi.hpp"
#include "rdfcsa/testkit.hpp"

using rdfcsa::ByteReader;
using rdfcsa::ByteWriter;
using rdfcsa::PsiMode;
using rdfcsa::PsiSegment;

namespace {

std::vector<uint64_t> random_values(rdfcsa::testkit::Rng& rng, uint64_t n) {
    std::vector<uint64_t> v(n);
    for (auto& x : v) x = rng.uniform(n);
    return v;
}

std::vector<uint64_t> random_permutation(rdfcsa::testkit::Rng& rng, uint64_t n) {
    std::vector<uint64_t> v(n);
    std::iota(v.begin(), v.end(), 1);
    for (uint64_t i = n; i > 1; --i) std::swap(v[i - 1], v[rng.uniform(i) - 1]);
    return v;
}

PsiSegment round_trip(const PsiSegment& seg) {
    ByteWriter w;
    seg.serialize(w);
    auto bytes = w.take();
    ByteReader r(bytes);
    return PsiSegment::deserialize(r);
}

}  // namespace

TEST_CASE("identity permutation collapses to one run per sample block") {
    const uint64_t n = 1000;
    std::vector<uint64_t> v(n);
    std::iota(v.begin(), v.end(), 1);
    const PsiSegment seg = PsiSegment::build(v, PsiMode::Compressed, 32);
    for (uint64_t i = 1; i <= n; ++i) REQUIRE(seg.access(i) == i);
    // one token per block of 31 entries
    CHECK(seg.token_count() == (n - 1) / 32 + 1);
}

TEST_CASE("plain mode reproduces a random permutation") {
    rdfcsa::testkit::Rng rng(0x951);
    const auto v = random_permutation(rng, 257);
    const PsiSegment seg = PsiSegment::build(v, PsiMode::Plain, 32);
    for (uint64_t i = 1; i <= v.size(); ++i) REQUIRE(seg.access(i) == v[i - 1]);
}

TEST_CASE("plain mode payload is exactly n entries of ceil(log2 n) bits") {
    rdfcsa::testkit::Rng rng(0x9A);
    for (uint64_t n : {1ull, 2ull, 8ull, 9ull, 1000ull}) {
        const auto v = random_values(rng, n);
        const PsiSegment seg = PsiSegment::build(v, PsiMode::Plain, 4);
        CHECK(seg.payload_bits() == n * rdfcsa::bits_for(n));
    }
}

TEST_CASE("sample positions answer without touching the stream") {
    rdfcsa::testkit::Rng rng(0x3A11);
    const uint64_t n = 513;
    const auto v = random_values(rng, n);
    for (uint32_t t : {4u, 8u, 16u, 32u, 64u, 512u}) {
        const PsiSegment seg = PsiSegment::build(v, PsiMode::Compressed, t);
        for (uint64_t k = 0; 1 + k * t <= n; ++k) REQUIRE(seg.access(1 + k * t) == v[k * t]);
    }
}

TEST_CASE("compressed access agrees with the retained plaintext") {
    rdfcsa::testkit::Rng rng(0xACCE);
    for (int round = 0; round < 100; ++round) {
        const uint64_t n = 1 + rng.uniform(700);
        const auto v = round % 2 ? random_values(rng, n) : random_permutation(rng, n);
        const uint32_t t = std::vector<uint32_t>{4, 8, 16, 32, 64, 512}[round % 6];
        const PsiSegment seg = PsiSegment::build(v, PsiMode::Compressed, t);
        for (uint64_t i = 1; i <= n; ++i) REQUIRE(seg.access(i) == v[i - 1]);
    }
}

TEST_CASE("runs split at sample boundaries stay exact") {
    // long stretches of +1 interrupted at arbitrary points
    std::vector<uint64_t> v;
    uint64_t cur = 5;
    const uint64_t n = 2000;
    for (uint64_t i = 0; i < n; ++i) {
        if (i % 97 == 0) cur = (i * 31) % n + 1;
        else cur = cur % n + 1;
        v.push_back(cur);
    }
    const PsiSegment seg = PsiSegment::build(v, PsiMode::Compressed, 16);
    for (uint64_t i = 1; i <= n; ++i) REQUIRE(seg.access(i) == v[i - 1]);
    // ends mid-run
    REQUIRE(seg.access(n) == v[n - 1]);
}

TEST_CASE("decode_range equals pointwise access") {
    rdfcsa::testkit::Rng rng(0xDECD);
    const uint64_t n = 1500;
    const auto v = random_values(rng, n);
    for (PsiMode mode : {PsiMode::Compressed, PsiMode::Plain}) {
        const PsiSegment seg = PsiSegment::build(v, mode, 32);
        for (int round = 0; round < 300; ++round) {
            uint64_t l = rng.uniform(n), r = rng.uniform(n);
            if (l > r) std::swap(l, r);
            const auto got = seg.decode_range(l, r);
            REQUIRE(got.size() == r - l + 1);
            for (uint64_t i = l; i <= r; ++i) REQUIRE(got[i - l] == v[i - 1]);
        }
        CHECK(seg.decode_range(5, 5) == std::vector<uint64_t>{v[4]});
        CHECK(seg.decode_range(7, 3).empty());
        CHECK(seg.decode_range(1, n) == v);
    }
}

TEST_CASE("single-entry segment") {
    const std::vector<uint64_t> v{1};
    for (PsiMode mode : {PsiMode::Compressed, PsiMode::Plain}) {
        const PsiSegment seg = PsiSegment::build(v, mode, 32);
        CHECK(seg.access(1) == 1);
        const PsiSegment back = round_trip(seg);
        CHECK(back.access(1) == 1);
    }
}

TEST_CASE("construction rejects bad input") {
    CHECK_THROWS_AS(PsiSegment::build({}, PsiMode::Plain, 32), std::invalid_argument);
    const std::vector<uint64_t> bad{1, 5, 2};  // 5 > n = 3
    CHECK_THROWS_AS(PsiSegment::build(bad, PsiMode::Compressed, 32), std::invalid_argument);
    const std::vector<uint64_t> zero{0, 1, 2};
    CHECK_THROWS_AS(PsiSegment::build(zero, PsiMode::Plain, 32), std::invalid_argument);
}

TEST_CASE("serialization round trip is exact and byte-stable") {
    rdfcsa::testkit::Rng rng(0x5E1A);
    for (int round = 0; round < 20; ++round) {
        const uint64_t n = 1 + rng.uniform(2000);
        const auto v = random_values(rng, n);
        const PsiMode mode = round % 3 == 0 ? PsiMode::Plain : PsiMode::Compressed;
        const PsiSegment seg = PsiSegment::build(v, mode, 8);
        ByteWriter w1;
        seg.serialize(w1);
        const auto bytes1 = w1.take();
        ByteReader r(bytes1);
        const PsiSegment back = PsiSegment::deserialize(r);
        for (uint64_t i = 1; i <= n; ++i) REQUIRE(back.access(i) == v[i - 1]);
        ByteWriter w2;
        back.serialize(w2);
        REQUIRE(w2.data() == bytes1);
    }
}

TEST_CASE("escape path covers wide alphabets of gaps") {
    // many distinct gap values so the code head overflows and escapes kick in
    rdfcsa::testkit::Rng rng(0xE5C);
    const uint64_t n = 60000;
    std::vector<uint64_t> v(n);
    for (auto& x : v) x = rng.uniform(n);
    const PsiSegment seg = PsiSegment::build(v, PsiMode::Compressed, 32);
    for (uint64_t i = 1; i <= n; i += 997) REQUIRE(seg.access(i) == v[i - 1]);
    const PsiSegment back = round_trip(seg);
    for (uint64_t i = 1; i <= n; i += 997) REQUIRE(back.access(i) == v[i - 1]);
}
