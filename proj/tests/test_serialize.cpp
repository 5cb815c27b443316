#include <catch_amalgamated.hpp>

#include <vector>

#include "rdfcsa/query.hpp"
#include "rdfcsa/serialize.hpp"
#include "rdfcsa/testkit.hpp"

using namespace rdfcsa;

namespace {

struct Built {
    Dictionary dict;
    TripleSet ts;
    Index idx;
};

Built build_from_terms(const testkit::DatasetSpec& spec, BuildOptions opts = {}) {
    const auto data = testkit::gen_dataset(spec);
    std::vector<RawTriple> raw;
    for (const auto& l : data.lines) raw.push_back({l[0], l[1], l[2]});
    Dictionary dict = Dictionary::build(raw);
    TripleSet ts = dict.encode_triples(raw);
    Index idx = Index::build(ts, opts);
    return {std::move(dict), std::move(ts), std::move(idx)};
}

}  // namespace

TEST_CASE("write, read, and answer identically") {
    for (BuildMode mode : {BuildMode::Compressed, BuildMode::Hybrid}) {
        const Built b = build_from_terms({400, 25, 6, 28, 0.7, 0x51}, {mode, 16, false, 0.85});
        for (bool embed : {true, false}) {
            const auto bytes = write_index(b.idx, &b.dict, embed);
            const LoadedIndex loaded = read_index(bytes);
            REQUIRE(loaded.dictionary.has_value());
            REQUIRE(*loaded.dictionary == b.dict);
            REQUIRE(loaded.index.size() == b.idx.size());
            REQUIRE(loaded.index.so_count() == b.idx.so_count());
            REQUIRE(loaded.index.extract_all() == b.idx.extract_all());
            testkit::Rng rng(0x52);
            for (int round = 0; round < 40; ++round) {
                const Triple t = b.ts.triples()[rng.uniform(b.ts.size()) - 1];
                for (const TriplePattern tp :
                     {TriplePattern{t.s, 0, 0}, {0, t.p, 0}, {t.s, t.p, 0}, {t.s, t.p, t.o}, {0, t.p, t.o}}) {
                    REQUIRE(resolve(loaded.index, tp).rows == resolve(b.idx, tp).rows);
                }
            }
        }
    }
}

TEST_CASE("rebuilding the same input is byte-identical") {
    const auto data = testkit::gen_dataset({300, 18, 5, 20, 0.6, 0x77});
    std::vector<RawTriple> raw;
    for (const auto& l : data.lines) raw.push_back({l[0], l[1], l[2]});
    auto build_once = [&]() {
        const Dictionary dict = Dictionary::build(raw);
        const TripleSet ts = dict.encode_triples(raw);
        const Index idx = Index::build(ts, {BuildMode::Compressed, 32, false, 0.85});
        return write_index(idx, &dict);
    };
    CHECK(build_once() == build_once());
}

TEST_CASE("single-bit corruption in any section is caught") {
    const Built b = build_from_terms({120, 10, 4, 12, 0.5, 0x99});
    auto bytes = write_index(b.idx, &b.dict);
    const IndexFileInfo info = read_index_info(bytes);
    testkit::Rng rng(0x9A);
    for (int s = 0; s < 8; ++s) {
        if (info.section_length[s] == 0) continue;
        auto corrupted = bytes;
        const uint64_t off = info.section_offset[s] + rng.uniform(info.section_length[s]) - 1;
        corrupted[off] ^= static_cast<uint8_t>(1u << (rng.uniform(8) - 1));
        CHECK_THROWS_WITH(read_index(corrupted), "checksum mismatch");
    }
}

TEST_CASE("a corrupted psi entry with a patched checksum fails the cycle check") {
    const Built b = build_from_terms({200, 12, 4, 14, 0.5, 0xAB});
    auto bytes = write_index(b.idx, &b.dict);
    const IndexFileInfo info = read_index_info(bytes);
    // flip bits inside the plain psi payload until a value changes, then
    // recompute the trailer so only the structural check can object
    const Built hybrid = build_from_terms({200, 12, 4, 14, 0.5, 0xAB}, {BuildMode::Hybrid, 32, false, 0.85});
    bytes = write_index(hybrid.idx, nullptr);
    const IndexFileInfo hinfo = read_index_info(bytes);
    const uint64_t payload = hinfo.section_offset[5] + 14;  // past the psi_s section header
    bytes[payload] ^= 0x01;
    uint32_t crc = 0;
    for (int s = 0; s < 8; ++s) {
        crc = crc32(std::span<const uint8_t>(bytes).subspan(hinfo.section_offset[s], hinfo.section_length[s]), crc);
    }
    const size_t trailer = hinfo.section_offset[7] + hinfo.section_length[7];
    for (int k = 0; k < 4; ++k) bytes[trailer + k] = static_cast<uint8_t>(crc >> (8 * k));
    const LoadedIndex loaded = read_index(bytes);
    const VerifyReport rep = verify_structure(loaded.index);
    CHECK(!rep.ok());
    CHECK(!rep.cyclic_ok);
}

TEST_CASE("fresh indexes verify clean") {
    for (BuildMode mode : {BuildMode::Compressed, BuildMode::Hybrid}) {
        const Built b = build_from_terms({150, 10, 4, 12, 0.6, 0xC1}, {mode, 8, false, 0.85});
        const VerifyReport rep = verify_structure(b.idx);
        CHECK(rep.cyclic_ok);
        CHECK(rep.monotonic_ok);
        CHECK(rep.extract_count_ok);
        CHECK(rep.ok());
    }
}

TEST_CASE("truncated or foreign files are rejected") {
    const Built b = build_from_terms({50, 8, 3, 8, 0.4, 0xD0});
    auto bytes = write_index(b.idx, &b.dict);
    CHECK_THROWS(read_index(std::span<const uint8_t>(bytes).subspan(0, bytes.size() / 2)));
    std::vector<uint8_t> junk(64, 0x42);
    CHECK_THROWS_WITH(read_index(junk), "not an index file");
}

TEST_CASE("stats account for every byte and expose the psi ratios") {
    const Built b = build_from_terms({500, 30, 6, 32, 0.8, 0xE0}, {BuildMode::Hybrid, 32, false, 0.85});
    const auto bytes = write_index(b.idx, &b.dict);
    const IndexFileInfo info = read_index_info(bytes);
    const IndexStats st = index_stats(info);
    uint64_t sum = st.header_bytes + st.trailer_bytes;
    for (uint64_t s : st.section_bytes) sum += s;
    CHECK(sum == st.total_bytes);
    CHECK(st.total_bytes == bytes.size());
    // hybrid psi_s and psi_o sections are the plain layout plus the section header
    const uint64_t n = b.idx.size();
    const uint64_t expect = 14 + (n * bits_for(n) + 7) / 8;
    CHECK(st.section_bytes[5] == expect);
    CHECK(st.section_bytes[7] == expect);
    CHECK(st.psi[0].plain_equivalent_bytes == expect);
}

TEST_CASE("file io round trip") {
    const Built b = build_from_terms({60, 8, 3, 9, 0.4, 0xF2});
    const auto bytes = write_index(b.idx, &b.dict);
    const std::string path = "test_roundtrip.rdfcsa";
    save_index_file(path, bytes);
    CHECK(load_file(path) == bytes);
    std::remove(path.c_str());
}
