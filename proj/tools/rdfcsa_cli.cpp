#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdfcsa/rdfcsa.hpp"
#include "rdfcsa/testkit.hpp"

namespace {

using json = nlohmann::json;
using namespace rdfcsa;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerify = 3;

struct PatternSpec {
    std::array<std::string, 3> fields;
};

std::array<std::string, 3> split_pattern(const std::string& text) {
    std::istringstream ss(text);
    std::array<std::string, 3> out;
    std::string extra;
    if (!(ss >> out[0] >> out[1] >> out[2]) || (ss >> extra)) {
        throw std::invalid_argument("pattern must have exactly three fields: \"" + text + "\"");
    }
    return out;
}

// Resolves one pattern field to an id; nullopt means the term is unknown,
// so the whole query has no results.
std::optional<uint64_t> field_id(const std::string& field, Region role, bool ids_only,
                                 const std::optional<Dictionary>& dict) {
    if (field == "?") return 0;
    if (ids_only) {
        size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(field, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("not an integer id: " + field);
        }
        if (used != field.size() || v == 0) throw std::invalid_argument("not a positive id: " + field);
        return v;
    }
    if (!dict) throw std::runtime_error("index carries no dictionary; use --ids-only");
    auto id = dict->encode(field, role);
    if (!id) return std::nullopt;
    return *id;
}

std::string field_text(uint64_t id, Region role, bool ids_only, const std::optional<Dictionary>& dict) {
    if (ids_only || !dict) return std::to_string(id);
    return dict->decode(id, role);
}

std::string triple_text(const Triple& t, bool ids_only, const std::optional<Dictionary>& dict) {
    return field_text(t.s, Region::S, ids_only, dict) + "\t" + field_text(t.p, Region::P, ids_only, dict) +
           "\t" + field_text(t.o, Region::O, ids_only, dict);
}

Strategy parse_strategy(const std::string& name) {
    if (name == "auto") return Strategy::Auto;
    if (name == "base") return Strategy::Base;
    if (name == "forward") return Strategy::Forward;
    if (name == "backward") return Strategy::Backward;
    throw std::invalid_argument("unknown strategy: " + name);
}

JoinStrategy parse_join_strategy(const std::string& name) {
    if (name == "auto") return JoinStrategy::Auto;
    if (name == "merge") return JoinStrategy::Merge;
    if (name == "left") return JoinStrategy::LeftChain;
    if (name == "right") return JoinStrategy::RightChain;
    throw std::invalid_argument("unknown join strategy: " + name);
}

std::string human_ratio(double r) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << r * 100.0 << "%";
    return ss.str();
}

void print_stats(const IndexStats& st, bool as_json) {
    if (as_json) {
        json j;
        j["n"] = st.n;
        j["total_bytes"] = st.total_bytes;
        j["header_bytes"] = st.header_bytes;
        j["trailer_bytes"] = st.trailer_bytes;
        j["baseline_bytes"] = st.baseline_bytes;
        j["ratio_vs_baseline"] = st.ratio_vs_baseline;
        for (int s = 0; s < 8; ++s) j["sections"][kSectionNames[s]] = st.section_bytes[s];
        const char* names[3] = {"psi_s", "psi_p", "psi_o"};
        for (int k = 0; k < 3; ++k) {
            j["psi"][names[k]] = {{"bytes", st.psi[k].bytes},
                                  {"plain_equivalent_bytes", st.psi[k].plain_equivalent_bytes},
                                  {"ratio", st.psi[k].ratio}};
        }
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::cout << "triples: " << st.n << "\n";
    for (int s = 0; s < 8; ++s) {
        std::cout << "section " << kSectionNames[s] << ": " << st.section_bytes[s] << " bytes\n";
    }
    std::cout << "header: " << st.header_bytes << " bytes, trailer: " << st.trailer_bytes << " bytes\n";
    std::cout << "total: " << st.total_bytes << " bytes\n";
    std::cout << "baseline (12 bytes/triple): " << st.baseline_bytes << " bytes\n";
    std::cout << "ratio: " << human_ratio(st.ratio_vs_baseline) << "\n";
    const char* names[3] = {"psi_s", "psi_p", "psi_o"};
    for (int k = 0; k < 3; ++k) {
        std::cout << names[k] << ": " << st.psi[k].bytes << " bytes, "
                  << human_ratio(st.psi[k].ratio) << " of plain layout\n";
    }
}

int cmd_build(const std::string& input, const std::string& output, const std::string& mode,
              uint32_t t_psi, const std::string& format, bool adaptive, bool no_dictionary) {
    std::ifstream in(input);
    if (!in) {
        std::cerr << "error: cannot open " << input << "\n";
        return kExitData;
    }
    std::vector<RawTriple> raw;
    try {
        raw = format == "tsv" ? read_tsv(in) : read_ntriples_subset(in);
    } catch (const IngestError& e) {
        std::cerr << "error: " << input << ": " << e.what() << "\n";
        return kExitData;
    }
    if (raw.empty()) {
        std::cerr << "error: " << input << ": no triples\n";
        return kExitData;
    }
    const bool known_tpsi =
        t_psi == 4 || t_psi == 8 || t_psi == 16 || t_psi == 32 || t_psi == 64 || t_psi == 512;
    if (!known_tpsi) {
        std::cerr << "warning: unusual sampling period " << t_psi << "\n";
    }
    const Dictionary dict = Dictionary::build(raw);
    const TripleSet ts = dict.encode_triples(raw);
    BuildOptions opts;
    opts.mode = mode == "hybrid" ? BuildMode::Hybrid : BuildMode::Compressed;
    opts.t_psi = t_psi;
    opts.adaptive = adaptive;
    const Index idx = Index::build(ts, opts);
    const std::vector<uint8_t> bytes = write_index(idx, no_dictionary ? nullptr : &dict);
    save_index_file(output, bytes);
    std::cout << "n: " << idx.size() << "\n";
    std::cout << "n_s: " << idx.n_s() << ", n_p: " << idx.n_p() << ", n_o: " << idx.n_o() << "\n";
    if (ts.duplicates_removed() > 0) {
        std::cout << "duplicates removed: " << ts.duplicates_removed() << "\n";
    }
    print_stats(index_stats(read_index_info(bytes)), false);
    return kExitOk;
}

int cmd_query(const std::string& index_path, const std::string& pattern, const std::string& strategy,
              uint64_t limit, bool ids_only) {
    const LoadedIndex loaded = read_index(load_file(index_path));
    const auto fields = split_pattern(pattern);
    TriplePattern tp;
    bool unknown_term = false;
    const Region roles[3] = {Region::S, Region::P, Region::O};
    for (int k = 0; k < 3; ++k) {
        auto id = field_id(fields[k], roles[k], ids_only, loaded.dictionary);
        if (!id) unknown_term = true;
        else tp.set(roles[k], *id);
    }
    if (unknown_term) {
        std::cout << "count: 0\n";
        return kExitOk;
    }
    ResolveOptions opts;
    opts.strategy = parse_strategy(strategy);
    const QueryResult qr = resolve(loaded.index, tp, opts);
    uint64_t printed = 0;
    for (const Triple& t : qr.rows) {
        if (limit && printed >= limit) break;
        std::cout << triple_text(t, ids_only, loaded.dictionary) << "\n";
        ++printed;
    }
    std::cout << "count: " << qr.count() << "\n";
    return kExitOk;
}

// "?x" marks the join slot; both patterns must carry it in the slots the
// join kind dictates.
int cmd_join(const std::string& index_path, const std::string& left, const std::string& right,
             const std::string& kind_name, const std::string& strategy, bool ids_only,
             bool no_so_filter, bool no_dedup, bool no_deferred) {
    const LoadedIndex loaded = read_index(load_file(index_path));
    JoinKind kind = kind_name == "ss" ? JoinKind::SS : kind_name == "oo" ? JoinKind::OO : JoinKind::SO;
    const auto lf = split_pattern(left);
    const auto rf = split_pattern(right);
    const Region lslot = join_slot_left(kind), rslot = join_slot_right(kind);
    const Region roles[3] = {Region::S, Region::P, Region::O};
    auto parse_side = [&](const std::array<std::string, 3>& fields, Region slot, TriplePattern& tp,
                          bool& unknown) {
        for (int k = 0; k < 3; ++k) {
            if (fields[k] == "?x") {
                if (roles[k] != slot) {
                    throw std::invalid_argument(std::string("join variable must sit in the ") +
                                                region_name(slot) + " slot for a " +
                                                join_kind_name(kind) + " join");
                }
                continue;
            }
            auto id = field_id(fields[k], roles[k], ids_only, loaded.dictionary);
            if (!id) unknown = true;
            else tp.set(roles[k], *id);
        }
    };
    JoinQuery jq;
    jq.kind = kind;
    bool unknown_term = false;
    parse_side(lf, lslot, jq.left, unknown_term);
    parse_side(rf, rslot, jq.right, unknown_term);
    if (unknown_term) {
        std::cout << "count: 0\n";
        return kExitOk;
    }
    JoinOptions opts;
    opts.strategy = parse_join_strategy(strategy);
    opts.so_filter = !no_so_filter;
    opts.dedup = !no_dedup;
    opts.deferred_fill = !no_deferred;
    JoinStrategy chosen = JoinStrategy::Auto;
    const std::vector<JoinBinding> bindings = join_evaluate(loaded.index, jq, opts, &chosen);
    const Region value_role = lslot;  // so joins print the shared id's subject-side term
    for (const JoinBinding& b : bindings) {
        std::cout << "x=" << field_text(b.value, value_role, ids_only, loaded.dictionary) << "\t"
                  << triple_text(b.left, ids_only, loaded.dictionary) << "\t"
                  << triple_text(b.right, ids_only, loaded.dictionary) << "\n";
    }
    if (const JoinClass* jc = classify_join(jq)) std::cout << "class: " << jc->name << "\n";
    std::cout << "strategy: " << join_strategy_name(chosen) << "\n";
    std::cout << "count: " << bindings.size() << "\n";
    return kExitOk;
}

int cmd_join_catalog(const std::string& which) {
    for (const JoinClass& jc : join_classes()) {
        if (which != "all" && which != jc.name) continue;
        std::cout << "join " << jc.name << ":\n";
        for (JoinKind kind : {JoinKind::SS, JoinKind::SO, JoinKind::OO}) {
            const JoinQuery jq = instantiate_join(jc, kind, 1, 1, 1, 1);
            std::cout << "  " << join_kind_name(kind) << ": "
                      << join_pattern_text(jq.left, join_slot_left(kind)) << " x "
                      << join_pattern_text(jq.right, join_slot_right(kind)) << "\n";
        }
    }
    return kExitOk;
}

int cmd_verify(const std::string& index_path, bool as_json) {
    LoadedIndex loaded;
    try {
        loaded = read_index(load_file(index_path));
    } catch (const std::exception& e) {
        if (as_json) {
            std::cout << json{{"ok", false}, {"error", e.what()}}.dump(2) << "\n";
        } else {
            std::cout << "checksum/load: FAIL (" << e.what() << ")\n";
        }
        return kExitVerify;
    }
    const VerifyReport rep = verify_structure(loaded.index);
    if (as_json) {
        json j;
        j["ok"] = rep.ok();
        j["checksum"] = true;
        j["cyclic"] = rep.cyclic_ok;
        j["monotonic"] = rep.monotonic_ok;
        j["extract_count"] = rep.extract_count_ok;
        if (!rep.ok()) j["first_failure"] = rep.first_failure;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "checksum: ok\n";
        std::cout << "cyclic: " << (rep.cyclic_ok ? "ok" : "FAIL") << "\n";
        std::cout << "monotonic: " << (rep.monotonic_ok ? "ok" : "FAIL") << "\n";
        std::cout << "extract count: " << (rep.extract_count_ok ? "ok" : "FAIL") << "\n";
        if (!rep.ok()) std::cout << "first failure: " << rep.first_failure << "\n";
    }
    return rep.ok() ? kExitOk : kExitVerify;
}

int cmd_stats(const std::string& index_path, bool as_json) {
    const std::vector<uint8_t> bytes = load_file(index_path);
    print_stats(index_stats(read_index_info(bytes)), as_json);
    return kExitOk;
}

int cmd_gen(uint64_t n, uint64_t n_s, uint64_t n_p, uint64_t n_o, double skew, uint64_t seed,
            const std::string& output) {
    const testkit::RawDataset data = testkit::gen_dataset({n, n_s, n_p, n_o, skew, seed});
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!output.empty()) {
        file.open(output, std::ios::trunc);
        if (!file) {
            std::cerr << "error: cannot open " << output << "\n";
            return kExitData;
        }
        out = &file;
    }
    for (const auto& line : data.lines) {
        (*out) << line[0] << "\t" << line[1] << "\t" << line[2] << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-indexing compressed triple store"};
    app.require_subcommand(1);

    auto* build = app.add_subcommand("build", "Build an index from a triple file");
    std::string b_input, b_output, b_mode = "compressed", b_format = "tsv";
    uint32_t b_tpsi = 32;
    bool b_adaptive = false, b_nodict = false;
    build->add_option("-i,--input", b_input, "Input triple file")->required();
    build->add_option("-o,--output", b_output, "Index file to write")->required();
    build->add_option("--mode", b_mode, "Psi layout")->check(CLI::IsMember({"compressed", "hybrid"}));
    build->add_option("--tpsi", b_tpsi, "Psi sampling period")->check(CLI::PositiveNumber);
    build->add_option("--format", b_format, "Input format")
        ->check(CLI::IsMember({"tsv", "ntriples-subset"}));
    build->add_flag("--adaptive", b_adaptive, "Compress a segment only if it saves at least 15%");
    build->add_flag("--no-dictionary", b_nodict, "Do not embed the term dictionary");

    auto* query = app.add_subcommand("query", "Run one triple pattern");
    std::string q_index, q_pattern, q_strategy = "auto";
    uint64_t q_limit = 0;
    bool q_ids = false;
    query->add_option("index", q_index, "Index file")->required();
    query->add_option("pattern", q_pattern, "Pattern: three fields, ? for unbound")->required();
    query->add_option("--strategy", q_strategy)
        ->check(CLI::IsMember({"auto", "base", "forward", "backward"}));
    query->add_option("--limit", q_limit, "Print at most this many rows");
    query->add_flag("--ids-only", q_ids, "Fields are integer ids");

    auto* join = app.add_subcommand("join", "Join two triple patterns on ?x");
    std::string j_index, j_left, j_right, j_kind = "so", j_strategy = "auto", j_class;
    bool j_ids = false, j_nosof = false, j_nodedup = false, j_nodefer = false;
    join->add_option("index", j_index, "Index file");
    join->add_option("--left", j_left, "Left pattern, ?x in the join slot");
    join->add_option("--right", j_right, "Right pattern, ?x in the join slot");
    join->add_option("--kind", j_kind)->check(CLI::IsMember({"ss", "so", "oo"}));
    join->add_option("--strategy", j_strategy)->check(CLI::IsMember({"auto", "merge", "left", "right"}));
    join->add_option("--class", j_class, "Print the representative patterns of a join class and exit");
    join->add_flag("--ids-only", j_ids, "Fields are integer ids");
    join->add_flag("--no-so-filter", j_nosof, "Disable the shared-id probe filter");
    join->add_flag("--no-dedup", j_nodedup, "Probe repeated join values again");
    join->add_flag("--no-deferred-fill", j_nodefer, "Fill all components during evaluation");

    auto* verify = app.add_subcommand("verify", "Check index invariants");
    std::string v_index;
    bool v_json = false;
    verify->add_option("index", v_index, "Index file")->required();
    verify->add_flag("--json", v_json);

    auto* stats = app.add_subcommand("stats", "Report section sizes and ratios");
    std::string s_index;
    bool s_json = false;
    stats->add_option("index", s_index, "Index file")->required();
    stats->add_flag("--json", s_json);

    auto* gen = app.add_subcommand("gen", "Generate a synthetic triple file");
    uint64_t g_n = 1000, g_ns = 100, g_np = 8, g_no = 100, g_seed = 1;
    double g_skew = 0.5;
    std::string g_out;
    gen->add_option("--n", g_n, "Triples to generate");
    gen->add_option("--ns", g_ns, "Subject pool size");
    gen->add_option("--np", g_np, "Predicate pool size");
    gen->add_option("--no", g_no, "Object pool size");
    gen->add_option("--skew", g_skew, "Predicate skew in [0,1)");
    gen->add_option("--seed", g_seed, "Generator seed");
    gen->add_option("-o,--output", g_out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (build->parsed()) {
            return cmd_build(b_input, b_output, b_mode, b_tpsi, b_format, b_adaptive, b_nodict);
        }
        if (query->parsed()) return cmd_query(q_index, q_pattern, q_strategy, q_limit, q_ids);
        if (join->parsed()) {
            if (!j_class.empty()) return cmd_join_catalog(j_class);
            if (j_index.empty() || j_left.empty() || j_right.empty()) {
                std::cerr << "error: join needs an index, --left, and --right\n";
                return kExitUsage;
            }
            return cmd_join(j_index, j_left, j_right, j_kind, j_strategy, j_ids, j_nosof, j_nodedup,
                            j_nodefer);
        }
        if (verify->parsed()) return cmd_verify(v_index, v_json);
        if (stats->parsed()) return cmd_stats(s_index, s_json);
        if (gen->parsed()) return cmd_gen(g_n, g_ns, g_np, g_no, g_skew, g_seed, g_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
