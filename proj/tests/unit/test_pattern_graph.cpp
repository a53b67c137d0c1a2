#include <algorithm>
#include <random>

#include "doctest.h"
#include "mirviz/pattern_graph.hpp"
#include "test_util.hpp"

using namespace mirviz;
using testutil::error_code;

namespace {

SymbolSequence seq(std::initializer_list<const char*> xs) { return SymbolSequence(xs.begin(), xs.end()); }

// Brute force: walk the raw sequence, close a run whenever the symbol changes.
std::map<std::tuple<std::string, std::string, char>, int> oracle_edges(const std::vector<SymbolSequence>& seqs) {
    std::map<std::tuple<std::string, std::string, char>, int> out;
    for (const auto& s : seqs) {
        std::size_t len = 1;
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (s[i] == s[i - 1]) {
                ++len;
                continue;
            }
            ++out[{s[i - 1], s[i], len >= 2 ? 'T' : 'F'}];
            len = 1;
        }
    }
    return out;
}

std::vector<SymbolSequence> random_sequences(std::mt19937& gen, int count) {
    std::uniform_int_distribution<int> len(1, 12), sym(0, 3);
    std::vector<SymbolSequence> out;
    for (int k = 0; k < count; ++k) {
        SymbolSequence s;
        const int n = len(gen);
        for (int i = 0; i < n; ++i) s.push_back(std::string(1, char('a' + sym(gen))));
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST_CASE("run length encoding") {
    const auto runs = run_length_encode(seq({"10", "10", "7", "7", "7", "10"}));
    REQUIRE(runs.size() == 3);
    CHECK(runs[0].symbol == "10");
    CHECK(runs[0].length == 2);
    CHECK(runs[1].length == 3);
    CHECK(runs[2].length == 1);
    CHECK(run_length_encode({}).empty());
}

TEST_CASE("learn [10,10,7] gives one T edge") {
    const auto g = learn_pattern_graph({seq({"10", "10", "7"})});
    REQUIRE(g.nodes.size() == 2);
    CHECK(g.nodes.at("10").is_start);
    CHECK_FALSE(g.nodes.at("10").is_end);
    CHECK(g.nodes.at("7").is_end);
    CHECK_FALSE(g.nodes.at("7").is_start);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edge_count("10", "7", PatternWord::T) == 1);
    CHECK(g.edge_count("10", "7", PatternWord::F) == 0);
}

TEST_CASE("single symbol graph") {
    const auto g = learn_pattern_graph({seq({"a"})});
    REQUIRE(g.nodes.size() == 1);
    CHECK(g.nodes.at("a").is_start);
    CHECK(g.nodes.at("a").is_end);
    CHECK(g.edges.empty());
}

TEST_CASE("alternating sequence") {
    const auto g = learn_pattern_graph({seq({"a", "b", "a", "b"})});
    CHECK(g.edges.size() == 2);
    CHECK(g.edge_count("a", "b", PatternWord::F) == 2);
    CHECK(g.edge_count("b", "a", PatternWord::F) == 1);
    CHECK(g.nodes.at("a").is_start);
    CHECK(g.nodes.at("b").is_end);
}

TEST_CASE("conformance examples") {
    const auto g = learn_pattern_graph({seq({"10", "10", "7"})});
    CHECK(check_sequence(g, seq({"10", "10", "10", "7"})).accepted);
    CHECK(check_sequence(g, seq({"10", "10", "7"})).accepted);

    const auto r = check_sequence(g, seq({"10", "7"}));
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == ConformanceReason::MissingEdge);
    CHECK(r.run_index == std::optional<std::size_t>(0));
    CHECK(r.missing_word == std::optional<PatternWord>(PatternWord::F));

    const auto s = check_sequence(g, seq({"7"}));
    CHECK_FALSE(s.accepted);
    CHECK(s.reason == ConformanceReason::NotStart);
    CHECK(s.run_index == std::optional<std::size_t>(0));

    const auto e = check_sequence(g, seq({"10", "10"}));
    CHECK_FALSE(e.accepted);
    CHECK(e.reason == ConformanceReason::NotEnd);

    const auto u = check_sequence(g, seq({"10", "10", "3"}));
    CHECK(u.reason == ConformanceReason::MissingEdge);
    CHECK(u.missing_word == std::optional<PatternWord>(PatternWord::T));
    CHECK(check_sequence(g, {}).reason == ConformanceReason::NotStart);
}

TEST_CASE("edge counts match a brute-force oracle") {
    std::mt19937 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto seqs = random_sequences(gen, 5);
        const auto g = learn_pattern_graph(seqs);
        const auto expect = oracle_edges(seqs);
        std::map<std::tuple<std::string, std::string, char>, int> got;
        int total = 0;
        for (const auto& [k, c] : g.edges) {
            got[{k.src, k.dst, to_char(k.word)}] = c;
            total += c;
        }
        CHECK(got == expect);

        int boundaries = 0;
        for (const auto& s : seqs) boundaries += int(run_length_encode(s).size()) - 1;
        CHECK(total == boundaries);
    }
}

TEST_CASE("order insensitive and self-consistent") {
    std::mt19937 gen(11);
    for (int trial = 0; trial < 30; ++trial) {
        auto seqs = random_sequences(gen, 6);
        const auto g = learn_pattern_graph(seqs);
        for (const auto& s : seqs) CHECK(check_sequence(g, s).accepted);
        std::shuffle(seqs.begin(), seqs.end(), gen);
        CHECK(learn_pattern_graph(seqs) == g);
        CHECK(export_dot(learn_pattern_graph(seqs)) == export_dot(g));
    }
}

TEST_CASE("learn errors") {
    CHECK(error_code([] { learn_pattern_graph({}); }) == Errc::EmptyInput);
    CHECK(error_code([] { learn_pattern_graph({SymbolSequence{}}); }) == Errc::EmptyInput);
}

TEST_CASE("validate") {
    PatternGraph g = learn_pattern_graph({seq({"a", "b"})});
    CHECK_NOTHROW(g.validate());
    PatternGraph dangling = g;
    dangling.edges[{"a", "z", PatternWord::F}] = 1;
    CHECK(error_code([&] { dangling.validate(); }) == Errc::InvalidArgument);
    PatternGraph zero = g;
    zero.edges[{"a", "b", PatternWord::F}] = 0;
    CHECK(error_code([&] { zero.validate(); }) == Errc::InvalidArgument);
    PatternGraph no_end = g;
    no_end.nodes["b"].is_end = false;
    CHECK(error_code([&] { no_end.validate(); }) == Errc::InvalidArgument);
}

TEST_CASE("dot export") {
    const auto g = learn_pattern_graph({seq({"10", "10", "7"})});
    const std::string dot = export_dot(g);
    CHECK(dot.find("10 -> 7 [label=\"T, 1\"];") != std::string::npos);
    CHECK(dot.find("7 [shape=doublecircle];") != std::string::npos);
    CHECK(dot.find("__start0 -> 10;") != std::string::npos);
    CHECK(dot.find("style=invis") != std::string::npos);
    CHECK(dot == export_dot(learn_pattern_graph({seq({"10", "10", "7"})})));

    const std::string golden =
        "digraph pattern {\n"
        "  rankdir=LR;\n"
        "  node [shape=circle];\n"
        "  7 [shape=doublecircle];\n"
        "  10;\n"
        "  __start0 [shape=point, style=invis];\n"
        "  __start0 -> 10;\n"
        "  10 -> 7 [label=\"T, 1\"];\n"
        "}\n";
    CHECK(dot == golden);

    const std::string single = export_dot(learn_pattern_graph({seq({"x"})}));
    CHECK(single.find("x [shape=doublecircle];") != std::string::npos);
    CHECK(single.find("__start0 -> x;") != std::string::npos);
    CHECK(single.find("label") == std::string::npos);
}

TEST_CASE("dot quotes awkward symbols") {
    const auto g = learn_pattern_graph({seq({"C#", "a\"b"})});
    const std::string dot = export_dot(g);
    CHECK(dot.find("\"C#\" -> \"a\\\"b\"") != std::string::npos);
}

TEST_CASE("numeric symbol order") {
    SymbolLess less;
    CHECK(less("2", "10"));
    CHECK(less("-3", "2"));
    CHECK(less("10", "a"));
    CHECK_FALSE(less("10", "2"));
}

TEST_CASE("parse sequences") {
    const auto s = parse_sequences("10 10 7\n\n  5 7\t1  \n");
    REQUIRE(s.size() == 2);
    CHECK(s[0] == seq({"10", "10", "7"}));
    CHECK(s[1] == seq({"5", "7", "1"}));
    CHECK(parse_sequences("  \n").empty());
}

TEST_CASE("chord degrees") {
    NoteList notes;
    for (int p : {62, 62, 57, 48}) notes.notes.push_back({0, 1, p});
    CHECK(chord_degree_sequence(notes, 0) == seq({"2", "2", "9", "0"}));
    CHECK(chord_degree_sequence(notes, 4) == seq({"10", "10", "5", "8"}));
    CHECK(error_code([] { chord_degree_sequence(NoteList{}, 0); }) == Errc::EmptyList);
}
