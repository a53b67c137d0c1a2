#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "mirviz/symbolic.hpp"

namespace mirviz {

/// Symbols are kept as text; integer-looking symbols order numerically.
using Symbol = std::string;

struct SymbolLess {
    bool operator()(const Symbol& a, const Symbol& b) const;
};

using SymbolSequence = std::vector<Symbol>;

/// F: b follows a single a. T: b follows two or more repetitions of a.
enum class PatternWord { F, T };

char to_char(PatternWord w);

struct Run {
    Symbol symbol;
    std::size_t length;
};

std::vector<Run> run_length_encode(const SymbolSequence& seq);

struct NodeFlags {
    bool is_start = false;
    bool is_end = false;
};

struct EdgeKey {
    Symbol src;
    Symbol dst;
    PatternWord word;
};

struct EdgeKeyLess {
    bool operator()(const EdgeKey& a, const EdgeKey& b) const;
};

/// Labelled directed multigraph over descriptor values with (word, count) edges.
struct PatternGraph {
    std::map<Symbol, NodeFlags, SymbolLess> nodes;
    std::map<EdgeKey, int, EdgeKeyLess> edges;

    int edge_count(const Symbol& src, const Symbol& dst, PatternWord word) const;
    bool operator==(const PatternGraph& o) const;

    /// Throws InvalidArgument on dangling endpoints, non-positive counts, or a
    /// missing start/end node.
    void validate() const;
};

/// Accumulates run-boundary patterns over all sequences. Throws EmptyInput.
PatternGraph learn_pattern_graph(const std::vector<SymbolSequence>& sequences);

enum class ConformanceReason { Accepted, NotStart, NotEnd, MissingEdge };

std::string to_string(ConformanceReason reason);

struct ConformanceResult {
    bool accepted = true;
    ConformanceReason reason = ConformanceReason::Accepted;
    /// Index of the offending run (for MissingEdge, the source run of the pair).
    std::optional<std::size_t> run_index;
    std::optional<PatternWord> missing_word;
};

ConformanceResult check_sequence(const PatternGraph& graph, const SymbolSequence& seq);

/// Graphviz digraph: start nodes get an invisible source with an unlabeled
/// arrow, end nodes are double circles, edges are labeled "word, count".
std::string export_dot(const PatternGraph& graph);

/// One whitespace-separated phrase per non-blank line.
std::vector<SymbolSequence> parse_sequences(const std::string& text);

/// Chord degrees (pitch - root) mod 12 of the notes in onset order.
SymbolSequence chord_degree_sequence(const NoteList& notes, int root);

}  // namespace mirviz
