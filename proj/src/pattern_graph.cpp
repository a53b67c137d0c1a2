#include "mirviz/pattern_graph.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "mirviz/error.hpp"

namespace mirviz {

namespace {

bool is_integer(const Symbol& s) {
    if (s.empty()) return false;
    const std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) return false;
    return std::all_of(s.begin() + long(start), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

// Compares integer strings by value without overflow: sign, then length, then digits.
int compare_integers(const Symbol& a, const Symbol& b) {
    auto split = [](const Symbol& s) {
        const bool neg = s[0] == '-';
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        while (i + 1 < s.size() && s[i] == '0') ++i;
        std::string digits = s.substr(i);
        return std::make_pair(neg && digits != "0", digits);
    };
    const auto [na, da] = split(a);
    const auto [nb, db] = split(b);
    if (na != nb) return na ? -1 : 1;
    int mag = da.size() != db.size() ? (da.size() < db.size() ? -1 : 1) : da.compare(db);
    mag = mag < 0 ? -1 : (mag > 0 ? 1 : 0);
    return na ? -mag : mag;
}

bool is_dot_id(const Symbol& s) {
    if (s.empty()) return false;
    if (is_integer(s) && s[0] != '+') return true;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

std::string dot_id(const Symbol& s) {
    if (is_dot_id(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

bool SymbolLess::operator()(const Symbol& a, const Symbol& b) const {
    const bool ia = is_integer(a), ib = is_integer(b);
    if (ia && ib) {
        const int c = compare_integers(a, b);
        return c != 0 ? c < 0 : a < b;
    }
    if (ia != ib) return ia;
    return a < b;
}

bool EdgeKeyLess::operator()(const EdgeKey& a, const EdgeKey& b) const {
    SymbolLess less;
    if (less(a.src, b.src)) return true;
    if (less(b.src, a.src)) return false;
    if (less(a.dst, b.dst)) return true;
    if (less(b.dst, a.dst)) return false;
    return a.word < b.word;
}

char to_char(PatternWord w) { return w == PatternWord::F ? 'F' : 'T'; }

std::vector<Run> run_length_encode(const SymbolSequence& seq) {
    std::vector<Run> runs;
    for (const auto& s : seq) {
        if (!runs.empty() && runs.back().symbol == s)
            ++runs.back().length;
        else
            runs.push_back({s, 1});
    }
    return runs;
}

int PatternGraph::edge_count(const Symbol& src, const Symbol& dst, PatternWord word) const {
    const auto it = edges.find({src, dst, word});
    return it == edges.end() ? 0 : it->second;
}

bool PatternGraph::operator==(const PatternGraph& o) const {
    if (nodes.size() != o.nodes.size() || edges.size() != o.edges.size()) return false;
    for (auto a = nodes.begin(), b = o.nodes.begin(); a != nodes.end(); ++a, ++b)
        if (a->first != b->first || a->second.is_start != b->second.is_start || a->second.is_end != b->second.is_end)
            return false;
    for (auto a = edges.begin(), b = o.edges.begin(); a != edges.end(); ++a, ++b)
        if (a->first.src != b->first.src || a->first.dst != b->first.dst || a->first.word != b->first.word ||
            a->second != b->second)
            return false;
    return true;
}

void PatternGraph::validate() const {
    bool any_start = false, any_end = false;
    for (const auto& [sym, flags] : nodes) {
        any_start |= flags.is_start;
        any_end |= flags.is_end;
    }
    if (!any_start || !any_end) throw Error(Errc::InvalidArgument, "pattern graph needs a start and an end node");
    for (const auto& [key, count] : edges) {
        if (!nodes.contains(key.src) || !nodes.contains(key.dst))
            throw Error(Errc::InvalidArgument, "edge endpoint missing from nodes");
        if (count < 1) throw Error(Errc::InvalidArgument, "edge count must be >= 1");
    }
}

PatternGraph learn_pattern_graph(const std::vector<SymbolSequence>& sequences) {
    if (sequences.empty()) throw Error(Errc::EmptyInput, "no sequences");
    PatternGraph g;
    for (const auto& seq : sequences) {
        if (seq.empty()) throw Error(Errc::EmptyInput, "empty sequence");
        const auto runs = run_length_encode(seq);
        for (const auto& r : runs) g.nodes[r.symbol];
        g.nodes[runs.front().symbol].is_start = true;
        g.nodes[runs.back().symbol].is_end = true;
        for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
            const PatternWord word = runs[i].length >= 2 ? PatternWord::T : PatternWord::F;
            ++g.edges[{runs[i].symbol, runs[i + 1].symbol, word}];
        }
    }
    return g;
}

std::string to_string(ConformanceReason reason) {
    switch (reason) {
        case ConformanceReason::Accepted: return "Accepted";
        case ConformanceReason::NotStart: return "NotStart";
        case ConformanceReason::NotEnd: return "NotEnd";
        case ConformanceReason::MissingEdge: return "MissingEdge";
    }
    return "Accepted";
}

ConformanceResult check_sequence(const PatternGraph& graph, const SymbolSequence& seq) {
    ConformanceResult res;
    auto reject = [&](ConformanceReason why, std::size_t run, std::optional<PatternWord> word = std::nullopt) {
        res.accepted = false;
        res.reason = why;
        res.run_index = run;
        res.missing_word = word;
        return res;
    };
    if (seq.empty()) return reject(ConformanceReason::NotStart, 0);

    const auto runs = run_length_encode(seq);
    const auto first = graph.nodes.find(runs.front().symbol);
    if (first == graph.nodes.end() || !first->second.is_start) return reject(ConformanceReason::NotStart, 0);

    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        const PatternWord word = runs[i].length >= 2 ? PatternWord::T : PatternWord::F;
        if (graph.edge_count(runs[i].symbol, runs[i + 1].symbol, word) == 0)
            return reject(ConformanceReason::MissingEdge, i, word);
    }

    const auto last = graph.nodes.find(runs.back().symbol);
    if (last == graph.nodes.end() || !last->second.is_end)
        return reject(ConformanceReason::NotEnd, runs.size() - 1);
    return res;
}

std::string export_dot(const PatternGraph& graph) {
    std::ostringstream out;
    out << "digraph pattern {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=circle];\n";
    std::size_t start_index = 0;
    for (const auto& [sym, flags] : graph.nodes) {
        out << "  " << dot_id(sym);
        if (flags.is_end) out << " [shape=doublecircle]";
        out << ";\n";
    }
    for (const auto& [sym, flags] : graph.nodes) {
        if (!flags.is_start) continue;
        const std::string aux = "__start" + std::to_string(start_index++);
        out << "  " << aux << " [shape=point, style=invis];\n";
        out << "  " << aux << " -> " << dot_id(sym) << ";\n";
    }
    for (const auto& [key, count] : graph.edges)
        out << "  " << dot_id(key.src) << " -> " << dot_id(key.dst) << " [label=\"" << to_char(key.word) << ", "
            << count << "\"];\n";
    out << "}\n";
    return out.str();
}

std::vector<SymbolSequence> parse_sequences(const std::string& text) {
    std::vector<SymbolSequence> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream words(line);
        SymbolSequence seq;
        for (std::string w; words >> w;) seq.push_back(w);
        if (!seq.empty()) out.push_back(std::move(seq));
    }
    return out;
}

SymbolSequence chord_degree_sequence(const NoteList& notes, int root) {
    if (notes.notes.empty()) throw Error(Errc::EmptyList, "no notes");
    SymbolSequence seq;
    for (const auto& n : notes.notes) seq.push_back(std::to_string(pitch_class(n.pitch - root)));
    return seq;
}

}  // namespace mirviz
