#include "mirviz/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mirviz/error.hpp"

namespace mirviz {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    for (auto& f : out) {
        const auto a = f.find_first_not_of(" \t");
        const auto b = f.find_last_not_of(" \t");
        f = a == std::string::npos ? std::string() : f.substr(a, b - a + 1);
    }
    return out;
}

bool try_parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

double parse_field(const std::string& s, int line_no) {
    double v = 0;
    if (!try_parse_double(s, v))
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": '" + s + "' is not a number");
    return v;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

FeatureKind infer_kind(const std::vector<std::string>& labels) {
    if (labels.empty()) return FeatureKind::embedding;
    auto all_prefixed = [&](const std::string& prefix) {
        for (const auto& l : labels)
            if (l.rfind(prefix, 0) != 0) return false;
        return true;
    };
    if (all_prefixed("hz:")) return FeatureKind::spectrogram;
    if (all_prefixed("mfcc:")) return FeatureKind::mfcc;
    if (all_prefixed("note:")) return FeatureKind::cqt;
    if (all_prefixed("pc:") && labels.size() == 12) return FeatureKind::chroma;
    if (labels.size() == 1 && labels[0] == "onset") return FeatureKind::onset;
    return FeatureKind::embedding;
}

}  // namespace

std::string format_double(double v) {
    if (v == 0) return "0";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string feature_matrix_to_csv(const FeatureMatrix& m) {
    std::string out = "frame_time";
    for (const auto& l : m.dim_labels) out += "," + l;
    out += "\n";
    for (Eigen::Index t = 0; t < m.n_frames(); ++t) {
        out += format_double(m.frame_times[std::size_t(t)]);
        for (Eigen::Index d = 0; d < m.n_dims(); ++d) out += "," + format_double(m.values(t, d));
        out += "\n";
    }
    return out;
}

json feature_matrix_to_json(const FeatureMatrix& m) {
    json values = json::array();
    for (Eigen::Index t = 0; t < m.n_frames(); ++t) {
        json row = json::array();
        for (Eigen::Index d = 0; d < m.n_dims(); ++d) row.push_back(m.values(t, d));
        values.push_back(std::move(row));
    }
    return {{"kind", to_string(m.kind)}, {"frame_times", m.frame_times}, {"dim_labels", m.dim_labels}, {"values", values}};
}

FeatureMatrix feature_matrix_from_json(const json& j) {
    FeatureMatrix m;
    try {
        m.kind = parse_feature_kind(j.at("kind").get<std::string>());
        m.frame_times = j.at("frame_times").get<std::vector<double>>();
        m.dim_labels = j.at("dim_labels").get<std::vector<std::string>>();
        const auto& rows = j.at("values");
        m.values.resize(Eigen::Index(rows.size()), Eigen::Index(m.dim_labels.size()));
        for (std::size_t t = 0; t < rows.size(); ++t) {
            if (rows[t].size() != m.dim_labels.size()) throw Error(Errc::ParseError, "ragged values row");
            for (std::size_t d = 0; d < rows[t].size(); ++d) m.values(Eigen::Index(t), Eigen::Index(d)) = rows[t][d].get<double>();
        }
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, e.what());
    }
    m.validate();
    return m;
}

NumericTable parse_numeric_table(const std::string& text) {
    const auto rows = csv_rows(text);
    if (rows.empty()) throw Error(Errc::ParseError, "empty table");
    NumericTable t;
    t.header = rows.front();
    if (t.header.size() < 2) throw Error(Errc::ParseError, "table needs a key column and at least one value column");
    const auto n_cols = Eigen::Index(t.header.size() - 1);
    t.values.resize(Eigen::Index(rows.size() - 1), n_cols);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const int line_no = int(r) + 1;
        if (rows[r].size() != t.header.size())
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(t.header.size()) + " fields");
        t.keys.push_back(parse_field(rows[r][0], line_no));
        for (Eigen::Index c = 0; c < n_cols; ++c)
            t.values(Eigen::Index(r - 1), c) = parse_field(rows[r][std::size_t(c + 1)], line_no);
    }
    return t;
}

FeatureMatrix feature_matrix_from_csv(const std::string& text) {
    const NumericTable t = parse_numeric_table(text);
    FeatureMatrix m;
    m.dim_labels.assign(t.header.begin() + 1, t.header.end());
    m.kind = infer_kind(m.dim_labels);
    m.frame_times = t.keys;
    m.values = t.values;
    m.validate();
    return m;
}

Eigen::MatrixXd parse_matrix_csv(const std::string& text) {
    auto rows = csv_rows(text);
    if (rows.empty()) throw Error(Errc::ParseError, "empty matrix");
    double probe = 0;
    if (!try_parse_double(rows.front().front(), probe)) rows.erase(rows.begin());
    if (rows.empty()) throw Error(Errc::ParseError, "matrix has a header but no rows");
    Eigen::MatrixXd m(Eigen::Index(rows.size()), Eigen::Index(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.front().size()) throw Error(Errc::ParseError, "ragged matrix row " + std::to_string(r + 1));
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(Eigen::Index(r), Eigen::Index(c)) = parse_field(rows[r][c], int(r) + 1);
    }
    return m;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
    std::string out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out += (c ? "," : "") + format_double(m(r, c));
        out += "\n";
    }
    return out;
}

std::string embedding_to_csv(const Embedding& e) {
    std::string out = "index";
    for (Eigen::Index c = 0; c < e.points.cols(); ++c) out += ",c" + std::to_string(c);
    out += "\n";
    for (Eigen::Index i = 0; i < e.points.rows(); ++i) {
        out += std::to_string(i);
        for (Eigen::Index c = 0; c < e.points.cols(); ++c) out += "," + format_double(e.points(i, c));
        out += "\n";
    }
    return out;
}

json embedding_to_json(const Embedding& e) {
    json points = json::array();
    for (Eigen::Index i = 0; i < e.points.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < e.points.cols(); ++c) row.push_back(e.points(i, c));
        points.push_back(std::move(row));
    }
    json j = {{"method", to_string(e.method)}, {"points", points}};
    if (e.method == ReduceMethod::pca) j["explained_variance"] = e.explained_variance;
    if (e.seed) j["seed"] = *e.seed;
    if (e.method == ReduceMethod::mds) j["negative_eigenvalues"] = e.negative_eigenvalues;
    return j;
}

json validity_report_to_json(const ValidityReport& r) {
    json angles = json::array();
    for (Eigen::Index i = 0; i < r.angles.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < r.angles.cols(); ++j) row.push_back(r.angles(i, j));
        angles.push_back(std::move(row));
    }
    json violations = json::array();
    for (const auto& t : r.triangle_violations) violations.push_back({t[0], t[1], t[2]});
    return {{"symmetric", r.symmetric},     {"unit_diagonal", r.unit_diagonal}, {"entries_in_range", r.entries_in_range},
            {"min_eigenvalue", r.min_eigenvalue}, {"psd", r.psd},             {"valid", r.valid()},
            {"angles", angles},             {"triangle_violations", violations}};
}

json profile_to_json(const PitchClassProfile& p) {
    std::vector<double> w(p.weights.data(), p.weights.data() + 12);
    return {{"normalization", p.normalization == Normalization::raw ? "raw" : "probability"}, {"weights", w}};
}

json boxplot_stats_to_json(const BoxplotStats& s) {
    return {{"min", s.min},
            {"q1", s.q1},
            {"median", s.median},
            {"q3", s.q3},
            {"max", s.max},
            {"whisker_low", s.whisker_low},
            {"whisker_high", s.whisker_high},
            {"outliers", s.outliers}};
}

json key_estimate_to_json(const KeyEstimate& k) {
    return {{"tonic", k.tonic}, {"mode", to_string(k.mode)}, {"score", k.score}};
}

json conformance_to_json(const ConformanceResult& r) {
    json j = {{"accepted", r.accepted}, {"reason", to_string(r.reason)}};
    if (r.run_index) j["run_index"] = *r.run_index;
    if (r.missing_word) j["missing_word"] = std::string(1, to_char(*r.missing_word));
    return j;
}

json pattern_graph_to_json(const PatternGraph& g) {
    json nodes = json::array(), edges = json::array();
    for (const auto& [sym, f] : g.nodes) nodes.push_back({{"symbol", sym}, {"start", f.is_start}, {"end", f.is_end}});
    for (const auto& [k, count] : g.edges)
        edges.push_back({{"src", k.src}, {"dst", k.dst}, {"word", std::string(1, to_char(k.word))}, {"count", count}});
    return {{"nodes", nodes}, {"edges", edges}};
}

PatternGraph pattern_graph_from_json(const json& j) {
    PatternGraph g;
    auto symbol = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    try {
        for (const auto& n : j.at("nodes")) g.nodes[symbol(n.at("symbol"))] = {n.at("start").get<bool>(), n.at("end").get<bool>()};
        for (const auto& e : j.at("edges")) {
            const std::string word = e.at("word").get<std::string>();
            if (word != "F" && word != "T") throw Error(Errc::ParseError, "unknown pattern word '" + word + "'");
            g.edges[{symbol(e.at("src")), symbol(e.at("dst")), word == "F" ? PatternWord::F : PatternWord::T}] =
                e.at("count").get<int>();
        }
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, e.what());
    }
    g.validate();
    return g;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::InvalidArgument, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path);
    out << text;
}

}  // namespace mirviz
