#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "mirviz/beat_sync.hpp"
#include "mirviz/feature_matrix.hpp"
#include "mirviz/pattern_graph.hpp"
#include "mirviz/reduce.hpp"
#include "mirviz/render.hpp"
#include "mirviz/similarity.hpp"
#include "mirviz/symbolic.hpp"

namespace mirviz {

using nlohmann::json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// FeatureMatrix: CSV header "frame_time,<labels...>", JSON {kind, frame_times, dim_labels, values}.
std::string feature_matrix_to_csv(const FeatureMatrix& m);
json feature_matrix_to_json(const FeatureMatrix& m);
FeatureMatrix feature_matrix_from_json(const json& j);
/// Kind is inferred from the label prefixes ("hz:", "mfcc:", "note:", "pc:", "onset").
FeatureMatrix feature_matrix_from_csv(const std::string& text);

/// Numeric CSV with a header row; the first column is a key (time or index).
struct NumericTable {
    std::vector<std::string> header;
    std::vector<double> keys;
    Eigen::MatrixXd values;
};

NumericTable parse_numeric_table(const std::string& text);
/// Headerless or headed square/rectangular matrix CSV (no key column).
Eigen::MatrixXd parse_matrix_csv(const std::string& text);
std::string matrix_to_csv(const Eigen::MatrixXd& m);

// Embedding: CSV "index,c0,c1,...", JSON with method metadata.
std::string embedding_to_csv(const Embedding& e);
json embedding_to_json(const Embedding& e);

json validity_report_to_json(const ValidityReport& r);
json profile_to_json(const PitchClassProfile& p);
json boxplot_stats_to_json(const BoxplotStats& s);
json key_estimate_to_json(const KeyEstimate& k);
json conformance_to_json(const ConformanceResult& r);

// PatternGraph JSON: {nodes: [{symbol, start, end}], edges: [{src, dst, word, count}]}.
json pattern_graph_to_json(const PatternGraph& g);
PatternGraph pattern_graph_from_json(const json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mirviz
