#include "mirviz/cli.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "mirviz/audio_io.hpp"
#include "mirviz/beat_sync.hpp"
#include "mirviz/error.hpp"
#include "mirviz/pattern_graph.hpp"
#include "mirviz/reduce.hpp"
#include "mirviz/render.hpp"
#include "mirviz/serialize.hpp"
#include "mirviz/similarity.hpp"
#include "mirviz/spectral.hpp"
#include "mirviz/symbolic.hpp"

namespace mirviz::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Params {
    std::string input;
    std::string output;
    std::string sidecar;
    std::string config;

    int frame_length = 2048;
    int hop = 512;
    std::string window = "hann";
    int n_mels = 40;
    int n_mfcc = 20;
    double f_min = 32.7032;
    int bins_per_octave = 12;
    int n_bins = 84;

    std::string beats;
    bool estimate_beats = false;
    std::string aggregate = "median";

    std::string ppm;
    std::string svg;
    std::string json_out;
    std::string dot;
    std::string colormap = "gray";
    bool invert = false;

    std::string metric = "cosine";
    std::string mds_metric = "euclidean";
    int k = 2;
    double perplexity = 30;
    std::uint64_t seed = 42;
    int iterations = 1000;
    double alpha = 0.05;

    int column_width = 4;
    int height = 64;
    int label_stride = 10;

    std::string weighting = "count";
    std::string normalization = "probability";
    std::string set_a;
    std::string set_b;

    std::string graph;
    std::string notes;
    int root = 0;
};

// What a handler produced: effective parameters and files to write, in order.
struct RunResult {
    json parameters = json::object();
    std::vector<std::string> inputs;
    std::vector<std::pair<std::string, std::string>> files;  // path, bytes
    std::string stdout_text;
};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_json_path(const std::string& path) { return ends_with(path, ".json"); }

std::string bytes_to_string(const std::vector<std::uint8_t>& bytes) { return std::string(bytes.begin(), bytes.end()); }

void require(const std::string& value, const std::string& what) {
    if (value.empty()) throw UsageError(what + " is required");
}

// Primary output goes to the named file, or to stdout when no path is given.
void emit(RunResult& r, const std::string& path, std::string text) {
    if (path.empty() || path == "-")
        r.stdout_text += text;
    else
        r.files.emplace_back(path, std::move(text));
}

FrameSpec frame_spec(const Params& p) {
    FrameSpec spec;
    spec.frame_length = p.frame_length;
    spec.hop = p.hop;
    spec.window = parse_window_kind(p.window);
    spec.validate();
    return spec;
}

void record_frame_params(json& j, const Params& p, int sample_rate) {
    j["frame-length"] = p.frame_length;
    j["hop"] = p.hop;
    j["window"] = p.window;
    j["sample-rate"] = sample_rate;
}

FeatureMatrix read_features(const std::string& path) {
    const std::string text = read_text_file(path);
    if (is_json_path(path)) {
        try {
            return feature_matrix_from_json(json::parse(text));
        } catch (const json::exception& e) {
            throw Error(Errc::ParseError, e.what());
        }
    }
    return feature_matrix_from_csv(text);
}

std::string features_text(const FeatureMatrix& m, const std::string& path) {
    return is_json_path(path) ? feature_matrix_to_json(m).dump(2) + "\n" : feature_matrix_to_csv(m);
}

Eigen::MatrixXd read_points(const std::string& path) {
    const std::string text = read_text_file(path);
    if (is_json_path(path)) {
        try {
            const json j = json::parse(text);
            const auto& rows = j.at("points");
            if (rows.empty()) throw Error(Errc::EmptyEmbedding, "no points");
            Eigen::MatrixXd m(Eigen::Index(rows.size()), Eigen::Index(rows[0].size()));
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].size() != rows[0].size()) throw Error(Errc::ParseError, "ragged points");
                for (std::size_t c = 0; c < rows[i].size(); ++c) m(Eigen::Index(i), Eigen::Index(c)) = rows[i][c].get<double>();
            }
            return m;
        } catch (const json::exception& e) {
            throw Error(Errc::ParseError, e.what());
        }
    }
    return parse_numeric_table(text).values;
}

NoteList read_notes(const std::string& path) {
    if (ends_with(path, ".mid") || ends_with(path, ".midi") || ends_with(path, ".smf")) return read_smf_file(path);
    return parse_note_csv(read_text_file(path));
}

PitchClassSet parse_set(const std::string& text) {
    std::vector<int> classes;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        if (token.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            std::size_t used = 0;
            classes.push_back(std::stoi(token, &used));
            if (token.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(token);
        } catch (const std::logic_error&) {
            throw UsageError("'" + token + "' is not a pitch class");
        }
    }
    return PitchClassSet::from_vector(classes);
}

json set_to_json(const PitchClassSet& s) { return s.members(); }

const std::vector<std::string> kPitchClassNames = {"C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};

// ---------------------------------------------------------------------------

RunResult cmd_features(const Params& p, const std::string& type) {
    require(p.input, "input WAV");
    if (!p.beats.empty() && p.estimate_beats) throw UsageError("--beats and --estimate-beats are mutually exclusive");
    RunResult r;
    r.inputs.push_back(p.input);
    const AudioBuffer audio = read_wav_file(p.input);
    const FrameSpec spec = frame_spec(p);
    record_frame_params(r.parameters, p, audio.sample_rate);
    r.parameters["type"] = type;

    FeatureMatrix fm;
    if (type == "stft") {
        fm = stft_power(audio, spec);
    } else if (type == "mfcc") {
        fm = mfcc(audio, spec, p.n_mels, p.n_mfcc);
        r.parameters["n-mels"] = p.n_mels;
        r.parameters["n-mfcc"] = p.n_mfcc;
    } else {
        CqtSpec cs;
        cs.f_min = p.f_min;
        cs.bins_per_octave = p.bins_per_octave;
        cs.n_bins = p.n_bins;
        fm = cqt(audio, spec, cs);
        if (type == "chroma") fm = chroma(fm);
        r.parameters["f-min"] = p.f_min;
        r.parameters["bins-per-octave"] = p.bins_per_octave;
        r.parameters["n-bins"] = p.n_bins;
    }

    if (!p.beats.empty() || p.estimate_beats) {
        BeatGrid grid;
        if (!p.beats.empty()) {
            grid = load_beats(read_text_file(p.beats));
            r.inputs.push_back(p.beats);
            r.parameters["beats"] = p.beats;
        } else {
            grid = estimate_beats(onset_envelope(stft_power(audio, spec)), audio.duration());
            r.parameters["estimate-beats"] = true;
            if (grid.tempo_bpm) r.parameters["tempo-bpm"] = *grid.tempo_bpm;
        }
        fm = beat_aggregate(fm, grid, parse_aggregation(p.aggregate));
        r.parameters["aggregate"] = p.aggregate;
        r.parameters["n-beats"] = grid.beat_times.size();
    }

    std::string ppm;
    if (!p.ppm.empty()) {
        ppm = bytes_to_string(encode_ppm(render_heatmap(fm.values.transpose(), ColorMap::by_name(p.colormap), p.invert)));
        r.parameters["colormap"] = p.colormap;
        r.parameters["invert"] = p.invert;
    }
    emit(r, p.output, features_text(fm, p.output));
    if (!p.ppm.empty()) r.files.emplace_back(p.ppm, std::move(ppm));
    return r;
}

RunResult cmd_beats(const Params& p) {
    require(p.input, "input WAV");
    RunResult r;
    r.inputs.push_back(p.input);
    const AudioBuffer audio = read_wav_file(p.input);
    const FrameSpec spec = frame_spec(p);
    record_frame_params(r.parameters, p, audio.sample_rate);
    const BeatGrid grid = estimate_beats(onset_envelope(stft_power(audio, spec)), audio.duration());
    if (grid.tempo_bpm) r.parameters["tempo-bpm"] = *grid.tempo_bpm;
    r.parameters["n-beats"] = grid.beat_times.size();
    emit(r, p.output, format_beats(grid));
    return r;
}

RunResult cmd_ssm(const Params& p) {
    require(p.input, "input features");
    RunResult r;
    r.inputs.push_back(p.input);
    const FeatureMatrix fm = read_features(p.input);
    const DistanceMatrix dm = self_similarity(fm, parse_metric(p.metric));
    r.parameters["metric"] = p.metric;
    std::string ppm;
    if (!p.ppm.empty()) {
        ppm = bytes_to_string(encode_ppm(render_heatmap(dm.values, ColorMap::by_name(p.colormap), p.invert)));
        r.parameters["colormap"] = p.colormap;
        r.parameters["invert"] = p.invert;
    }
    emit(r, p.output, matrix_to_csv(dm.values));
    if (!p.ppm.empty()) r.files.emplace_back(p.ppm, std::move(ppm));
    return r;
}

RunResult cmd_reduce(const Params& p, const std::string& method) {
    require(p.input, "input features");
    RunResult r;
    r.inputs.push_back(p.input);
    const FeatureMatrix fm = read_features(p.input);
    r.parameters["method"] = method;
    r.parameters["k"] = p.k;
    Embedding e;
    if (method == "pca") {
        e = pca_project(fm, p.k);
    } else if (method == "mds") {
        e = classical_mds(self_similarity(fm, parse_metric(p.mds_metric)), p.k);
        r.parameters["metric"] = p.mds_metric;
    } else {
        TsneOptions o;
        o.k = p.k;
        o.perplexity = p.perplexity;
        o.seed = p.seed;
        o.iterations = p.iterations;
        const TsneResult t = tsne_run(fm.values, o);
        e = t.embedding;
        r.parameters["perplexity"] = p.perplexity;
        r.parameters["seed"] = p.seed;
        r.parameters["iterations"] = p.iterations;
        if (!t.cost_trace.empty()) r.parameters["final-cost"] = t.cost_trace.back().second;
    }
    emit(r, p.output, is_json_path(p.output) ? embedding_to_json(e).dump(2) + "\n" : embedding_to_csv(e));
    return r;
}

RunResult cmd_smooth(const Params& p) {
    require(p.input, "input features");
    RunResult r;
    r.inputs.push_back(p.input);
    SmoothingConfig cfg;
    cfg.alpha = p.alpha;
    if (!(cfg.alpha > 0 && cfg.alpha <= 1)) throw Error(Errc::InvalidArgument, "alpha must lie in (0, 1]");
    const FeatureMatrix out = lpf_smooth(read_features(p.input), cfg);
    r.parameters["alpha"] = p.alpha;
    emit(r, p.output, features_text(out, p.output));
    return r;
}

RunResult cmd_colorstrip(const Params& p) {
    require(p.input, "input embedding");
    require(p.output, "--output");
    RunResult r;
    r.inputs.push_back(p.input);
    const Image img = render_color_strip(read_points(p.input), p.column_width, p.height);
    r.parameters["column-width"] = p.column_width;
    r.parameters["height"] = p.height;
    r.files.emplace_back(p.output, bytes_to_string(encode_ppm(img)));
    return r;
}

RunResult cmd_trajectory(const Params& p) {
    require(p.input, "input embedding");
    RunResult r;
    r.inputs.push_back(p.input);
    const Eigen::MatrixXd points = read_points(p.input);
    if (points.cols() != 3) throw Error(Errc::WrongDimensionality, "trajectory needs 3 dimensions");
    r.parameters["label-stride"] = p.label_stride;
    emit(r, p.output, render_trajectory(points, p.label_stride));
    return r;
}

RunResult cmd_histogram(const Params& p) {
    require(p.input, "input notes");
    if (p.normalization != "raw" && p.normalization != "probability")
        throw UsageError("--normalization must be raw or probability");
    RunResult r;
    r.inputs.push_back(p.input);
    PitchClassProfile prof = pitch_class_histogram(read_notes(p.input), parse_weighting(p.weighting));
    if (p.normalization == "probability") prof = prof.normalized();
    r.parameters["weighting"] = p.weighting;
    r.parameters["normalization"] = p.normalization;
    std::string svg;
    if (!p.svg.empty()) {
        std::vector<double> heights(prof.weights.data(), prof.weights.data() + 12);
        svg = render_bar_chart(kPitchClassNames, heights);
    }
    std::string text;
    if (is_json_path(p.output) || p.output.empty()) {
        text = profile_to_json(prof).dump(2) + "\n";
    } else {
        text = "pitch_class,weight\n";
        for (int pc = 0; pc < 12; ++pc) text += std::to_string(pc) + "," + format_double(prof.weights[pc]) + "\n";
    }
    emit(r, p.output, text);
    if (!p.svg.empty()) r.files.emplace_back(p.svg, std::move(svg));
    return r;
}

RunResult cmd_transitions(const Params& p) {
    require(p.input, "input notes");
    RunResult r;
    r.inputs.push_back(p.input);
    const TransitionMatrix t = pc_transition_matrix(read_notes(p.input));
    const Eigen::MatrixXd td = t.cast<double>();
    std::string ppm;
    if (!p.ppm.empty()) {
        ppm = bytes_to_string(encode_ppm(render_heatmap(td, ColorMap::by_name(p.colormap), p.invert)));
        r.parameters["colormap"] = p.colormap;
        r.parameters["invert"] = p.invert;
    }
    std::string text;
    if (is_json_path(p.output)) {
        json rows = json::array();
        for (int i = 0; i < 12; ++i) {
            json row = json::array();
            for (int j = 0; j < 12; ++j) row.push_back(t(i, j));
            rows.push_back(row);
        }
        text = json{{"counts", rows}}.dump(2) + "\n";
    } else {
        text = matrix_to_csv(td);
    }
    emit(r, p.output, text);
    if (!p.ppm.empty()) r.files.emplace_back(p.ppm, std::move(ppm));
    return r;
}

RunResult cmd_intervals(const Params& p) {
    require(p.input, "input notes");
    RunResult r;
    r.inputs.push_back(p.input);
    const std::vector<int> steps = interval_sequence(read_notes(p.input));
    std::string svg;
    if (!p.svg.empty() && !steps.empty()) {
        std::map<int, int> hist;
        for (int s : steps) ++hist[s];
        std::vector<std::string> labels;
        std::vector<double> heights;
        for (int s = hist.begin()->first; s <= hist.rbegin()->first; ++s) {
            labels.push_back(std::to_string(s));
            heights.push_back(hist.contains(s) ? hist[s] : 0);
        }
        svg = render_bar_chart(labels, heights);
    }
    std::string text;
    if (is_json_path(p.output)) {
        text = json{{"intervals", steps}}.dump(2) + "\n";
    } else {
        text = "index,interval\n";
        for (std::size_t i = 0; i < steps.size(); ++i) text += std::to_string(i) + "," + std::to_string(steps[i]) + "\n";
    }
    emit(r, p.output, text);
    if (!p.svg.empty()) r.files.emplace_back(p.svg, std::move(svg));
    return r;
}

RunResult cmd_sets(const Params& p) {
    require(p.set_a, "--a");
    require(p.set_b, "--b");
    RunResult r;
    const PitchClassSet a = parse_set(p.set_a), b = parse_set(p.set_b);
    const SetPartition part = set_partition(a, b);
    r.parameters["a"] = set_to_json(a);
    r.parameters["b"] = set_to_json(b);
    const json j = {{"a", set_to_json(a)},
                    {"b", set_to_json(b)},
                    {"only_a", set_to_json(part.only_a)},
                    {"both", set_to_json(part.both)},
                    {"only_b", set_to_json(part.only_b)}};
    emit(r, p.output, j.dump(2) + "\n");
    return r;
}

RunResult cmd_key(const Params& p) {
    require(p.input, "input notes");
    RunResult r;
    r.inputs.push_back(p.input);
    const KeyEstimate k = estimate_key(pitch_class_histogram(read_notes(p.input), parse_weighting(p.weighting)));
    r.parameters["weighting"] = p.weighting;
    json j = key_estimate_to_json(k);
    j["tonic_name"] = kPitchClassNames[std::size_t(k.tonic)];
    emit(r, p.output, j.dump(2) + "\n");
    return r;
}

// Long-format table: one "group,value" pair per line, optional header.
std::vector<std::pair<std::string, std::vector<double>>> read_groups(const std::string& text) {
    std::vector<std::pair<std::string, std::vector<double>>> groups;
    std::map<std::string, std::size_t> index;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos)
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected group,value");
        const std::string label = line.substr(0, comma);
        const std::string field = line.substr(comma + 1);
        double v = 0;
        try {
            std::size_t used = 0;
            v = std::stod(field, &used);
            if (field.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(field);
        } catch (const std::logic_error&) {
            if (groups.empty() && index.empty() && line_no == 1) continue;  // header
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": '" + field + "' is not a number");
        }
        auto [it, fresh] = index.emplace(label, groups.size());
        if (fresh) groups.push_back({label, {}});
        groups[it->second].second.push_back(v);
    }
    return groups;
}

RunResult cmd_boxplot(const Params& p) {
    require(p.input, "input table");
    RunResult r;
    r.inputs.push_back(p.input);
    std::vector<std::pair<std::string, BoxplotStats>> stats;
    for (auto& [label, values] : read_groups(read_text_file(p.input))) stats.emplace_back(label, boxplot_stats(values));
    if (stats.empty()) throw Error(Errc::EmptyInput, "no groups");
    const std::string svg = render_boxplots(stats);
    json j = json::array();
    for (const auto& [label, s] : stats) {
        json g = boxplot_stats_to_json(s);
        g["group"] = label;
        j.push_back(g);
    }
    emit(r, p.output, svg);
    if (!p.json_out.empty()) r.files.emplace_back(p.json_out, j.dump(2) + "\n");
    return r;
}

RunResult cmd_corrcheck(const Params& p) {
    require(p.input, "input matrix");
    RunResult r;
    r.inputs.push_back(p.input);
    const Eigen::MatrixXd m = parse_matrix_csv(read_text_file(p.input));
    const ValidityReport report = validate_correlation_matrix(m);
    std::string svg, ppm;
    if (!p.svg.empty()) svg = render_polar_correlation(report);
    if (!p.ppm.empty()) {
        ppm = bytes_to_string(encode_ppm(render_heatmap(m, ColorMap::by_name(p.colormap), p.invert)));
        r.parameters["colormap"] = p.colormap;
        r.parameters["invert"] = p.invert;
    }
    emit(r, p.output, validity_report_to_json(report).dump(2) + "\n");
    if (!p.svg.empty()) r.files.emplace_back(p.svg, std::move(svg));
    if (!p.ppm.empty()) r.files.emplace_back(p.ppm, std::move(ppm));
    return r;
}

std::vector<SymbolSequence> read_sequences(const Params& p, RunResult& r) {
    if (!p.notes.empty()) {
        r.inputs.push_back(p.notes);
        r.parameters["root"] = p.root;
        return {chord_degree_sequence(read_notes(p.notes), p.root)};
    }
    require(p.input, "input phrases (or --notes)");
    r.inputs.push_back(p.input);
    return parse_sequences(read_text_file(p.input));
}

PatternGraph read_graph(const std::string& path) {
    try {
        return pattern_graph_from_json(json::parse(read_text_file(path)));
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, e.what());
    }
}

RunResult cmd_pattern_learn(const Params& p) {
    RunResult r;
    const PatternGraph g = learn_pattern_graph(read_sequences(p, r));
    emit(r, p.output, pattern_graph_to_json(g).dump(2) + "\n");
    if (!p.dot.empty()) r.files.emplace_back(p.dot, export_dot(g));
    return r;
}

RunResult cmd_pattern_check(const Params& p) {
    require(p.graph, "--graph");
    RunResult r;
    const PatternGraph g = read_graph(p.graph);
    const auto sequences = read_sequences(p, r);
    r.inputs.push_back(p.graph);
    json results = json::array();
    for (const auto& seq : sequences) {
        json j = conformance_to_json(check_sequence(g, seq));
        j["sequence"] = seq;
        results.push_back(j);
    }
    emit(r, p.output, results.dump(2) + "\n");
    return r;
}

RunResult cmd_pattern_dot(const Params& p) {
    const std::string path = p.graph.empty() ? p.input : p.graph;
    require(path, "input graph JSON");
    RunResult r;
    r.inputs.push_back(path);
    emit(r, p.output, export_dot(read_graph(path)));
    return r;
}

// ---------------------------------------------------------------------------

struct CommandTable {
    std::map<const CLI::App*, std::function<RunResult()>> handlers;
    std::map<const CLI::App*, std::string> names;
};

void add_io(CLI::App* sub, Params& p, const std::string& input_desc) {
    if (!input_desc.empty()) sub->add_option("input", p.input, input_desc);
    sub->add_option("-o,--output", p.output, "Output path (stdout when omitted)");
}

void add_frame_opts(CLI::App* sub, Params& p) {
    sub->add_option("--frame-length", p.frame_length, "Frame length in samples")->check(CLI::PositiveNumber);
    sub->add_option("--hop", p.hop, "Hop size in samples")->check(CLI::PositiveNumber);
    sub->add_option("--window", p.window, "Analysis window")->check(CLI::IsMember({"hann", "hamming", "rect"}));
}

void add_heatmap_opts(CLI::App* sub, Params& p) {
    sub->add_option("--ppm", p.ppm, "Also write a heatmap PPM");
    sub->add_option("--colormap", p.colormap, "gray or heat")->check(CLI::IsMember({"gray", "grayscale", "heat"}));
    sub->add_flag("--invert", p.invert, "Invert the colormap");
}

void add_weighting(CLI::App* sub, Params& p) {
    sub->add_option("--weighting", p.weighting, "count or duration")->check(CLI::IsMember({"count", "duration"}));
}

CLI::App* leaf_subcommand(CLI::App& app) {
    CLI::App* cur = &app;
    for (;;) {
        const auto subs = cur->get_subcommands();
        if (subs.empty()) return cur;
        cur = subs.front();
    }
}

void collect_option_names(const CLI::App* app, std::set<std::string>& names) {
    for (const CLI::Option* opt : app->get_options()) {
        for (const auto& n : opt->get_lnames()) names.insert(n);
        if (!opt->get_name(true, false).empty() && opt->get_lnames().empty() && opt->get_snames().empty())
            names.insert(opt->get_name(true, false));
    }
    for (const CLI::App* sub : app->get_subcommands({})) collect_option_names(sub, names);
}

std::string config_value_text(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw UsageError("config key '" + key + "' must be a string, number or boolean");
}

// Values from the config file fill options the command line left unset.
void apply_config(CLI::App& app, CLI::App* leaf, const std::string& path) {
    json cfg;
    try {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open config file " + path);
        cfg = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("config file " + path + ": " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    std::set<std::string> known;
    collect_option_names(&app, known);
    for (const auto& [key, value] : cfg.items()) {
        if (key == "config") continue;
        CLI::Option* opt = leaf->get_option_no_throw("--" + key);
        if (opt == nullptr) opt = leaf->get_option_no_throw(key);
        if (opt == nullptr) {
            if (!known.contains(key)) throw UsageError("unknown config key '" + key + "'");
            continue;
        }
        if (opt->count() > 0) continue;
        const std::string text = config_value_text(value, key);
        if (opt->get_type_size() == 0 && text == "false") continue;
        opt->add_result(text);
        opt->run_callback();
    }
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path);
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) throw Error(Errc::InvalidArgument, "write failed: " + path);
}

}  // namespace

int run(int argc, const char* const* argv) {
    Params p;
    CLI::App app{"Music information retrieval and visualization toolkit", "mirviz"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    CommandTable table;

    auto finish = [&](CLI::App* sub, const std::string& name, std::function<RunResult()> fn) {
        sub->add_option("--config", p.config, "JSON file of option values (flags take precedence)");
        sub->add_option("--sidecar", p.sidecar, "Effective-config path (default <output>.config.json)");
        table.handlers[sub] = std::move(fn);
        table.names[sub] = name;
    };

    auto* features = app.add_subcommand("features", "Frame-level audio features");
    features->require_subcommand(1);
    for (const std::string type : {"stft", "mfcc", "cqt", "chroma"}) {
        auto* sub = features->add_subcommand(type, type + " features from a WAV file");
        add_io(sub, p, "Input WAV");
        add_frame_opts(sub, p);
        if (type == "mfcc") {
            sub->add_option("--n-mels", p.n_mels, "Mel bands")->check(CLI::PositiveNumber);
            sub->add_option("--n-mfcc", p.n_mfcc, "Cepstral coefficients")->check(CLI::PositiveNumber);
        }
        if (type == "cqt" || type == "chroma") {
            sub->add_option("--f-min", p.f_min, "Lowest CQT bin frequency (Hz)")->check(CLI::PositiveNumber);
            sub->add_option("--bins-per-octave", p.bins_per_octave, "CQT bins per octave")->check(CLI::PositiveNumber);
            sub->add_option("--n-bins", p.n_bins, "Number of CQT bins")->check(CLI::PositiveNumber);
        }
        sub->add_option("--beats", p.beats, "Beat annotation file for beat-synchronous aggregation");
        sub->add_flag("--estimate-beats", p.estimate_beats, "Estimate a beat grid and aggregate over it");
        sub->add_option("--aggregate", p.aggregate, "median or mean")->check(CLI::IsMember({"median", "mean"}));
        add_heatmap_opts(sub, p);
        finish(sub, "features " + type, [&p, type] { return cmd_features(p, type); });
    }

    auto* beats = app.add_subcommand("beats", "Estimate a fixed-tempo beat grid");
    add_io(beats, p, "Input WAV");
    add_frame_opts(beats, p);
    finish(beats, "beats", [&p] { return cmd_beats(p); });

    auto* ssm = app.add_subcommand("ssm", "Self-similarity (distance) matrix");
    add_io(ssm, p, "Input features (CSV or JSON)");
    ssm->add_option("--metric", p.metric, "euclidean, cosine or correlation")
        ->check(CLI::IsMember({"euclidean", "cosine", "correlation"}));
    add_heatmap_opts(ssm, p);
    finish(ssm, "ssm", [&p] { return cmd_ssm(p); });

    auto* reduce = app.add_subcommand("reduce", "Dimensionality reduction");
    reduce->require_subcommand(1);
    for (const std::string method : {"pca", "mds", "tsne"}) {
        auto* sub = reduce->add_subcommand(method, method + " embedding");
        add_io(sub, p, "Input features (CSV or JSON)");
        sub->add_option("-k,--k", p.k, "Output dimensionality")->check(CLI::PositiveNumber);
        if (method == "mds")
            sub->add_option("--metric", p.mds_metric, "Distance metric")
                ->check(CLI::IsMember({"euclidean", "cosine", "correlation"}));
        if (method == "tsne") {
            sub->add_option("--perplexity", p.perplexity, "Effective neighbour count")->check(CLI::PositiveNumber);
            sub->add_option("--seed", p.seed, "Random seed");
            sub->add_option("--iterations", p.iterations, "Gradient steps")->check(CLI::PositiveNumber);
        }
        finish(sub, "reduce " + method, [&p, method] { return cmd_reduce(p, method); });
    }

    auto* smooth = app.add_subcommand("smooth", "First-order low-pass smoothing along time");
    add_io(smooth, p, "Input features (CSV or JSON)");
    smooth->add_option("--alpha", p.alpha, "Smoothing coefficient in (0, 1]");
    finish(smooth, "smooth", [&p] { return cmd_smooth(p); });

    auto* strip = app.add_subcommand("colorstrip", "RGB color strip from a 3-D embedding");
    add_io(strip, p, "Input embedding (CSV or JSON)");
    strip->add_option("--column-width", p.column_width, "Pixels per point")->check(CLI::PositiveNumber);
    strip->add_option("--height", p.height, "Strip height in pixels")->check(CLI::PositiveNumber);
    finish(strip, "colorstrip", [&p] { return cmd_colorstrip(p); });

    auto* traj = app.add_subcommand("trajectory", "Isometric SVG trajectory of a 3-D embedding");
    add_io(traj, p, "Input embedding (CSV or JSON)");
    traj->add_option("--label-stride", p.label_stride, "Label every n-th point (0 disables)")
        ->check(CLI::NonNegativeNumber);
    finish(traj, "trajectory", [&p] { return cmd_trajectory(p); });

    auto* hist = app.add_subcommand("histogram", "Pitch-class histogram");
    add_io(hist, p, "Input notes (SMF or note CSV)");
    add_weighting(hist, p);
    hist->add_option("--normalization", p.normalization, "raw or probability")
        ->check(CLI::IsMember({"raw", "probability"}));
    hist->add_option("--svg", p.svg, "Also write a bar chart");
    finish(hist, "histogram", [&p] { return cmd_histogram(p); });

    auto* trans = app.add_subcommand("transitions", "12x12 pitch-class transition counts");
    add_io(trans, p, "Input notes (SMF or note CSV)");
    add_heatmap_opts(trans, p);
    finish(trans, "transitions", [&p] { return cmd_transitions(p); });

    auto* intervals = app.add_subcommand("intervals", "Melodic interval sequence");
    add_io(intervals, p, "Input notes (SMF or note CSV)");
    intervals->add_option("--svg", p.svg, "Also write an interval histogram bar chart");
    finish(intervals, "intervals", [&p] { return cmd_intervals(p); });

    auto* sets = app.add_subcommand("sets", "Pitch-class set partition (Venn regions)");
    add_io(sets, p, "");
    sets->add_option("--a", p.set_a, "First set, comma separated");
    sets->add_option("--b", p.set_b, "Second set, comma separated");
    finish(sets, "sets", [&p] { return cmd_sets(p); });

    auto* key = app.add_subcommand("key", "Template-correlation key estimate");
    add_io(key, p, "Input notes (SMF or note CSV)");
    add_weighting(key, p);
    finish(key, "key", [&p] { return cmd_key(p); });

    auto* box = app.add_subcommand("boxplot", "Box-and-whisker SVG from group,value rows");
    add_io(box, p, "Input CSV (group,value per line)");
    box->add_option("--json", p.json_out, "Also write the statistics as JSON");
    finish(box, "boxplot", [&p] { return cmd_boxplot(p); });

    auto* corr = app.add_subcommand("corrcheck", "Correlation-matrix validity report");
    add_io(corr, p, "Input matrix CSV");
    corr->add_option("--svg", p.svg, "Also write the polar diagram");
    add_heatmap_opts(corr, p);
    finish(corr, "corrcheck", [&p] { return cmd_corrcheck(p); });

    auto* pg = app.add_subcommand("patterngraph", "Pattern-graph specifications");
    pg->require_subcommand(1);
    auto* learn = pg->add_subcommand("learn", "Learn a graph from phrases");
    add_io(learn, p, "Phrase file (one whitespace-separated phrase per line)");
    learn->add_option("--notes", p.notes, "Derive one chord-degree phrase from a note file instead");
    learn->add_option("--root", p.root, "Root pitch for chord degrees");
    learn->add_option("--dot", p.dot, "Also write Graphviz DOT");
    finish(learn, "patterngraph learn", [&p] { return cmd_pattern_learn(p); });
    auto* check = pg->add_subcommand("check", "Check phrases against a graph");
    add_io(check, p, "Phrase file");
    check->add_option("--graph", p.graph, "Graph JSON");
    check->add_option("--notes", p.notes, "Derive one chord-degree phrase from a note file instead");
    check->add_option("--root", p.root, "Root pitch for chord degrees");
    finish(check, "patterngraph check", [&p] { return cmd_pattern_check(p); });
    auto* dot = pg->add_subcommand("dot", "Export a graph JSON as DOT");
    add_io(dot, p, "Graph JSON");
    dot->add_option("--graph", p.graph, "Graph JSON (alternative to the positional input)");
    finish(dot, "patterngraph dot", [&p] { return cmd_pattern_dot(p); });

    CLI::App* leaf = nullptr;
    try {
        app.parse(argc, argv);
        leaf = leaf_subcommand(app);
        if (!p.config.empty()) apply_config(app, leaf, p.config);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e);
            return 0;
        }
        std::cerr << "mirviz: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "mirviz: " << e.what() << "\n";
        return 1;
    }

    const auto handler = table.handlers.find(leaf);
    if (handler == table.handlers.end()) {
        std::cerr << "mirviz: a subcommand is required\n";
        return 1;
    }

    RunResult result;
    try {
        result = handler->second();
        std::string sidecar = p.sidecar;
        if (sidecar.empty() && !result.files.empty()) sidecar = result.files.front().first + ".config.json";
        if (!sidecar.empty()) {
            json eff = {{"command", table.names[leaf]}, {"inputs", result.inputs}, {"parameters", result.parameters}};
            json outputs = json::array();
            for (const auto& f : result.files) outputs.push_back(f.first);
            eff["outputs"] = outputs;
            if (!p.config.empty()) eff["config"] = p.config;
            result.files.emplace_back(sidecar, eff.dump(2) + "\n");
        }
        for (const auto& [path, bytes] : result.files) write_file(path, bytes);
        std::cout << result.stdout_text;
    } catch (const UsageError& e) {
        std::cerr << "mirviz: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "mirviz: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(int(argv.size()), argv.data());
}

}  // namespace mirviz::cli
