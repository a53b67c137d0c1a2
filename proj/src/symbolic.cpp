#include "mirviz/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "mirviz/error.hpp"

namespace mirviz {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(trim(field));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_decimal(const std::string& s, int line_no) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(v))
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": '" + s + "'");
    return v;
}

int parse_integral(const std::string& s, int line_no) {
    const double v = parse_decimal(s, line_no);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": '" + s + "' is not an integer");
    return int(v);
}

PcVector rotate(const PcVector& v, int k) {
    PcVector out;
    for (int pc = 0; pc < 12; ++pc) out[(pc + k) % 12] = v[pc];
    return out;
}

}  // namespace

void NoteList::sort() {
    std::stable_sort(notes.begin(), notes.end(), [](const NoteEvent& a, const NoteEvent& b) {
        return std::tie(a.onset, a.pitch, a.channel) < std::tie(b.onset, b.pitch, b.channel);
    });
}

NoteList parse_note_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    NoteList list;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty()) continue;
        if (!header_seen) {
            std::string compact;
            for (char c : s)
                if (c != ' ' && c != '\t') compact += c;
            if (compact != "onset,duration,pitch,velocity")
                throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected header "
                                              "'onset,duration,pitch,velocity'");
            header_seen = true;
            continue;
        }
        const auto fields = split(s, ',');
        if (fields.size() != 4)
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 4 fields");
        NoteEvent e;
        e.onset = parse_decimal(fields[0], line_no);
        e.duration = parse_decimal(fields[1], line_no);
        e.pitch = parse_integral(fields[2], line_no);
        e.velocity = parse_integral(fields[3], line_no);
        const std::string where = " (line " + std::to_string(line_no) + ")";
        if (e.onset < 0) throw Error(Errc::RangeError, "onset" + where);
        if (e.duration < 0) throw Error(Errc::RangeError, "duration" + where);
        if (e.pitch < 0 || e.pitch > 127) throw Error(Errc::RangeError, "pitch" + where);
        if (e.velocity < 1 || e.velocity > 127) throw Error(Errc::RangeError, "velocity" + where);
        list.notes.push_back(e);
    }
    if (!header_seen) throw Error(Errc::ParseError, "line 1: missing header");
    list.sort();
    return list;
}

PitchClassProfile PitchClassProfile::normalized() const {
    PitchClassProfile out = *this;
    const double total = weights.sum();
    if (total > 0) out.weights /= total;
    out.normalization = Normalization::probability;
    return out;
}

Weighting parse_weighting(const std::string& name) {
    if (name == "count") return Weighting::count;
    if (name == "duration") return Weighting::duration;
    throw Error(Errc::InvalidArgument, "unknown weighting '" + name + "'");
}

std::string to_string(Weighting w) { return w == Weighting::count ? "count" : "duration"; }

PitchClassProfile pitch_class_histogram(const NoteList& notes, Weighting weighting) {
    PitchClassProfile profile;
    for (const auto& n : notes.notes)
        profile.weights[pitch_class(n.pitch)] += weighting == Weighting::count ? 1.0 : n.duration;
    return profile;
}

TransitionMatrix pc_transition_matrix(const NoteList& notes) {
    TransitionMatrix m = TransitionMatrix::Zero();
    for (std::size_t i = 1; i < notes.notes.size(); ++i)
        ++m(pitch_class(notes.notes[i - 1].pitch), pitch_class(notes.notes[i].pitch));
    return m;
}

std::vector<int> interval_sequence(const NoteList& notes) {
    if (notes.notes.empty()) throw Error(Errc::EmptyList);
    std::vector<int> out;
    out.reserve(notes.notes.size() - 1);
    for (std::size_t i = 1; i < notes.notes.size(); ++i) out.push_back(notes.notes[i].pitch - notes.notes[i - 1].pitch);
    return out;
}

PitchClassSet::PitchClassSet(std::initializer_list<int> classes) : PitchClassSet(from_vector(classes)) {}

PitchClassSet PitchClassSet::from_vector(const std::vector<int>& classes) {
    std::bitset<12> bits;
    for (int pc : classes) {
        if (pc < 0 || pc > 11) throw Error(Errc::RangeError, "pitch class " + std::to_string(pc));
        bits.set(std::size_t(pc));
    }
    return PitchClassSet(bits);
}

PitchClassSet PitchClassSet::chromatic() { return PitchClassSet(std::bitset<12>().set()); }

std::vector<int> PitchClassSet::members() const {
    std::vector<int> out;
    for (int pc = 0; pc < 12; ++pc)
        if (contains(pc)) out.push_back(pc);
    return out;
}

SetPartition set_partition(const PitchClassSet& a, const PitchClassSet& b) { return {a - b, a & b, b - a}; }

std::string to_string(Mode mode) { return mode == Mode::major ? "major" : "minor"; }

KeyTemplates KeyTemplates::binary_scales() {
    KeyTemplates t;
    t.major.setZero();
    t.minor.setZero();
    for (int pc : {0, 2, 4, 5, 7, 9, 11}) t.major[pc] = 1;
    for (int pc : {0, 2, 3, 5, 7, 8, 10}) t.minor[pc] = 1;
    return t;
}

double pearson(const PcVector& a, const PcVector& b) {
    const PcVector ca = a.array() - a.mean();
    const PcVector cb = b.array() - b.mean();
    const double denom = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
    return denom > 0 ? ca.dot(cb) / denom : 0.0;
}

KeyEstimate estimate_key(const PitchClassProfile& profile, const KeyTemplates& templates) {
    if (!(profile.weights.sum() > 0)) throw Error(Errc::ZeroProfile);
    const PcVector p = profile.normalized().weights;
    KeyEstimate best;
    bool first = true;
    // Binary relative major/minor templates coincide, so exact ties are routine:
    // major wins them, then the lower tonic. Rotation changes the summation
    // order, so scores within 1e-12 count as tied.
    for (Mode mode : {Mode::major, Mode::minor}) {
        for (int tonic = 0; tonic < 12; ++tonic) {
            const double score = pearson(p, rotate(mode == Mode::major ? templates.major : templates.minor, tonic));
            if (first || score > best.score + 1e-12) {
                best = {tonic, mode, score};
                first = false;
            }
        }
    }
    return best;
}

}  // namespace mirviz
