#include "mirviz/beat_sync.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mirviz/error.hpp"

namespace mirviz {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

void BeatGrid::validate() const {
    if (beat_times.size() < 2) throw Error(Errc::TooFewBeats, std::to_string(beat_times.size()) + " beat(s)");
    if (beat_times.front() < 0) throw Error(Errc::NotMonotonic, "negative beat time");
    for (std::size_t i = 1; i < beat_times.size(); ++i)
        if (!(beat_times[i] > beat_times[i - 1]))
            throw Error(Errc::NotMonotonic, "beat " + std::to_string(i) + " does not follow beat " + std::to_string(i - 1));
}

BeatGrid load_beats(const std::string& text) {
    BeatGrid grid;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t used = 0;
        double value = 0;
        try {
            value = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || !std::isfinite(value))
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": '" + s + "'");
        grid.beat_times.push_back(value);
    }
    grid.source = BeatSource::annotated;
    grid.validate();
    return grid;
}

std::string format_beats(const BeatGrid& grid) {
    std::string out;
    char buf[40];
    for (double t : grid.beat_times) {
        std::snprintf(buf, sizeof buf, "%.6f\n", t);
        out += buf;
    }
    return out;
}

BeatGrid estimate_beats(const FeatureMatrix& onset, double duration) {
    if (onset.kind != FeatureKind::onset || onset.n_dims() != 1)
        throw Error(Errc::WrongKind, "beat estimation expects a 1-dimensional onset envelope");
    const Eigen::Index n = onset.n_frames();
    if (n < 4) throw Error(Errc::InvalidArgument, "onset envelope needs at least 4 frames");
    const Eigen::VectorXd env = onset.values.col(0);
    if (!(env.cwiseAbs().maxCoeff() > 0)) throw Error(Errc::NoBeats, "all-zero onset envelope");

    const double dt = onset.frame_times[1] - onset.frame_times[0];
    const auto lag_min = std::max<Eigen::Index>(1, Eigen::Index(std::ceil(60.0 / (180.0 * dt))));
    const auto lag_max = std::min<Eigen::Index>(n - 1, Eigen::Index(std::floor(60.0 / (60.0 * dt))));
    if (lag_min > lag_max) throw Error(Errc::NoBeats, "envelope too short for the 60-180 BPM range");

    Eigen::VectorXd r(lag_max + 2);
    for (Eigen::Index lag = 0; lag < r.size(); ++lag) r[lag] = lag < n ? env.head(n - lag).dot(env.tail(n - lag)) : 0.0;

    // Enhanced autocorrelation: subtract the 2x time-stretched curve so peaks at
    // multiples of the true period do not win when the period is fractional.
    auto enhanced = [&](Eigen::Index lag) {
        const double half = 0.5 * double(lag);
        const auto lo = Eigen::Index(half);
        const double frac = half - double(lo);
        const double stretched = (1.0 - frac) * r[lo] + frac * r[lo + 1];
        return std::max(0.0, r[lag] - stretched);
    };

    Eigen::Index best = lag_min;
    double best_r = enhanced(lag_min);
    for (Eigen::Index lag = lag_min + 1; lag <= lag_max; ++lag) {
        const double e = enhanced(lag);
        if (e >= best_r) {
            best = lag;
            best_r = e;
        }
    }

    double period = double(best);
    if (best - 1 >= 1 && best + 1 < r.size()) {
        const double left = r[best - 1], mid = r[best], right = r[best + 1];
        const double curvature = left - 2.0 * mid + right;
        if (curvature < 0) period += std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
    }

    Eigen::Index best_phase = 0;
    double best_score = -1;
    for (Eigen::Index phase = 0; double(phase) < period; ++phase) {
        double score = 0;
        for (double pos = double(phase); pos <= double(n - 1); pos += period)
            score += env[Eigen::Index(std::lround(pos))];
        if (score > best_score) {
            best_score = score;
            best_phase = phase;
        }
    }

    BeatGrid grid;
    grid.source = BeatSource::estimated;
    grid.tempo_bpm = 60.0 / (period * dt);
    for (long j = 0;; ++j) {
        const double t = onset.frame_times[0] + (double(best_phase) + double(j) * period) * dt;
        if (t > duration) break;
        if (t >= 0) grid.beat_times.push_back(t);
    }
    grid.validate();
    return grid;
}

Aggregation parse_aggregation(const std::string& name) {
    if (name == "median") return Aggregation::median;
    if (name == "mean") return Aggregation::mean;
    throw Error(Errc::InvalidArgument, "unknown aggregation '" + name + "'");
}

std::string to_string(Aggregation method) { return method == Aggregation::median ? "median" : "mean"; }

FeatureMatrix beat_aggregate(const FeatureMatrix& features, const BeatGrid& grid, Aggregation method) {
    grid.validate();
    features.validate();
    const auto& times = features.frame_times;
    const auto& beats = grid.beat_times;
    if (times.empty()) throw Error(Errc::NoOverlap, "no feature frames");

    auto first_at_or_after = [&](double t) {
        return std::size_t(std::lower_bound(times.begin(), times.end(), t) - times.begin());
    };
    if (first_at_or_after(beats.front()) >= first_at_or_after(beats.back()))
        throw Error(Errc::NoOverlap, "no frame falls inside the beat grid");

    const std::size_t n_out = beats.size() - 1;
    FeatureMatrix out;
    out.kind = features.kind;
    out.dim_labels = features.dim_labels;
    out.values.resize(Eigen::Index(n_out), features.n_dims());
    out.frame_times.assign(beats.begin(), beats.end() - 1);

    std::vector<double> column;
    for (std::size_t i = 0; i < n_out; ++i) {
        const std::size_t lo = first_at_or_after(beats[i]);
        const std::size_t hi = first_at_or_after(beats[i + 1]);
        const auto row = Eigen::Index(i);
        if (lo == hi) {
            const double mid = 0.5 * (beats[i] + beats[i + 1]);
            std::size_t nearest = 0;
            for (std::size_t f = 1; f < times.size(); ++f)
                if (std::abs(times[f] - mid) < std::abs(times[nearest] - mid)) nearest = f;
            out.values.row(row) = features.values.row(Eigen::Index(nearest));
            continue;
        }
        const auto block = features.values.middleRows(Eigen::Index(lo), Eigen::Index(hi - lo));
        if (method == Aggregation::mean) {
            out.values.row(row) = block.colwise().mean();
        } else {
            for (Eigen::Index d = 0; d < block.cols(); ++d) {
                column.clear();
                for (Eigen::Index r = 0; r < block.rows(); ++r) column.push_back(block(r, d));
                out.values(row, d) = median_of(column);
            }
        }
    }
    return out;
}

}  // namespace mirviz
