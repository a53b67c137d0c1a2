#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mirviz/feature_matrix.hpp"

namespace mirviz {

enum class BeatSource { annotated, estimated };

struct BeatGrid {
    std::vector<double> beat_times;
    BeatSource source = BeatSource::annotated;
    std::optional<double> tempo_bpm;

    /// Throws TooFewBeats (< 2 beats) or NotMonotonic (not strictly increasing, or negative).
    void validate() const;
};

/// One decimal number per line; blank lines and '#' comments ignored.
BeatGrid load_beats(const std::string& text);
std::string format_beats(const BeatGrid& grid);

/// Constant-tempo grid from an onset envelope. Tempo is the enhanced
/// autocorrelation peak within 60-180 BPM (ties go to the slower tempo), refined
/// by parabolic interpolation; phase maximizes the envelope sampled on the grid.
BeatGrid estimate_beats(const FeatureMatrix& onset, double duration);

enum class Aggregation { median, mean };

Aggregation parse_aggregation(const std::string& name);
std::string to_string(Aggregation method);

/// Collapses frames into inter-beat intervals [beat_i, beat_{i+1}). An interval
/// without frames copies the frame nearest its midpoint.
FeatureMatrix beat_aggregate(const FeatureMatrix& features, const BeatGrid& grid, Aggregation method);

}  // namespace mirviz
