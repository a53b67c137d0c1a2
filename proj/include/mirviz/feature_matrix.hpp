#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace mirviz {

enum class FeatureKind { spectrogram, mfcc, cqt, chroma, onset, embedding };

std::string to_string(FeatureKind kind);
FeatureKind parse_feature_kind(const std::string& name);

/// Time-indexed descriptor matrix: one row per frame, one column per dimension.
struct FeatureMatrix {
    FeatureKind kind = FeatureKind::embedding;
    Eigen::MatrixXd values;
    std::vector<double> frame_times;
    std::vector<std::string> dim_labels;

    Eigen::Index n_frames() const { return values.rows(); }
    Eigen::Index n_dims() const { return values.cols(); }

    /// Throws InvalidArgument if labels/times disagree with the matrix shape or
    /// frame times are not strictly increasing.
    void validate() const;
};

/// Frame times i * hop / sample_rate.
std::vector<double> frame_times_for(Eigen::Index n_frames, Eigen::Index hop, int sample_rate);

}  // namespace mirviz
