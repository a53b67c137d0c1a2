#include "mirviz/feature_matrix.hpp"

#include "mirviz/error.hpp"

namespace mirviz {

std::string to_string(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::spectrogram: return "spectrogram";
        case FeatureKind::mfcc: return "mfcc";
        case FeatureKind::cqt: return "cqt";
        case FeatureKind::chroma: return "chroma";
        case FeatureKind::onset: return "onset";
        case FeatureKind::embedding: return "embedding";
    }
    return "embedding";
}

FeatureKind parse_feature_kind(const std::string& name) {
    for (auto k : {FeatureKind::spectrogram, FeatureKind::mfcc, FeatureKind::cqt, FeatureKind::chroma,
                   FeatureKind::onset, FeatureKind::embedding})
        if (to_string(k) == name) return k;
    throw Error(Errc::InvalidArgument, "unknown feature kind '" + name + "'");
}

void FeatureMatrix::validate() const {
    if (std::size_t(values.rows()) != frame_times.size())
        throw Error(Errc::InvalidArgument, "frame_times length does not match frame count");
    if (std::size_t(values.cols()) != dim_labels.size())
        throw Error(Errc::InvalidArgument, "dim_labels length does not match dimension count");
    for (std::size_t i = 1; i < frame_times.size(); ++i)
        if (!(frame_times[i] > frame_times[i - 1]))
            throw Error(Errc::InvalidArgument, "frame_times must be strictly increasing");
}

std::vector<double> frame_times_for(Eigen::Index n_frames, Eigen::Index hop, int sample_rate) {
    std::vector<double> t(static_cast<std::size_t>(n_frames));
    for (Eigen::Index i = 0; i < n_frames; ++i) t[std::size_t(i)] = double(i * hop) / sample_rate;
    return t;
}

}  // namespace mirviz
