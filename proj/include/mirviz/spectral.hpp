#pragma once

#include <string>

#include <Eigen/Core>

#include "mirviz/audio_io.hpp"
#include "mirviz/feature_matrix.hpp"

namespace mirviz {

/// Geometric bin layout of the constant-Q transform.
struct CqtSpec {
    double f_min = 32.7032;  // C1
    int bins_per_octave = 12;
    int n_bins = 84;

    /// Quality factor 1 / (2^(1/B) - 1).
    double q() const;
    double bin_frequency(int k) const;
    /// min(frame_length, round(Q * sample_rate / f_k)).
    Eigen::Index window_length(int k, Eigen::Index frame_length, int sample_rate) const;
    /// Throws BinAboveNyquist if the top bin reaches sample_rate / 2.
    void validate(int sample_rate) const;
};

/// Power spectrogram |DFT(frame)|^2 for bins 0..N/2. Labels are "hz:<center>".
FeatureMatrix stft_power(const AudioBuffer& audio, const FrameSpec& spec);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular filters with unit peaks at mel-equispaced centers; n_mels x (n_fft/2 + 1).
Eigen::MatrixXd mel_filterbank(int sample_rate, Eigen::Index n_fft, int n_mels, double f_min, double f_max);

/// Center frequency of each filter in mel_filterbank (the interior mel points, in Hz).
Eigen::VectorXd mel_center_frequencies(int n_mels, double f_min, double f_max);

/// Orthonormal DCT-II basis: row k is the k-th cosine over n points.
Eigen::MatrixXd dct_ii_basis(Eigen::Index n);

inline constexpr double kLogFloor = 1e-10;

/// stft_power -> mel filterbank -> log(x + 1e-10) -> orthonormal DCT-II, first n_mfcc rows.
FeatureMatrix mfcc(const AudioBuffer& audio, const FrameSpec& spec, int n_mels, int n_mfcc);

/// Naive per-bin constant-Q magnitudes. Labels are "note:<name>" (e.g. "note:A4").
FeatureMatrix cqt(const AudioBuffer& audio, const FrameSpec& spec, const CqtSpec& cqt_spec);

/// Folds CQT bins onto 12 pitch classes, 0 = C. Labels are "pc:<class>".
FeatureMatrix chroma(const FeatureMatrix& cqt_features);

/// Half-wave rectified spectral flux of the magnitude spectrum; env[0] = 0.
FeatureMatrix onset_envelope(const FeatureMatrix& spectrogram);

/// Note label for a frequency, e.g. 440 -> "A4", 450 -> "A4+39c".
std::string note_label(double hz);

/// Pitch class (0 = C) of a "note:<name>" label; throws WrongKind if unparseable.
int pitch_class_of_label(const std::string& label);

}  // namespace mirviz
