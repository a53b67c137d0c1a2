#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mirviz/error.hpp"

namespace mirviz {

/// Mono sample stream. Samples are normalized to [-1, 1].
struct AudioBuffer {
    Eigen::VectorXd samples;
    int sample_rate = 0;

    double duration() const { return sample_rate > 0 ? double(samples.size()) / sample_rate : 0.0; }
};

enum class WindowKind { hann, hamming, rect };

WindowKind parse_window_kind(const std::string& name);
std::string to_string(WindowKind kind);

struct FrameSpec {
    Eigen::Index frame_length = 2048;
    Eigen::Index hop = 512;
    WindowKind window = WindowKind::hann;

    /// Throws InvalidArgument unless 0 < hop <= frame_length.
    void validate() const;
};

/// Symmetric window of length n. Hann is 0.5 * (1 - cos(2 pi i / (n - 1))).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> make_window(WindowKind kind, Eigen::Index n) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(n);
    if (n == 1 || kind == WindowKind::rect) {
        w.setOnes();
        return w;
    }
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar c = std::cos(two_pi * Scalar(i) / Scalar(n - 1));
        w[i] = kind == WindowKind::hann ? Scalar(0.5) * (Scalar(1) - c) : Scalar(0.54) - Scalar(0.46) * c;
    }
    return w;
}

/// Decodes a RIFF/WAVE byte stream (PCM16 or float32, mono or stereo).
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);

/// Encodes a buffer as mono PCM16. Samples are scaled by 32768 and clamped.
std::vector<std::uint8_t> encode_wav_pcm16(const AudioBuffer& audio);

AudioBuffer read_wav_file(const std::string& path);
void write_wav_file(const std::string& path, const AudioBuffer& audio);

/// Number of frames frame_signal produces for a signal of n samples.
inline Eigen::Index frame_count(Eigen::Index n_samples, Eigen::Index hop) { return 1 + n_samples / hop; }

/// Index into a signal of length n after mirror reflection (edge sample not repeated).
Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n);

/// Slices the center-padded signal into windowed frames, one frame per row.
/// Frame i is centered on sample i * hop.
Eigen::MatrixXd frame_signal(const AudioBuffer& audio, const FrameSpec& spec);

}  // namespace mirviz
