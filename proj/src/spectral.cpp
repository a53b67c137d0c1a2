#include "mirviz/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "mirviz/error.hpp"

namespace mirviz {

namespace {

constexpr const char* kNoteNames[12] = {"C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Eigen::MatrixXd power_spectra(const Eigen::MatrixXd& frames) {
    const Eigen::Index n = frames.cols();
    const Eigen::Index n_bins = n / 2 + 1;
    Eigen::MatrixXd power(frames.rows(), n_bins);
    Eigen::FFT<double> fft;
    Eigen::VectorXd row(n);
    Eigen::VectorXcd spectrum(n);
    for (Eigen::Index t = 0; t < frames.rows(); ++t) {
        row = frames.row(t).transpose();
        fft.fwd(spectrum, row);
        power.row(t) = spectrum.head(n_bins).cwiseAbs2().transpose();
    }
    return power;
}

}  // namespace

double CqtSpec::q() const { return 1.0 / (std::exp2(1.0 / bins_per_octave) - 1.0); }

double CqtSpec::bin_frequency(int k) const { return f_min * std::exp2(double(k) / bins_per_octave); }

Eigen::Index CqtSpec::window_length(int k, Eigen::Index frame_length, int sample_rate) const {
    const auto ideal = Eigen::Index(std::llround(q() * sample_rate / bin_frequency(k)));
    return std::max<Eigen::Index>(1, std::min(frame_length, ideal));
}

void CqtSpec::validate(int sample_rate) const {
    if (!(f_min > 0) || bins_per_octave < 1 || n_bins < 1)
        throw Error(Errc::InvalidArgument, "cqt spec needs f_min > 0, bins_per_octave >= 1, n_bins >= 1");
    if (!(bin_frequency(n_bins - 1) < sample_rate / 2.0))
        throw Error(Errc::BinAboveNyquist, "top bin " + format_number(bin_frequency(n_bins - 1)) + " Hz");
}

FeatureMatrix stft_power(const AudioBuffer& audio, const FrameSpec& spec) {
    const Eigen::MatrixXd frames = frame_signal(audio, spec);
    FeatureMatrix out;
    out.kind = FeatureKind::spectrogram;
    out.values = power_spectra(frames);
    out.frame_times = frame_times_for(frames.rows(), spec.hop, audio.sample_rate);
    const Eigen::Index n = spec.frame_length;
    for (Eigen::Index k = 0; k < out.values.cols(); ++k)
        out.dim_labels.push_back("hz:" + format_number(double(k) * audio.sample_rate / double(n)));
    return out;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Eigen::VectorXd mel_center_frequencies(int n_mels, double f_min, double f_max) {
    const Eigen::VectorXd mels =
        Eigen::VectorXd::LinSpaced(n_mels + 2, hz_to_mel(f_min), hz_to_mel(f_max));
    Eigen::VectorXd centers(n_mels);
    for (int m = 0; m < n_mels; ++m) centers[m] = mel_to_hz(mels[m + 1]);
    return centers;
}

Eigen::MatrixXd mel_filterbank(int sample_rate, Eigen::Index n_fft, int n_mels, double f_min, double f_max) {
    if (n_mels < 2 || n_fft < 2 || !(f_min >= 0) || !(f_min < f_max) || f_max > sample_rate / 2.0)
        throw Error(Errc::BadRange, "mel filterbank needs 0 <= f_min < f_max <= sr/2 and n_mels >= 2");

    const Eigen::VectorXd mels =
        Eigen::VectorXd::LinSpaced(n_mels + 2, hz_to_mel(f_min), hz_to_mel(f_max));
    Eigen::VectorXd edges(n_mels + 2);
    for (Eigen::Index i = 0; i < edges.size(); ++i) edges[i] = mel_to_hz(mels[i]);

    const Eigen::Index n_bins = n_fft / 2 + 1;
    Eigen::MatrixXd bank = Eigen::MatrixXd::Zero(n_mels, n_bins);
    for (int m = 0; m < n_mels; ++m) {
        const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
        for (Eigen::Index k = 0; k < n_bins; ++k) {
            const double f = double(k) * sample_rate / double(n_fft);
            const double rising = (f - lo) / (center - lo);
            const double falling = (hi - f) / (hi - center);
            bank(m, k) = std::max(0.0, std::min(rising, falling));
        }
    }
    return bank;
}

Eigen::MatrixXd dct_ii_basis(Eigen::Index n) {
    Eigen::MatrixXd basis(n, n);
    const double scale0 = std::sqrt(1.0 / double(n));
    const double scale = std::sqrt(2.0 / double(n));
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            basis(k, i) = (k == 0 ? scale0 : scale) *
                          std::cos(std::numbers::pi * double(k) * (double(i) + 0.5) / double(n));
    return basis;
}

FeatureMatrix mfcc(const AudioBuffer& audio, const FrameSpec& spec, int n_mels, int n_mfcc) {
    if (n_mfcc < 1 || n_mfcc > n_mels) throw Error(Errc::InvalidArgument, "mfcc needs 1 <= n_mfcc <= n_mels");
    const FeatureMatrix power = stft_power(audio, spec);
    const Eigen::MatrixXd bank = mel_filterbank(audio.sample_rate, spec.frame_length, n_mels, 0.0,
                                                audio.sample_rate / 2.0);
    const Eigen::MatrixXd log_mel = ((power.values * bank.transpose()).array() + kLogFloor).log().matrix();
    const Eigen::MatrixXd dct = dct_ii_basis(n_mels).topRows(n_mfcc);

    FeatureMatrix out;
    out.kind = FeatureKind::mfcc;
    out.values = log_mel * dct.transpose();
    out.frame_times = power.frame_times;
    for (int c = 0; c < n_mfcc; ++c) out.dim_labels.push_back("mfcc:" + std::to_string(c));
    return out;
}

FeatureMatrix cqt(const AudioBuffer& audio, const FrameSpec& spec, const CqtSpec& cqt_spec) {
    cqt_spec.validate(audio.sample_rate);
    const FrameSpec raw{spec.frame_length, spec.hop, WindowKind::rect};
    const Eigen::MatrixXd frames = frame_signal(audio, raw);

    // Per-bin kernels w_k[n] * exp(-2 pi i f_k n / sr) / N_k, split into real/imaginary parts.
    std::vector<Eigen::VectorXd> kernel_re, kernel_im;
    kernel_re.reserve(std::size_t(cqt_spec.n_bins));
    kernel_im.reserve(std::size_t(cqt_spec.n_bins));
    for (int k = 0; k < cqt_spec.n_bins; ++k) {
        const Eigen::Index len = cqt_spec.window_length(k, spec.frame_length, audio.sample_rate);
        const Eigen::VectorXd w = make_window(WindowKind::hann, len);
        const double omega = 2.0 * std::numbers::pi * cqt_spec.bin_frequency(k) / audio.sample_rate;
        Eigen::VectorXd re(len), im(len);
        for (Eigen::Index n = 0; n < len; ++n) {
            re[n] = w[n] * std::cos(omega * double(n)) / double(len);
            im[n] = -w[n] * std::sin(omega * double(n)) / double(len);
        }
        kernel_re.push_back(std::move(re));
        kernel_im.push_back(std::move(im));
    }

    FeatureMatrix out;
    out.kind = FeatureKind::cqt;
    out.values.resize(frames.rows(), cqt_spec.n_bins);
    for (Eigen::Index t = 0; t < frames.rows(); ++t) {
        for (int k = 0; k < cqt_spec.n_bins; ++k) {
            const auto& kr = kernel_re[std::size_t(k)];
            const auto head = frames.row(t).head(kr.size());
            const double re = head.dot(kr.transpose());
            const double im = head.dot(kernel_im[std::size_t(k)].transpose());
            out.values(t, k) = std::hypot(re, im);
        }
    }
    out.frame_times = frame_times_for(frames.rows(), spec.hop, audio.sample_rate);
    for (int k = 0; k < cqt_spec.n_bins; ++k) out.dim_labels.push_back("note:" + note_label(cqt_spec.bin_frequency(k)));
    return out;
}

FeatureMatrix chroma(const FeatureMatrix& cqt_features) {
    if (cqt_features.kind != FeatureKind::cqt) throw Error(Errc::WrongKind, "chroma expects cqt features");
    FeatureMatrix out;
    out.kind = FeatureKind::chroma;
    out.values = Eigen::MatrixXd::Zero(cqt_features.n_frames(), 12);
    for (Eigen::Index k = 0; k < cqt_features.n_dims(); ++k) {
        const int pc = pitch_class_of_label(cqt_features.dim_labels[std::size_t(k)]);
        out.values.col(pc) += cqt_features.values.col(k);
    }
    out.frame_times = cqt_features.frame_times;
    for (int c = 0; c < 12; ++c) out.dim_labels.push_back("pc:" + std::to_string(c));
    return out;
}

FeatureMatrix onset_envelope(const FeatureMatrix& spectrogram) {
    if (spectrogram.kind != FeatureKind::spectrogram)
        throw Error(Errc::WrongKind, "onset envelope expects a spectrogram");
    const Eigen::MatrixXd mag = spectrogram.values.cwiseSqrt();
    FeatureMatrix out;
    out.kind = FeatureKind::onset;
    out.values = Eigen::MatrixXd::Zero(mag.rows(), 1);
    for (Eigen::Index t = 1; t < mag.rows(); ++t)
        out.values(t, 0) = (mag.row(t) - mag.row(t - 1)).cwiseMax(0.0).sum();
    out.frame_times = spectrogram.frame_times;
    out.dim_labels = {"onset"};
    return out;
}

std::string note_label(double hz) {
    const double midi = 69.0 + 12.0 * std::log2(hz / 440.0);
    const long nearest = std::lround(midi);
    const long cents = std::lround(100.0 * (midi - double(nearest)));
    const int pc = int(((nearest % 12) + 12) % 12);
    const long octave = (nearest - pc) / 12 - 1;
    std::string label = std::string(kNoteNames[pc]) + std::to_string(octave);
    if (cents != 0) label += (cents > 0 ? "+" : "") + std::to_string(cents) + "c";
    return label;
}

int pitch_class_of_label(const std::string& label) {
    const std::string prefix = "note:";
    if (label.rfind(prefix, 0) != 0 || label.size() <= prefix.size())
        throw Error(Errc::WrongKind, "not a note label: '" + label + "'");
    const std::string name = label.substr(prefix.size());
    int best = -1;
    std::size_t best_len = 0;
    for (int pc = 0; pc < 12; ++pc) {
        const std::string candidate = kNoteNames[pc];
        if (name.rfind(candidate, 0) == 0 && candidate.size() > best_len) {
            best = pc;
            best_len = candidate.size();
        }
    }
    if (best < 0) throw Error(Errc::WrongKind, "not a note label: '" + label + "'");
    return best;
}

}  // namespace mirviz
