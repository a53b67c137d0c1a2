#include <algorithm>
#include <complex>
#include <numeric>
#include <set>

#include "doctest.h"
#include "mirviz/spectral.hpp"
#include "test_util.hpp"

using namespace mirviz;
using testutil::argmax;
using testutil::error_code;

namespace {

FeatureMatrix spectrogram_of(const Eigen::MatrixXd& values) {
    FeatureMatrix m;
    m.kind = FeatureKind::spectrogram;
    m.values = values;
    for (Eigen::Index t = 0; t < values.rows(); ++t) m.frame_times.push_back(0.01 * double(t));
    for (Eigen::Index k = 0; k < values.cols(); ++k) m.dim_labels.push_back("hz:" + std::to_string(k));
    return m;
}

}  // namespace

TEST_CASE("DC signal puts all power in bin 0") {
    AudioBuffer a;
    a.sample_rate = 8;
    a.samples = Eigen::VectorXd::Ones(16);
    const auto s = stft_power(a, FrameSpec{4, 2, WindowKind::rect});
    REQUIRE(s.n_dims() == 3);
    for (Eigen::Index t = 0; t < s.n_frames(); ++t) {
        CHECK(s.values(t, 0) == 16.0);
        CHECK(s.values(t, 1) == doctest::Approx(0.0));
        CHECK(s.values(t, 2) == doctest::Approx(0.0));
    }
}

TEST_CASE("silence gives an all-zero spectrogram") {
    AudioBuffer a;
    a.sample_rate = 22050;
    a.samples = Eigen::VectorXd::Zero(5000);
    CHECK(stft_power(a, FrameSpec{}).values.isZero(0.0));
}

TEST_CASE("440 Hz sine peaks at bin 41 and matches a direct DFT") {
    const auto a = testutil::sine(440, 1.0);
    const FrameSpec spec{2048, 512, WindowKind::hann};
    const auto s = stft_power(a, spec);
    for (Eigen::Index t = 0; t < s.n_frames(); ++t)
        if (testutil::interior_frame(t, spec, a.samples.size())) CHECK(argmax(s.values.row(t)) == 41);
    const auto c = stft_power(testutil::cosine(440, 1.0), spec);
    for (Eigen::Index t = 0; t < c.n_frames(); ++t) CHECK(argmax(c.values.row(t)) == 41);

    const auto frames = frame_signal(a, spec);
    const Eigen::Index t = 7;
    for (Eigen::Index k : {0, 20, 41, 42, 500, 1024}) {
        std::complex<double> acc = 0;
        for (Eigen::Index n = 0; n < 2048; ++n)
            acc += frames(t, n) * std::polar(1.0, -2 * std::numbers::pi * double(k * n) / 2048.0);
        CHECK(s.values(t, k) == doctest::Approx(std::norm(acc)).epsilon(1e-9).scale(1e-6));
    }
    CHECK(s.dim_labels[41] == "hz:441.431");
}

TEST_CASE("Parseval: full-spectrum power equals N times frame energy") {
    AudioBuffer a;
    a.sample_rate = 1000;
    a.samples = testutil::random_matrix(1024, 1, 3).col(0);
    const FrameSpec spec{256, 256, WindowKind::rect};
    const auto s = stft_power(a, spec);
    const auto frames = frame_signal(a, spec);
    for (Eigen::Index t = 0; t < s.n_frames(); ++t) {
        double total = s.values(t, 0) + s.values(t, 128);
        for (Eigen::Index k = 1; k < 128; ++k) total += 2 * s.values(t, k);
        const double energy = frames.row(t).squaredNorm();
        CHECK(std::abs(total - 256 * energy) <= 1e-6 * 256 * energy);
    }
}

TEST_CASE("mel scale values") {
    CHECK(hz_to_mel(0) == 0.0);
    CHECK(hz_to_mel(700) == doctest::Approx(2595 * std::log10(2.0)).epsilon(1e-15));
    CHECK(hz_to_mel(700) == doctest::Approx(781.18).epsilon(1e-5));
    CHECK(mel_to_hz(hz_to_mel(1234.5)) == doctest::Approx(1234.5).epsilon(1e-12));
}

TEST_CASE("mel filterbank shape and centers") {
    const auto fb = mel_filterbank(22050, 2048, 40, 0, 11025);
    CHECK(fb.rows() == 40);
    CHECK(fb.cols() == 1025);
    CHECK(fb.minCoeff() >= 0.0);
    CHECK(fb.maxCoeff() <= 1.0);
    const auto c = mel_center_frequencies(40, 0, 11025);
    for (Eigen::Index i = 1; i < c.size(); ++i) CHECK(c[i] > c[i - 1]);
    CHECK(error_code([] { mel_filterbank(22050, 2048, 40, 100, 50); }) == Errc::BadRange);
    CHECK(error_code([] { mel_filterbank(22050, 2048, 40, 0, 20000); }) == Errc::BadRange);
}

TEST_CASE("DCT-II basis is orthonormal and maps a constant to coefficient 0") {
    const auto d = dct_ii_basis(40);
    CHECK((d * d.transpose() - Eigen::MatrixXd::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::VectorXd c = d * Eigen::VectorXd::Constant(40, 2.5);
    CHECK(c[0] == doctest::Approx(2.5 * std::sqrt(40.0)).epsilon(1e-14));
    CHECK(c.tail(39).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("MFCC of silence is the closed-form floor") {
    AudioBuffer a;
    a.sample_rate = 22050;
    a.samples = Eigen::VectorXd::Zero(4096);
    const auto m = mfcc(a, FrameSpec{}, 40, 20);
    REQUIRE(m.n_dims() == 20);
    CHECK(m.dim_labels[0] == "mfcc:0");
    const double c0 = std::sqrt(40.0) * std::log(1e-10);
    for (Eigen::Index t = 0; t < m.n_frames(); ++t) {
        CHECK(m.values(t, 0) == doctest::Approx(c0).epsilon(1e-12));
        CHECK(m.values.row(t).tail(19).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("MFCC is finite for arbitrary input and validates sizes") {
    AudioBuffer a;
    a.sample_rate = 16000;
    a.samples = testutil::random_matrix(8000, 1, 9).col(0);
    const auto m = mfcc(a, FrameSpec{512, 128, WindowKind::hamming}, 26, 13);
    CHECK(m.values.allFinite());
    CHECK(error_code([&] { mfcc(a, FrameSpec{}, 10, 20); }) == Errc::InvalidArgument);
}

TEST_CASE("CQT geometry") {
    const CqtSpec cs;
    CHECK(cs.q() == doctest::Approx(1.0 / (std::pow(2.0, 1.0 / 12) - 1)));
    for (int k = 1; k < cs.n_bins; ++k) {
        CHECK(cs.bin_frequency(k) > cs.bin_frequency(k - 1));
        CHECK(cs.window_length(k, 2048, 22050) <= cs.window_length(k - 1, 2048, 22050));
    }
    CHECK(error_code([] { CqtSpec{32.7032, 12, 96}.validate(8000); }) == Errc::BinAboveNyquist);
    CHECK_NOTHROW(CqtSpec{}.validate(22050));
}

TEST_CASE("CQT of a 440 Hz sine peaks at bin 45 (A4), one octave up at bin 57") {
    const auto c = cqt(testutil::cosine(440, 2.0), FrameSpec{}, CqtSpec{});
    REQUIRE(c.n_dims() == 84);
    CHECK(c.dim_labels[0] == "note:C1");
    CHECK(c.dim_labels[45] == "note:A4");
    CHECK(c.values.minCoeff() >= 0.0);
    for (Eigen::Index t = 0; t < c.n_frames(); ++t) CHECK(argmax(c.values.row(t)) == 45);
    const auto up = cqt(testutil::cosine(880, 2.0), FrameSpec{}, CqtSpec{});
    for (Eigen::Index t = 0; t < up.n_frames(); ++t) CHECK(argmax(up.values.row(t)) == 57);
}

TEST_CASE("CQT bin equals the direct windowed inner product") {
    const auto a = testutil::sine(261.63, 0.5);
    const FrameSpec spec{2048, 512, WindowKind::hann};
    const CqtSpec cs;
    const auto c = cqt(a, spec, cs);
    const auto raw = frame_signal(a, FrameSpec{2048, 512, WindowKind::rect});
    const Eigen::Index t = 5;
    for (int k : {0, 30, 36, 48, 83}) {
        const double f = 32.7032 * std::pow(2.0, k / 12.0);
        const Eigen::Index nk = std::min<Eigen::Index>(2048, std::lround(cs.q() * 22050 / f));
        std::complex<double> acc = 0;
        for (Eigen::Index n = 0; n < nk; ++n) {
            const double w = nk == 1 ? 1.0 : 0.5 * (1 - std::cos(2 * std::numbers::pi * double(n) / double(nk - 1)));
            acc += raw(t, n) * w * std::polar(1.0, -2 * std::numbers::pi * f * double(n) / 22050.0);
        }
        CHECK(c.values(t, k) == doctest::Approx(std::abs(acc) / double(nk)).epsilon(1e-9).scale(1e-12));
    }
}

TEST_CASE("phase-0 sine: interior CQT frames peak at bin 45") {
    const auto a = testutil::sine(440, 2.0);
    const auto c = cqt(a, FrameSpec{}, CqtSpec{});
    for (Eigen::Index t = 0; t < c.n_frames(); ++t)
        if (testutil::interior_frame(t, FrameSpec{}, a.samples.size())) CHECK(argmax(c.values.row(t)) == 45);
}

TEST_CASE("silence gives an all-zero CQT") {
    AudioBuffer a;
    a.sample_rate = 22050;
    a.samples = Eigen::VectorXd::Zero(4096);
    CHECK(cqt(a, FrameSpec{}, CqtSpec{}).values.isZero(0.0));
}

TEST_CASE("note labels") {
    CHECK(note_label(440) == "A4");
    CHECK(note_label(450) == "A4+39c");
    CHECK(note_label(32.7032) == "C1");
    CHECK(pitch_class_of_label("note:A4") == 9);
    CHECK(pitch_class_of_label("note:C#3+12c") == 1);
    CHECK(pitch_class_of_label("note:B-1") == 11);
    CHECK(error_code([] { pitch_class_of_label("hz:440"); }) == Errc::WrongKind);
}

TEST_CASE("chroma of A4 peaks at class 9 and preserves per-frame totals") {
    const auto c = cqt(testutil::cosine(440, 2.0), FrameSpec{}, CqtSpec{});
    const auto ch = chroma(c);
    REQUIRE(ch.n_dims() == 12);
    CHECK(ch.dim_labels[0] == "pc:0");
    CHECK(ch.kind == FeatureKind::chroma);
    for (Eigen::Index t = 0; t < ch.n_frames(); ++t) {
        CHECK(argmax(ch.values.row(t)) == 9);
        CHECK(ch.values.row(t).sum() == doctest::Approx(c.values.row(t).sum()).epsilon(1e-12));
    }
    CHECK(error_code([] {
              FeatureMatrix bad;
              bad.kind = FeatureKind::mfcc;
              chroma(bad);
          }) == Errc::WrongKind);
}

TEST_CASE("C major triad chroma has top classes {0, 4, 7}") {
    auto a = testutil::sine(261.6256, 2.0, 22050, 0.3);
    a.samples += testutil::sine(329.6276, 2.0, 22050, 0.3).samples;
    a.samples += testutil::sine(391.9954, 2.0, 22050, 0.3).samples;
    const auto ch = chroma(cqt(a, FrameSpec{}, CqtSpec{}));
    const Eigen::VectorXd mean = ch.values.colwise().mean();
    std::vector<int> order(12);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return mean[x] > mean[y]; });
    CHECK(std::set<int>(order.begin(), order.begin() + 3) == std::set<int>{0, 4, 7});
}

TEST_CASE("chroma does not depend on the order of CQT bins") {
    auto a = testutil::sine(110, 1.0, 22050, 0.3);
    a.samples += testutil::sine(880, 1.0, 22050, 0.3).samples;
    a.samples += testutil::sine(196, 1.0, 22050, 0.3).samples;
    const auto c = cqt(a, FrameSpec{}, CqtSpec{});
    // move whole octaves around: octave blocks in order 6,0,3,1,5,2,4
    FeatureMatrix shuffled = c;
    const int perm[7] = {6, 0, 3, 1, 5, 2, 4};
    for (int block = 0; block < 7; ++block)
        for (int j = 0; j < 12; ++j) {
            shuffled.values.col(block * 12 + j) = c.values.col(perm[block] * 12 + j);
            shuffled.dim_labels[std::size_t(block * 12 + j)] = c.dim_labels[std::size_t(perm[block] * 12 + j)];
        }
    CHECK((chroma(shuffled).values - chroma(c).values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("onset envelope matches brute-force rectified flux") {
    const Eigen::MatrixXd v = testutil::random_matrix(5, 8, 11).cwiseAbs();
    const auto env = onset_envelope(spectrogram_of(v));
    CHECK(env.kind == FeatureKind::onset);
    CHECK(env.values(0, 0) == 0.0);
    for (int t = 1; t < 5; ++t) {
        double flux = 0;
        for (int k = 0; k < 8; ++k) {
            const double d = std::sqrt(v(t, k)) - std::sqrt(v(t - 1, k));
            if (d > 0) flux += d;
        }
        CHECK(std::abs(env.values(t, 0) - flux) < 1e-12);
    }
}

TEST_CASE("onset envelope of constant and single-spike spectrograms") {
    CHECK(onset_envelope(spectrogram_of(Eigen::MatrixXd::Constant(6, 4, 3.0))).values.isZero(0.0));
    Eigen::MatrixXd spike = Eigen::MatrixXd::Constant(6, 4, 1.0);
    spike.row(3).setConstant(9.0);
    const auto env = onset_envelope(spectrogram_of(spike));
    for (int t = 0; t < 6; ++t) {
        if (t == 3)
            CHECK(env.values(t, 0) == doctest::Approx(8.0));
        else
            CHECK(env.values(t, 0) == 0.0);
    }
}
