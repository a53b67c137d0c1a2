#include "mirviz/audio_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

namespace mirviz {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
    return std::uint16_t(b[at] | (b[at + 1] << 8));
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
    return std::uint32_t(b[at]) | (std::uint32_t(b[at + 1]) << 8) | (std::uint32_t(b[at + 2]) << 16) |
           (std::uint32_t(b[at + 3]) << 24);
}

bool tag_equals(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
    return std::memcmp(b.data() + at, tag, 4) == 0;
}

struct FmtChunk {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t block_align = 0;
    std::uint16_t bits = 0;
};

FmtChunk parse_fmt(std::span<const std::uint8_t> body) {
    if (body.size() < 16) throw Error(Errc::TruncatedChunk, "fmt chunk shorter than 16 bytes");
    FmtChunk fmt;
    fmt.format = read_u16(body, 0);
    fmt.channels = read_u16(body, 2);
    fmt.sample_rate = read_u32(body, 4);
    fmt.block_align = read_u16(body, 12);
    fmt.bits = read_u16(body, 14);
    if (fmt.format == kFormatExtensible) {
        if (body.size() < 26) throw Error(Errc::TruncatedChunk, "extensible fmt chunk too short");
        // First two bytes of the sub-format GUID carry the plain format code.
        fmt.format = read_u16(body, 24);
    }
    return fmt;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(std::uint8_t(v & 0xFF));
    out.push_back(std::uint8_t(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out.push_back(std::uint8_t((v >> s) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

}  // namespace

WindowKind parse_window_kind(const std::string& name) {
    if (name == "hann") return WindowKind::hann;
    if (name == "hamming") return WindowKind::hamming;
    if (name == "rect") return WindowKind::rect;
    throw Error(Errc::InvalidArgument, "unknown window '" + name + "'");
}

std::string to_string(WindowKind kind) {
    switch (kind) {
        case WindowKind::hann: return "hann";
        case WindowKind::hamming: return "hamming";
        case WindowKind::rect: return "rect";
    }
    return "hann";
}

void FrameSpec::validate() const {
    if (frame_length <= 0 || hop <= 0 || hop > frame_length)
        throw Error(Errc::InvalidArgument, "frame spec requires 0 < hop <= frame_length");
}

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || !tag_equals(bytes, 0, "RIFF") || !tag_equals(bytes, 8, "WAVE"))
        throw Error(Errc::BadMagic, "not a RIFF/WAVE stream");

    std::optional<FmtChunk> fmt;
    std::optional<std::span<const std::uint8_t>> data;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t size = read_u32(bytes, pos + 4);
        const std::size_t body_at = pos + 8;
        if (size > bytes.size() - body_at) throw Error(Errc::TruncatedChunk, "chunk extends past end of stream");
        auto body = bytes.subspan(body_at, size);
        if (tag_equals(bytes, pos, "fmt ")) {
            fmt = parse_fmt(body);
        } else if (tag_equals(bytes, pos, "data")) {
            data = body;
        }
        pos = body_at + size + (size & 1u);
    }
    if (!fmt) throw Error(Errc::TruncatedChunk, "missing fmt chunk");
    if (!data) throw Error(Errc::TruncatedChunk, "missing data chunk");

    const bool pcm16 = fmt->format == kFormatPcm && fmt->bits == 16;
    const bool float32 = fmt->format == kFormatFloat && fmt->bits == 32;
    if (!pcm16 && !float32)
        throw Error(Errc::UnsupportedEncoding,
                    "format " + std::to_string(fmt->format) + " with " + std::to_string(fmt->bits) + " bits");
    if (fmt->channels < 1 || fmt->channels > 2)
        throw Error(Errc::UnsupportedEncoding, std::to_string(fmt->channels) + " channels");
    if (fmt->sample_rate == 0) throw Error(Errc::UnsupportedEncoding, "zero sample rate");

    const std::size_t sample_bytes = fmt->bits / 8;
    const std::size_t frame_bytes = sample_bytes * fmt->channels;
    const std::size_t n_frames = data->size() / frame_bytes;

    auto sample_at = [&](std::size_t offset) -> double {
        if (pcm16) return double(std::int16_t(read_u16(*data, offset))) / 32768.0;
        const float f = std::bit_cast<float>(read_u32(*data, offset));
        if (!std::isfinite(f)) return 0.0;
        return std::clamp(double(f), -1.0, 1.0);
    };

    AudioBuffer audio;
    audio.sample_rate = int(fmt->sample_rate);
    audio.samples.resize(Eigen::Index(n_frames));
    for (std::size_t i = 0; i < n_frames; ++i) {
        const std::size_t at = i * frame_bytes;
        if (fmt->channels == 1) {
            audio.samples[Eigen::Index(i)] = sample_at(at);
        } else {
            audio.samples[Eigen::Index(i)] = 0.5 * (sample_at(at) + sample_at(at + sample_bytes));
        }
    }
    return audio;
}

std::vector<std::uint8_t> encode_wav_pcm16(const AudioBuffer& audio) {
    const auto n = std::uint32_t(audio.samples.size());
    std::vector<std::uint8_t> out;
    out.reserve(44 + 2 * std::size_t(n));
    put_tag(out, "RIFF");
    put_u32(out, 36 + 2 * n);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, kFormatPcm);
    put_u16(out, 1);
    put_u32(out, std::uint32_t(audio.sample_rate));
    put_u32(out, std::uint32_t(audio.sample_rate) * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    put_tag(out, "data");
    put_u32(out, 2 * n);
    for (Eigen::Index i = 0; i < audio.samples.size(); ++i) {
        const double scaled = std::round(audio.samples[i] * 32768.0);
        put_u16(out, std::uint16_t(std::int16_t(std::clamp(scaled, -32768.0, 32767.0))));
    }
    return out;
}

AudioBuffer read_wav_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::InvalidArgument, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_wav(bytes);
}

void write_wav_file(const std::string& path, const AudioBuffer& audio) {
    const auto bytes = encode_wav_pcm16(audio);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n) {
    if (n == 1) return 0;
    const Eigen::Index period = 2 * (n - 1);
    Eigen::Index m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - m;
}

Eigen::MatrixXd frame_signal(const AudioBuffer& audio, const FrameSpec& spec) {
    spec.validate();
    const Eigen::Index n = audio.samples.size();
    if (n == 0) throw Error(Errc::EmptySignal);

    const Eigen::Index len = spec.frame_length;
    const Eigen::Index pad = len / 2;
    const Eigen::VectorXd window = make_window(spec.window, len);
    const Eigen::Index n_frames = frame_count(n, spec.hop);

    Eigen::MatrixXd frames(n_frames, len);
    for (Eigen::Index f = 0; f < n_frames; ++f) {
        const Eigen::Index start = f * spec.hop - pad;
        for (Eigen::Index j = 0; j < len; ++j)
            frames(f, j) = audio.samples[reflect_index(start + j, n)] * window[j];
    }
    return frames;
}

}  // namespace mirviz
