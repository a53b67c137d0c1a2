// Standard MIDI File reader: format 0/1, ticks-per-quarter division.

#include <algorithm>
#include <deque>
#include <fstream>
#include <iterator>
#include <map>

#include "mirviz/error.hpp"
#include "mirviz/symbolic.hpp"

namespace mirviz {

namespace {

std::uint32_t read_be(std::span<const std::uint8_t> b, std::size_t at, int n) {
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 8) | b[at + std::size_t(i)];
    return v;
}

struct RawNote {
    std::uint64_t on_tick;
    std::uint64_t off_tick;
    int pitch;
    int velocity;
    int channel;
};

struct TrackResult {
    std::vector<RawNote> notes;
    std::vector<TempoChange> tempos;
    int dangling = 0;
};

class TrackReader {
public:
    explicit TrackReader(std::span<const std::uint8_t> data) : data_(data) {}

    TrackResult read() {
        TrackResult out;
        std::map<std::pair<int, int>, std::deque<std::pair<std::uint64_t, int>>> sounding;
        std::uint64_t tick = 0;
        std::uint8_t running = 0;

        while (pos_ < data_.size()) {
            tick += vlq();
            std::uint8_t status = byte();
            if (status < 0x80) {
                if (running == 0) throw Error(Errc::TruncatedTrack, "data byte without running status");
                --pos_;
                status = running;
            }

            if (status == 0xFF) {
                running = 0;
                const std::uint8_t type = byte();
                const std::uint32_t len = vlq();
                const auto body = take(len);
                if (type == 0x2F) break;
                if (type == 0x51 && len == 3)
                    out.tempos.push_back({tick, read_be(body, 0, 3)});
                continue;
            }
            if (status == 0xF0 || status == 0xF7) {
                running = 0;
                take(vlq());
                continue;
            }
            if (status >= 0xF0) {
                // System common/real-time bytes are not expected in files; skip their payload.
                take(status == 0xF2 ? 2 : (status == 0xF3 || status == 0xF1) ? 1 : 0);
                continue;
            }

            running = status;
            const int kind = status >> 4;
            const int channel = status & 0x0F;
            const int n_data = (kind == 0xC || kind == 0xD) ? 1 : 2;
            const auto body = take(std::size_t(n_data));
            if (kind != 0x8 && kind != 0x9) continue;

            const int pitch = body[0] & 0x7F;
            const int velocity = body[1] & 0x7F;
            auto& queue = sounding[{channel, pitch}];
            if (kind == 0x9 && velocity > 0) {
                queue.emplace_back(tick, velocity);
            } else if (queue.empty()) {
                ++out.dangling;
            } else {
                out.notes.push_back({queue.front().first, tick, pitch, queue.front().second, channel});
                queue.pop_front();
            }
        }

        for (auto& [key, queue] : sounding)
            for (auto& [on_tick, velocity] : queue)
                out.notes.push_back({on_tick, tick, key.second, velocity, key.first});
        return out;
    }

private:
    std::uint8_t byte() {
        if (pos_ >= data_.size()) throw Error(Errc::TruncatedTrack, "unexpected end of track");
        return data_[pos_++];
    }

    std::span<const std::uint8_t> take(std::size_t n) {
        if (n > data_.size() - pos_) throw Error(Errc::TruncatedTrack, "event extends past end of track");
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::uint32_t vlq() {
        const auto d = decode_vlq(data_.subspan(pos_));
        pos_ += d.length;
        return d.value;
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

class TickClock {
public:
    TickClock(std::vector<TempoChange> tempos, int ppq) : ppq_(ppq) {
        std::stable_sort(tempos.begin(), tempos.end(),
                         [](const TempoChange& a, const TempoChange& b) { return a.tick < b.tick; });
        segments_.push_back({0, 500000, 0.0});
        for (const auto& t : tempos) {
            auto& last = segments_.back();
            if (t.tick == last.tick) {
                last.us_per_quarter = t.us_per_quarter;
                continue;
            }
            const double start = seconds(t.tick);
            segments_.push_back({t.tick, t.us_per_quarter, start});
        }
    }

    double seconds(std::uint64_t tick) const {
        auto it = std::upper_bound(segments_.begin(), segments_.end(), tick,
                                   [](std::uint64_t t, const Segment& s) { return t < s.tick; });
        const Segment& s = *std::prev(it);
        return s.start_seconds + double(tick - s.tick) * double(s.us_per_quarter) / (1e6 * double(ppq_));
    }

private:
    struct Segment {
        std::uint64_t tick;
        std::uint32_t us_per_quarter;
        double start_seconds;
    };
    std::vector<Segment> segments_;
    int ppq_;
};

}  // namespace

VlqDecode decode_vlq(std::span<const std::uint8_t> bytes) {
    VlqDecode out;
    for (std::size_t i = 0; i < 4; ++i) {
        if (i >= bytes.size()) throw Error(Errc::TruncatedTrack, "variable-length quantity runs past end");
        out.value = (out.value << 7) | (bytes[i] & 0x7Fu);
        if ((bytes[i] & 0x80u) == 0) {
            out.length = i + 1;
            return out;
        }
    }
    throw Error(Errc::MalformedVlq, "more than 4 bytes");
}

std::vector<std::uint8_t> encode_vlq(std::uint32_t value) {
    if (value >= (1u << 28)) throw Error(Errc::RangeError, "VLQ values must be below 2^28");
    std::vector<std::uint8_t> out{std::uint8_t(value & 0x7F)};
    while ((value >>= 7) != 0) out.insert(out.begin(), std::uint8_t(0x80 | (value & 0x7F)));
    return out;
}

NoteList parse_smf(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 14 || std::string(bytes.begin(), bytes.begin() + 4) != "MThd")
        throw Error(Errc::BadHeader, "missing MThd");
    const std::uint32_t header_len = read_be(bytes, 4, 4);
    if (header_len < 6 || header_len > bytes.size() - 8) throw Error(Errc::BadHeader, "bad header length");
    const auto format = read_be(bytes, 8, 2);
    const auto division = read_be(bytes, 12, 2);
    if (format > 1) throw Error(Errc::UnsupportedFormat, "format " + std::to_string(format));
    if (division & 0x8000u) throw Error(Errc::UnsupportedDivision, "SMPTE division");
    if (division == 0) throw Error(Errc::BadHeader, "zero ticks per quarter");

    std::vector<TrackResult> tracks;
    std::size_t pos = 8 + header_len;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t len = read_be(bytes, pos + 4, 4);
        if (len > bytes.size() - pos - 8) throw Error(Errc::TruncatedTrack, "chunk extends past end of file");
        if (std::string(bytes.begin() + long(pos), bytes.begin() + long(pos) + 4) == "MTrk")
            tracks.push_back(TrackReader(bytes.subspan(pos + 8, len)).read());
        pos += 8 + len;
    }
    if (pos != bytes.size()) throw Error(Errc::TruncatedTrack, "trailing partial chunk header");

    NoteList list;
    list.ticks_per_quarter = int(division);
    for (const auto& t : tracks) {
        list.tempo_map.insert(list.tempo_map.end(), t.tempos.begin(), t.tempos.end());
        list.dangling_note_offs += t.dangling;
    }
    std::stable_sort(list.tempo_map.begin(), list.tempo_map.end(),
                     [](const TempoChange& a, const TempoChange& b) { return a.tick < b.tick; });

    const TickClock clock(list.tempo_map, int(division));
    for (const auto& t : tracks) {
        for (const auto& n : t.notes) {
            NoteEvent e;
            e.onset = clock.seconds(n.on_tick);
            e.duration = clock.seconds(n.off_tick) - e.onset;
            e.pitch = n.pitch;
            e.velocity = n.velocity;
            e.channel = n.channel;
            list.notes.push_back(e);
        }
    }
    list.sort();
    return list;
}

NoteList read_smf_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::InvalidArgument, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_smf(bytes);
}

}  // namespace mirviz
