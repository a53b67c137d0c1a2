#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mirviz {

struct NoteEvent {
    double onset = 0;     // seconds
    double duration = 0;  // seconds
    int pitch = 60;       // MIDI number
    int velocity = 64;
    int channel = 0;
};

struct TempoChange {
    std::uint64_t tick = 0;
    std::uint32_t us_per_quarter = 500000;
};

struct NoteList {
    std::vector<NoteEvent> notes;
    std::optional<int> ticks_per_quarter;
    std::vector<TempoChange> tempo_map;
    /// Note-offs that matched no sounding note (ignored while parsing).
    int dangling_note_offs = 0;

    /// Sorts by (onset, pitch, channel).
    void sort();
};

// --- Standard MIDI Files -----------------------------------------------------

struct VlqDecode {
    std::uint32_t value = 0;
    std::size_t length = 0;  // bytes consumed
};

/// Decodes a MIDI variable-length quantity (at most 4 bytes). Throws
/// MalformedVlq on a 5th continuation byte, TruncatedTrack on end of input.
VlqDecode decode_vlq(std::span<const std::uint8_t> bytes);

/// Encodes a value below 2^28 as a variable-length quantity.
std::vector<std::uint8_t> encode_vlq(std::uint32_t value);

/// Parses format 0/1 SMF with ticks-per-quarter division; tracks are merged.
NoteList parse_smf(std::span<const std::uint8_t> bytes);

NoteList read_smf_file(const std::string& path);

/// CSV with header "onset,duration,pitch,velocity".
NoteList parse_note_csv(const std::string& text);

// --- Pitch-class abstractions --------------------------------------------------

using PcVector = Eigen::Matrix<double, 12, 1>;

enum class Normalization { raw, probability };

struct PitchClassProfile {
    PcVector weights = PcVector::Zero();
    Normalization normalization = Normalization::raw;

    /// Weights scaled to sum to 1; an all-zero profile stays all-zero.
    PitchClassProfile normalized() const;
};

enum class Weighting { count, duration };

Weighting parse_weighting(const std::string& name);
std::string to_string(Weighting w);

PitchClassProfile pitch_class_histogram(const NoteList& notes, Weighting weighting);

using TransitionMatrix = Eigen::Matrix<int, 12, 12>;

/// Counts pitch-class transitions between consecutive notes in sort order.
TransitionMatrix pc_transition_matrix(const NoteList& notes);

/// Signed semitone steps between consecutive notes; throws EmptyList.
std::vector<int> interval_sequence(const NoteList& notes);

inline int pitch_class(int midi_pitch) { return ((midi_pitch % 12) + 12) % 12; }

class PitchClassSet {
public:
    PitchClassSet() = default;
    PitchClassSet(std::initializer_list<int> classes);
    static PitchClassSet from_vector(const std::vector<int>& classes);
    static PitchClassSet chromatic();

    bool contains(int pc) const { return bits_.test(std::size_t(pc)); }
    std::size_t size() const { return bits_.count(); }
    bool empty() const { return bits_.none(); }
    std::vector<int> members() const;

    PitchClassSet operator|(const PitchClassSet& o) const { return PitchClassSet(bits_ | o.bits_); }
    PitchClassSet operator&(const PitchClassSet& o) const { return PitchClassSet(bits_ & o.bits_); }
    PitchClassSet operator-(const PitchClassSet& o) const { return PitchClassSet(bits_ & ~o.bits_); }
    PitchClassSet complement() const { return PitchClassSet(~bits_); }
    bool operator==(const PitchClassSet& o) const = default;

private:
    explicit PitchClassSet(std::bitset<12> bits) : bits_(bits) {}
    std::bitset<12> bits_;
};

struct SetPartition {
    PitchClassSet only_a;
    PitchClassSet both;
    PitchClassSet only_b;
};

SetPartition set_partition(const PitchClassSet& a, const PitchClassSet& b);

enum class Mode { major, minor };

std::string to_string(Mode mode);

struct KeyEstimate {
    int tonic = 0;
    Mode mode = Mode::major;
    double score = 0;
};

/// Scale-membership templates for tonic C.
struct KeyTemplates {
    PcVector major;
    PcVector minor;

    static KeyTemplates binary_scales();
};

/// Pearson correlation of a and b; 0 when either has zero variance.
double pearson(const PcVector& a, const PcVector& b);

/// Best of the 24 rotated templates by Pearson correlation. Ties prefer major,
/// then the lower tonic.
KeyEstimate estimate_key(const PitchClassProfile& profile,
                         const KeyTemplates& templates = KeyTemplates::binary_scales());

}  // namespace mirviz
