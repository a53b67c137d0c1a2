#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mirviz {

/// Named failure conditions raised by the library. The CLI maps every one of
/// these to exit code 2.
enum class Errc {
    InvalidArgument,
    // audio-io
    BadMagic,
    UnsupportedEncoding,
    TruncatedChunk,
    EmptySignal,
    // spectral
    BadRange,
    BinAboveNyquist,
    WrongKind,
    // beat-sync
    NotMonotonic,
    TooFewBeats,
    ParseError,
    NoBeats,
    NoOverlap,
    // symbolic
    BadHeader,
    UnsupportedFormat,
    UnsupportedDivision,
    TruncatedTrack,
    MalformedVlq,
    RangeError,
    EmptyList,
    ZeroProfile,
    // reduce
    TooFewPoints,
    KTooLarge,
    NotSymmetric,
    BadDiagonal,
    PerplexityTooLarge,
    // similarity
    LengthMismatch,
    EmptyVector,
    TooFewFrames,
    NotSquare,
    // pattern-graph
    EmptyInput,
    // render
    NonFinite,
    WrongDimensionality,
    EmptyEmbedding,
    NegativeHeight,
    TooManyVariables,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)),
          code_(code) {}
    explicit Error(Errc code) : Error(code, {}) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace mirviz
