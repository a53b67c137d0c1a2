#include "mirviz/error.hpp"

namespace mirviz {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::BadMagic: return "BadMagic";
        case Errc::UnsupportedEncoding: return "UnsupportedEncoding";
        case Errc::TruncatedChunk: return "TruncatedChunk";
        case Errc::EmptySignal: return "EmptySignal";
        case Errc::BadRange: return "BadRange";
        case Errc::BinAboveNyquist: return "BinAboveNyquist";
        case Errc::WrongKind: return "WrongKind";
        case Errc::NotMonotonic: return "NotMonotonic";
        case Errc::TooFewBeats: return "TooFewBeats";
        case Errc::ParseError: return "ParseError";
        case Errc::NoBeats: return "NoBeats";
        case Errc::NoOverlap: return "NoOverlap";
        case Errc::BadHeader: return "BadHeader";
        case Errc::UnsupportedFormat: return "UnsupportedFormat";
        case Errc::UnsupportedDivision: return "UnsupportedDivision";
        case Errc::TruncatedTrack: return "TruncatedTrack";
        case Errc::MalformedVlq: return "MalformedVlq";
        case Errc::RangeError: return "RangeError";
        case Errc::EmptyList: return "EmptyList";
        case Errc::ZeroProfile: return "ZeroProfile";
        case Errc::TooFewPoints: return "TooFewPoints";
        case Errc::KTooLarge: return "KTooLarge";
        case Errc::NotSymmetric: return "NotSymmetric";
        case Errc::BadDiagonal: return "BadDiagonal";
        case Errc::PerplexityTooLarge: return "PerplexityTooLarge";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::EmptyVector: return "EmptyVector";
        case Errc::TooFewFrames: return "TooFewFrames";
        case Errc::NotSquare: return "NotSquare";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::NonFinite: return "NonFinite";
        case Errc::WrongDimensionality: return "WrongDimensionality";
        case Errc::EmptyEmbedding: return "EmptyEmbedding";
        case Errc::NegativeHeight: return "NegativeHeight";
        case Errc::TooManyVariables: return "TooManyVariables";
    }
    return "Unknown";
}

}  // namespace mirviz
