#include "gerbelab/error.hpp"

namespace gerbelab {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::InvalidNerve: return "InvalidNerve";
    case ErrorCode::CoverMismatch: return "CoverMismatch";
    case ErrorCode::NotACocycle: return "NotACocycle";
    case ErrorCode::InconsistentPatches: return "InconsistentPatches";
    case ErrorCode::ConnectionMismatch: return "ConnectionMismatch";
    case ErrorCode::CurvingMismatch: return "CurvingMismatch";
    case ErrorCode::TwistedCocycleFail: return "TwistedCocycleFail";
    case ErrorCode::UnitarityFail: return "UnitarityFail";
    case ErrorCode::ConnectionFail: return "ConnectionFail";
    case ErrorCode::GerbeMismatch: return "GerbeMismatch";
    case ErrorCode::IntertwineFail: return "IntertwineFail";
    case ErrorCode::ParallelFail: return "ParallelFail";
    case ErrorCode::NonConstantRank: return "NonConstantRank";
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::XDependence: return "XDependence";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::NotHamiltonian: return "NotHamiltonian";
    case ErrorCode::Mismatch: return "Mismatch";
    case ErrorCode::NotInvariant: return "NotInvariant";
    case ErrorCode::PatchGap: return "PatchGap";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::BadReference: return "BadReference";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace gerbelab
