#include "homog/error.hpp"

namespace homog {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
    case Errc::DuplicateNode: return "DuplicateNode";
    case Errc::DanglingEdge: return "DanglingEdge";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::NotStronglyConnected: return "NotStronglyConnected";
    case Errc::SelfEdge: return "SelfEdge";
    case Errc::NonPositiveRate: return "NonPositiveRate";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::BrokenPath: return "BrokenPath";
    case Errc::SolveFailed: return "SolveFailed";
    case Errc::NonPositiveEntry: return "NonPositiveEntry";
    case Errc::Inconsistent: return "Inconsistent";
    case Errc::NotAPermutation: return "NotAPermutation";
    case Errc::NotReversible: return "NotReversible";
    case Errc::ConditionNotMet: return "ConditionNotMet";
    case Errc::InvalidResolution: return "InvalidResolution";
    case Errc::ReflectionOverflow: return "ReflectionOverflow";
    case Errc::DegenerateGrid: return "DegenerateGrid";
    case Errc::DriftNotCentered: return "DriftNotCentered";
    case Errc::InvariantViolated: return "InvariantViolated";
  }
  return "Unknown";
}

}  // namespace homog
