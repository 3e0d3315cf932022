#include "tk/error.hpp"

namespace tk {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DegenerateTriple: return "DegenerateTriple";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::Parse: return "Parse";
    case Errc::Io: return "IO";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TieDetected: return "TieDetected";
    case Errc::MissingAnchor: return "MissingAnchor";
    case Errc::MissingNonAnchor: return "MissingNonAnchor";
    case Errc::ContradictionPresent: return "ContradictionPresent";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonPositiveWeight: return "NonPositiveWeight";
    case Errc::NonSymmetric: return "NonSymmetric";
    case Errc::NotPsd: return "NotPsd";
    case Errc::DuplicatePoints: return "DuplicatePoints";
    case Errc::NegativeSquaredDistance: return "NegativeSquaredDistance";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message, std::vector<std::size_t> objects)
    : std::runtime_error(message), code_(code), objects_(std::move(objects)) {}

}  // namespace tk
