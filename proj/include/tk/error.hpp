#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tk {

enum class Errc {
  IndexOutOfRange,
  DegenerateTriple,
  EmptyInput,
  Parse,
  Io,
  LengthMismatch,
  TieDetected,
  MissingAnchor,
  MissingNonAnchor,
  ContradictionPresent,
  DimensionMismatch,
  NonPositiveWeight,
  NonSymmetric,
  NotPsd,
  DuplicatePoints,
  NegativeSquaredDistance,
  InvalidArgument,
};

std::string_view to_string(Errc code);

/// Exception carrying a machine-readable code and, where relevant, the
/// object indices that triggered it (e.g. objects that never act as anchor).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::vector<std::size_t> objects = {});

  Errc code() const noexcept { return code_; }
  const std::vector<std::size_t>& objects() const noexcept { return objects_; }

 private:
  Errc code_;
  std::vector<std::size_t> objects_;
};

}  // namespace tk
