#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qevo {

/// Machine-readable failure categories. The CLI reports these verbatim.
enum class Errc {
  UnknownToken,
  LengthMismatch,
  InvalidMolecule,
  UnsupportedAtomClass,
  MissingReference,
  WidthMismatch,
  TooManyQubits,
  NonFiniteLoss,
  SpaceTooLarge,
  ScopeMismatch,
  DegenerateCovariance,
  InvalidConfig,
  UnknownPreset,
  Io,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace qevo
