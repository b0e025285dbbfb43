#include "qevo/error.hpp"

namespace qevo {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::UnknownToken: return "UnknownToken";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::InvalidMolecule: return "InvalidMolecule";
    case Errc::UnsupportedAtomClass: return "UnsupportedAtomClass";
    case Errc::MissingReference: return "MissingReference";
    case Errc::WidthMismatch: return "WidthMismatch";
    case Errc::TooManyQubits: return "TooManyQubits";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::SpaceTooLarge: return "SpaceTooLarge";
    case Errc::ScopeMismatch: return "ScopeMismatch";
    case Errc::DegenerateCovariance: return "DegenerateCovariance";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::UnknownPreset: return "UnknownPreset";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace qevo
