#pragma once

#include <stdexcept>
#include <string>

namespace nbt {

enum class ErrorCode {
  Domain,
  Size,
  SingularReference,
  DegeneratePolynomial,
  InsufficientSeed,
  NotApplicable,
  SingularRadius,
  NearDefective,
  HalfFillingAmbiguous,
  EPOnContour,
  AmbiguousLocalization,
  PairingViolation,
  Config,
  IO,
  Solver
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Size: return "size";
    case ErrorCode::SingularReference: return "singular-reference";
    case ErrorCode::DegeneratePolynomial: return "degenerate-polynomial";
    case ErrorCode::InsufficientSeed: return "insufficient-seed";
    case ErrorCode::NotApplicable: return "not-applicable";
    case ErrorCode::SingularRadius: return "singular-radius";
    case ErrorCode::NearDefective: return "near-defective";
    case ErrorCode::HalfFillingAmbiguous: return "half-filling-ambiguous";
    case ErrorCode::EPOnContour: return "ep-on-contour";
    case ErrorCode::AmbiguousLocalization: return "ambiguous-localization";
    case ErrorCode::PairingViolation: return "pairing-violation";
    case ErrorCode::Config: return "config";
    case ErrorCode::IO: return "io";
    case ErrorCode::Solver: return "solver";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nbt
