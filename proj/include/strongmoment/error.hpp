#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace strongmoment {

enum class Errc {
  NonHermitianInput,
  ConvergenceFailure,
  NotPSD,
  DimensionMismatch,
  AtomAtOrBelowZero,
  OrderOutOfRange,
  InconsistentShift,
  DegenerateDomain,
  NotContraction,
  SpectrumHit,
  KOutOfInterval,
  PoleHit,
  SingularInnerInverse,
  NonHerglotz,
  NotSolvable,
  ParseError,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::NonHermitianInput: return "NonHermitianInput";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::NotPSD: return "NotPSD";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::AtomAtOrBelowZero: return "AtomAtOrBelowZero";
    case Errc::OrderOutOfRange: return "OrderOutOfRange";
    case Errc::InconsistentShift: return "InconsistentShift";
    case Errc::DegenerateDomain: return "DegenerateDomain";
    case Errc::NotContraction: return "NotContraction";
    case Errc::SpectrumHit: return "SpectrumHit";
    case Errc::KOutOfInterval: return "KOutOfInterval";
    case Errc::PoleHit: return "PoleHit";
    case Errc::SingularInnerInverse: return "SingularInnerInverse";
    case Errc::NonHerglotz: return "NonHerglotz";
    case Errc::NotSolvable: return "NotSolvable";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Non-fatal numerical conditions. Collected alongside results; `--strict`
/// in the CLI escalates the first two to failures.
///
/// KernelWarning: Â has a kernel; S_{-2m} is not reproduced and round trips
/// skip negative moments.
/// DeflatedMass: T̃ has eigenvalue -1; those directions carry mass at
/// infinity and the top moment S_{2m} is not reproduced.
enum class Warning {
  KernelWarning,
  RangeConditionViolated,
  DeflatedMass,
  IllConditionedDefect,
};

inline std::string_view to_string(Warning w) {
  switch (w) {
    case Warning::KernelWarning: return "KernelWarning";
    case Warning::RangeConditionViolated: return "RangeConditionViolated";
    case Warning::DeflatedMass: return "DeflatedMass";
    case Warning::IllConditionedDefect: return "IllConditionedDefect";
  }
  return "Unknown";
}

inline void add_warning(std::vector<Warning>& list, Warning w) {
  for (auto existing : list) {
    if (existing == w) return;
  }
  list.push_back(w);
}

inline bool has_warning(const std::vector<Warning>& list, Warning w) {
  for (auto existing : list) {
    if (existing == w) return true;
  }
  return false;
}

}  // namespace strongmoment
