#pragma once

#include <stdexcept>
#include <string>

namespace cbf {

enum class ErrorKind {
  NotHermitian,
  NotPSD,
  NoConvergence,
  IllConditioned,
  Overflow,
  DimensionMismatch,
  LengthMismatch,
  NotAGroup,
  DecompositionMismatch,
  GridMismatch,
  InvalidInput,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NotAGroup: return "NotAGroup";
    case ErrorKind::DecompositionMismatch: return "DecompositionMismatch";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

/// Library-wide exception. `kind()` distinguishes numerical failures
/// (NoConvergence, IllConditioned, Overflow) from bad input.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::NoConvergence || kind_ == ErrorKind::IllConditioned ||
           kind_ == ErrorKind::Overflow;
  }

 private:
  ErrorKind kind_;
};

/// Thrown when an iterative solver hits its cap; carries the best bounds seen.
class SolverError : public Error {
 public:
  SolverError(ErrorKind kind, const std::string& what, double lower, double upper)
      : Error(kind, what), lower_(lower), upper_(upper) {}

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double lower_;
  double upper_;
};

}  // namespace cbf
