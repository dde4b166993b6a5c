#pragma once

#include <stdexcept>
#include <string>

namespace optomod {

// Each error class maps to a distinct CLI exit code (see exit_code()).
enum class ErrorKind {
  Parse = 2,
  Validation = 3,
  StepSizeUnderflow = 4,
  Diverged = 5,
  InsufficientData = 6,
  SingularDenominator = 7,
  ResonantDenominator = 8,
  NonRealMean = 9,
  InvalidCM = 10,
  NotConverged = 11,
  EigenFailure = 12,
  UnstableRatio = 13,
  Io = 14,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::ResonantDenominator: return "ResonantDenominator";
    case ErrorKind::NonRealMean: return "NonRealMean";
    case ErrorKind::InvalidCM: return "InvalidCM";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::UnstableRatio: return "UnstableRatio";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace optomod
