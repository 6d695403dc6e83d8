#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gerbelab {

enum class ErrorCode {
  DimensionMismatch,
  DegreeMismatch,
  InvalidNerve,
  CoverMismatch,
  NotACocycle,
  InconsistentPatches,
  ConnectionMismatch,
  CurvingMismatch,
  TwistedCocycleFail,
  UnitarityFail,
  ConnectionFail,
  GerbeMismatch,
  IntertwineFail,
  ParallelFail,
  NonConstantRank,
  NotNormal,
  XDependence,
  NotClosed,
  Degenerate,
  NotHamiltonian,
  Mismatch,
  NotInvariant,
  PatchGap,
  ParseError,
  UnknownField,
  BadReference,
  InvalidArgument,
};

const char* to_string(ErrorCode c);

// One offending simplex (or patch, or overlap) in a validation report.
struct Residual {
  std::string layer;
  std::vector<std::string> simplex;
  std::string value;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::vector<Residual> residuals = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        residuals_(std::move(residuals)) {}

  ErrorCode code() const { return code_; }
  const std::vector<Residual>& residuals() const { return residuals_; }

 private:
  ErrorCode code_;
  std::vector<Residual> residuals_;
};

}  // namespace gerbelab
