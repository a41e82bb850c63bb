#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace primeorbits {

enum class ErrorKind {
  // input / validation problems
  ParseError,
  InvalidArgument,
  InvalidMap,
  DomainError,
  DegreeCapExceeded,
  HorizonExceeded,
  GridOutsideBase,
  InsufficientPoints,
  ResolutionTooFine,
  CircleCase,
  IoError,
  // numerical failures
  PoleHit,
  Overflow,
  DegenerateTransform,
  CriticalValueCollision,
  BranchAmbiguity,
  NotCantor,
  RootPolishFailure,
  NonConvergence,
  OrbitGroupingConflict,
  CriticalProximity,
  EmptyLevel,
  BracketFailure,
  FactorSingular,
  UntrustworthyRegion,
  ClosureViolation,
  FitDegenerate,
};

std::string_view to_string(ErrorKind kind);

/// True for errors caused by bad input rather than by the numerics.
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace primeorbits
