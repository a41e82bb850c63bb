#include "primeorbits/errors.hpp"

namespace primeorbits {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidMap: return "InvalidMap";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DegreeCapExceeded: return "DegreeCapExceeded";
    case ErrorKind::HorizonExceeded: return "HorizonExceeded";
    case ErrorKind::GridOutsideBase: return "GridOutsideBase";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::ResolutionTooFine: return "ResolutionTooFine";
    case ErrorKind::CircleCase: return "CircleCase";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DegenerateTransform: return "DegenerateTransform";
    case ErrorKind::CriticalValueCollision: return "CriticalValueCollision";
    case ErrorKind::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorKind::NotCantor: return "NotCantor";
    case ErrorKind::RootPolishFailure: return "RootPolishFailure";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::OrbitGroupingConflict: return "OrbitGroupingConflict";
    case ErrorKind::CriticalProximity: return "CriticalProximity";
    case ErrorKind::EmptyLevel: return "EmptyLevel";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::FactorSingular: return "FactorSingular";
    case ErrorKind::UntrustworthyRegion: return "UntrustworthyRegion";
    case ErrorKind::ClosureViolation: return "ClosureViolation";
    case ErrorKind::FitDegenerate: return "FitDegenerate";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidMap:
    case ErrorKind::DomainError:
    case ErrorKind::DegreeCapExceeded:
    case ErrorKind::HorizonExceeded:
    case ErrorKind::GridOutsideBase:
    case ErrorKind::InsufficientPoints:
    case ErrorKind::ResolutionTooFine:
    case ErrorKind::CircleCase:
    case ErrorKind::IoError:
      return true;
    default:
      return false;
  }
}

}  // namespace primeorbits
