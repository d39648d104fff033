#pragma once

#include <stdexcept>
#include <string>

namespace epspectra {

/// Base class for numerical failures (ill-conditioned input, solver breakdown).
/// Precondition violations are reported as DomainError instead.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition or malformed argument.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

#define EPSPECTRA_NUMERICAL_ERROR(Name)                  \
  class Name : public NumericalError {                   \
   public:                                               \
    explicit Name(const std::string& what)               \
        : NumericalError(std::string(#Name ": ") + what) {} \
  };

EPSPECTRA_NUMERICAL_ERROR(SingularMatrix)
EPSPECTRA_NUMERICAL_ERROR(NoConvergence)
EPSPECTRA_NUMERICAL_ERROR(NoCoalescence)
EPSPECTRA_NUMERICAL_ERROR(NotAnEP)
EPSPECTRA_NUMERICAL_ERROR(ChainBreakdown)
EPSPECTRA_NUMERICAL_ERROR(SeriesDiverges)
EPSPECTRA_NUMERICAL_ERROR(RootFindingFailure)
EPSPECTRA_NUMERICAL_ERROR(DegenerateData)
EPSPECTRA_NUMERICAL_ERROR(DegenerateSpectrum)
EPSPECTRA_NUMERICAL_ERROR(DegenerateClosure)
EPSPECTRA_NUMERICAL_ERROR(InsufficientConvergence)

#undef EPSPECTRA_NUMERICAL_ERROR

}  // namespace epspectra
