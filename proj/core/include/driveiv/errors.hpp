#pragma once

#include <stdexcept>
#include <string>

namespace driveiv {

// Root of the library's exception hierarchy. ValidationError covers bad
// inputs (dimensions, non-finite data, out-of-range parameters); SolverError
// covers numerical failures of iterative routines.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct SolverError : Error {
  using Error::Error;
};

struct DimensionMismatch final : ValidationError {
  using ValidationError::ValidationError;
};
struct UnderIdentified final : ValidationError {
  using ValidationError::ValidationError;
};
struct NonFinite final : ValidationError {
  using ValidationError::ValidationError;
};
struct RankDeficientInstruments final : ValidationError {
  using ValidationError::ValidationError;
};
struct SingularDesign final : ValidationError {
  using ValidationError::ValidationError;
};
struct SingularProjectedDesign final : ValidationError {
  using ValidationError::ValidationError;
};
struct SingularGram final : ValidationError {
  using ValidationError::ValidationError;
};
struct UnsupportedPair final : ValidationError {
  using ValidationError::ValidationError;
};
struct ZeroResiduals final : ValidationError {
  using ValidationError::ValidationError;
};
struct NonPositiveWeight final : ValidationError {
  using ValidationError::ValidationError;
};
struct MissingColumn final : ValidationError {
  using ValidationError::ValidationError;
};
struct EmptyPartition final : ValidationError {
  using ValidationError::ValidationError;
};
struct EmptySample final : ValidationError {
  using ValidationError::ValidationError;
};

struct SolverDidNotConverge final : SolverError {
  using SolverError::SolverError;
};
struct DualBracketFailure final : SolverError {
  using SolverError::SolverError;
};
struct DegenerateGamma final : SolverError {
  using SolverError::SolverError;
};

}  // namespace driveiv
