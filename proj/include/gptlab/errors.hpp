#pragma once

#include <stdexcept>
#include <string>

namespace gptlab {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Cone input is not pointed or not generating.
struct DegenerateError : Error {
  using Error::Error;
};

// A search exceeded its configured budget; results would be incomplete.
struct SearchBudgetExceededError : Error {
  using Error::Error;
};

// Operands built under different scalar modes (or eps) were mixed.
struct ScalarModeError : Error {
  using Error::Error;
};

// An observable does not match the states it is supposed to distinguish.
struct ObservableMismatchError : Error {
  using Error::Error;
};

// A map expected to be positive is not.
struct NotPositiveError : Error {
  using Error::Error;
};

// A supplied set of maps is not a group (closure/identity/inverses).
struct NotAGroupError : Error {
  using Error::Error;
};

// A group action fails the required transitivity.
struct NotTransitiveError : Error {
  using Error::Error;
};

// A supplied bipartite state is not equivariant under the group action.
struct EquivarianceError : Error {
  using Error::Error;
};

// Effects fail to form an observable on the requested composite.
struct NotObservableError : Error {
  using Error::Error;
};

// A vector claimed to be an effect is not one (negative somewhere, or above the unit).
struct InvalidEffectError : Error {
  using Error::Error;
};

// A vector claimed to be a state is not one (outside the cone, or unnormalized).
struct InvalidStateError : Error {
  using Error::Error;
};

// A correction map fails positivity or norm-contractivity.
struct CorrectionNotContractiveError : Error {
  using Error::Error;
};

// Bad CLI usage or malformed input files.
struct UsageError : Error {
  using Error::Error;
};

}  // namespace gptlab
