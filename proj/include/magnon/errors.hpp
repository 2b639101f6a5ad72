#pragma once

#include <stdexcept>
#include <string>

namespace magnon {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state with zero norm was requested.
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

/// A Fock index lies outside the truncated basis.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// An operation received input violating its precondition
/// (non-Hermitian generator, negative duration, unnormalized state, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A balanced beamsplitter was requested outside |delta_omega| <= 2|g|.
class UnreachableBalanceError : public Error {
 public:
  using Error::Error;
};

/// Relative phase requested between amplitudes where one vanishes.
class UndefinedPhaseError : public Error {
 public:
  using Error::Error;
};

}  // namespace magnon
