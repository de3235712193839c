#pragma once

#include <stdexcept>
#include <string>

namespace ltqd {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched dimensions between operators, vectors, or bases.
struct DimensionError : Error {
  using Error::Error;
};

// Generator is defective (or numerically indistinguishable from defective)
// at some time; diagonalization refused there.
struct ExceptionalPointError : Error {
  using Error::Error;
};

// Eigenvalue branch assignment between adjacent grid points is ambiguous.
struct GaugeAmbiguityError : Error {
  using Error::Error;
};

// Integration produced non-finite values or violated a runtime bound.
struct IntegrationError : Error {
  using Error::Error;
};

// A matrix that must be a density matrix is not one.
struct InvalidStateError : Error {
  using Error::Error;
};

// A caller-supplied object violates its contract (wrong phase count,
// non-inverse coefficient pair, wrong model mode, ...).
struct ContractError : Error {
  using Error::Error;
};

}  // namespace ltqd
