#pragma once

#include <stdexcept>
#include <string>

namespace morin {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Scenario violates a structural hypothesis (m - n odd and positive, ...).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Constraint Jacobian of M is rank deficient somewhere.
class RegularityError : public Error {
 public:
  using Error::Error;
};

/// f has a singular point that is not of Morin type.
class MorinError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace morin
