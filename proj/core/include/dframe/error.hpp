#pragma once

#include <stdexcept>
#include <string>

namespace dframe {

// Base of every error thrown by the library. The CLI maps these onto exit
// codes, so each subclass corresponds to one failure category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or table lengths do not agree with the space or model.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Input outside an operation's domain (empty space, bad weight, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A basis or family is numerically rank deficient.
class DegeneracyError : public Error {
 public:
  DegeneracyError(const std::string& what, long column)
      : Error(what), column_(column) {}
  long column() const noexcept { return column_; }

 private:
  long column_;
};

// The operation needs a uniform periodic grid (or another layout) it did
// not get.
class UnsupportedSpaceError : public Error {
 public:
  using Error::Error;
};

// Maps built on different spaces or models were combined.
class MismatchError : public Error {
 public:
  using Error::Error;
};

// A documented precondition (Gel'fand basis, frame, ...) does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An operator that must be inverted is singular.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Refinement schedules too short to fit a growth law, or an index outside
// the schedule.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace dframe
