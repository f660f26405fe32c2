#pragma once

#include <stdexcept>
#include <string>

namespace lipminor {

// Every failure the library reports derives from Error. The kind decides how
// the CLI maps it onto an exit code.
enum class ErrorKind {
  kInput,          // malformed or invalid data (paths, CSV, JSON)
  kParameter,      // a numeric argument outside its admissible range
  kDomain,         // evaluator called outside the domain of its formula
  kContamination,  // the observation window is too small for the quantity
  kPrecondition,   // a mathematical precondition fails for this sample
  kNumerical,      // a numerical procedure could not reach its target
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::kInput, what) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what)
      : Error(ErrorKind::kParameter, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::kDomain, what) {}
};

class ContaminationError : public Error {
 public:
  explicit ContaminationError(const std::string& what)
      : Error(ErrorKind::kContamination, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorKind::kPrecondition, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

}  // namespace lipminor
