#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace invint {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text. `offset` is the 0-based byte position.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error("parse error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownVariable : public Error {
 public:
  UnknownVariable(std::size_t offset, const std::string& name)
      : Error("unknown variable '" + name + "' at offset " + std::to_string(offset)),
        offset_(offset),
        name_(name) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::size_t offset_;
  std::string name_;
};

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(const std::string& name)
      : Error("variable '" + name + "' is not bound"), name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// Evaluation left the real domain (log of non-positive, division by zero,
// even root of a negative, non-finite result).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A function assumed strictly monotone was found not to be. x1 < x2 straddle
// the point where the ordering flips.
class NonMonotone : public Error {
 public:
  NonMonotone(double x1, double x2, const std::string& message)
      : Error(message), x1_(x1), x2_(x2) {}

  double x1() const noexcept { return x1_; }
  double x2() const noexcept { return x2_; }

 private:
  double x1_;
  double x2_;
};

class OutOfCodomain : public Error {
 public:
  using Error::Error;
};

// An iterative method hit its iteration or level cap.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature exceeded its subdivision depth.
class MaxSubdivision : public Error {
 public:
  using Error::Error;
};

// A Stieltjes integrator failed monotone screening and was not declared
// bounded-variation by the caller.
class BVRequired : public Error {
 public:
  using Error::Error;
};

// A user-supplied antiderivative does not differentiate back to f.
class InvalidAntiderivative : public Error {
 public:
  using Error::Error;
};

}  // namespace invint
