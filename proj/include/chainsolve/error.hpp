#pragma once

#include <stdexcept>
#include <string>

namespace chainsolve {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnknownFamily : public Error {
public:
  using Error::Error;
};

class ParameterOutOfRange : public Error {
public:
  ParameterOutOfRange(std::string parameter, const std::string& what)
      : Error(what), parameter_(std::move(parameter)) {}
  const std::string& parameter() const noexcept { return parameter_; }

private:
  std::string parameter_;
};

/// A primitive failed the numeric convexity/monotonicity check at `point`.
class AssumptionViolated : public Error {
public:
  AssumptionViolated(double point, const std::string& what)
      : Error(what), point_(point) {}
  double point() const noexcept { return point_; }

private:
  double point_;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class DepthExceeded : public Error {
public:
  using Error::Error;
};

} // namespace chainsolve
