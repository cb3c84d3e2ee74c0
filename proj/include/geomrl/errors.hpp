#pragma once

#include <stdexcept>
#include <string>

namespace geomrl {

// Base for every error raised by the library. Callers that only need to know
// "the geometry or configuration was invalid" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two S3 points are (numerically) antipodal; log map and transport undefined.
class AntipodalError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class ZeroNormError : public Error {
 public:
  using Error::Error;
};

class BadLength : public Error {
 public:
  using Error::Error;
};

class KindMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteReturn : public Error {
 public:
  using Error::Error;
};

// Configuration problems; `field` names the offending JSON path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace geomrl
