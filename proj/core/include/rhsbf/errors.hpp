#pragma once

#include <stdexcept>
#include <string>

namespace rhsbf {

// Every failure the library reports derives from Error so callers can map
// categories to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Coincident source/observation points or duplicated element positions.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Spectral radius of D(m)Xi too close to (or above) one.
class IllConditionedCoupling : public Error {
 public:
  IllConditionedCoupling(double radius, double limit);
  double radius() const { return radius_; }
  double limit() const { return limit_; }

 private:
  double radius_;
  double limit_;
};

class NumericFailure : public Error {
 public:
  using Error::Error;
};

class RankDeficiency : public Error {
 public:
  using Error::Error;
};

// Configuration parse or validation problem. field() names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace rhsbf
