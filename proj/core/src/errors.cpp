#include "rhsbf/errors.hpp"

#include <sstream>

namespace rhsbf {

namespace {

std::string radius_message(double radius, double limit) {
  std::ostringstream os;
  os << "ill-conditioned coupling: spectral radius of D(m)Xi estimated at "
     << radius << " (limit " << limit << ")";
  return os.str();
}

}  // namespace

IllConditionedCoupling::IllConditionedCoupling(double radius, double limit)
    : Error(radius_message(radius, limit)), radius_(radius), limit_(limit) {}

ConfigError::ConfigError(std::string field, const std::string& what)
    : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

}  // namespace rhsbf
