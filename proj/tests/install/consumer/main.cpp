#include <cmath>

#include "rhsbf/em_coupling.hpp"

int main() {
  const double k = rhsbf::wavenumber(28e9, rhsbf::MediumParams{});
  return std::abs(k - 586.8366) < 1e-3 ? 0 : 1;
}
