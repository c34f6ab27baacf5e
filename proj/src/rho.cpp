#include "lpc/rho.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lpc {

RhoParams::RhoParams(double rho_plus, double rho_minus) : rho_plus_(rho_plus), rho_minus_(rho_minus) {
  if (!std::isfinite(rho_plus) || !std::isfinite(rho_minus)) {
    throw std::invalid_argument("rho must be finite");
  }
  if (std::abs(1.0 - rho_plus - rho_minus) <= 1e-8) {
    std::ostringstream msg;
    msg << "singular rho (" << rho_plus << ", " << rho_minus << "): 1 - rho_plus - rho_minus = 0";
    throw std::invalid_argument(msg.str());
  }
}

} // namespace lpc
