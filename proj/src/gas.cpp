#include "starpulse/gas.hpp"

#include <cmath>
#include <sstream>

#include "starpulse/errors.hpp"

namespace starpulse {

std::string admissible_gamma_list() { return "{2, 1.5, 1.333..., 1.25}"; }

GasParams GasParams::make(double gamma, double rho_c, double A, double g0) {
  const double* match = nullptr;
  for (const double& g : kAdmissibleGammas) {
    if (std::abs(gamma - g) <= 1e-6) match = &g;
  }
  if (match == nullptr) {
    std::ostringstream msg;
    msg << "gamma = " << gamma << " is not admissible; gamma/(gamma-1) must be an integer "
        << "with 6/5 < gamma <= 2, i.e. gamma in " << admissible_gamma_list();
    throw InvalidParams(msg.str());
  }
  if (!(rho_c > 0.0) || !(g0 > 0.0) || A < 0.0 || !std::isfinite(rho_c)) {
    throw InvalidParams("rho_c, g0 and A must be positive");
  }
  GasParams p;
  p.gamma = *match;
  p.n_index = 1.0 / (p.gamma - 1.0);
  p.N = 2.0 * p.gamma / (p.gamma - 1.0);
  // Snap to exact integers; the floating quotients are within 1 ulp.
  p.n_index = std::round(p.n_index);
  p.N = std::round(p.N);
  p.A = A > 0.0 ? A : 1.0 / p.gamma;
  p.g0 = g0;
  p.rho_c = rho_c;
  return p;
}

double parse_gamma(const std::string& text) {
  try {
    const auto slash = text.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    const double a = std::stod(num, &used);
    if (used != num.size()) throw std::invalid_argument(text);
    const double b = std::stod(den, &used);
    if (used != den.size() || b == 0.0) throw std::invalid_argument(text);
    return a / b;
  } catch (const std::logic_error&) {
    throw InvalidParams("cannot parse gamma value '" + text + "'; expected one of " +
                        admissible_gamma_list());
  }
}

}  // namespace starpulse
