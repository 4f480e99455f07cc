#include "peac/error.hpp"

#include <cmath>

namespace peac {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_parameter: return "invalid parameter";
    case Errc::degenerate_range: return "degenerate range";
    case Errc::singular_parameter: return "singular parameter";
    case Errc::division_degenerate: return "degenerate division";
    case Errc::fit_failure: return "fit failure";
    case Errc::incomplete_dataset: return "incomplete dataset";
    case Errc::undefined_phase: return "undefined phase";
    case Errc::inconsistent_amplitude: return "inconsistent amplitude";
    case Errc::branch_degenerate: return "degenerate branch";
    case Errc::degenerate_geometry: return "degenerate geometry";
    case Errc::sign_convention: return "sign convention violated";
    case Errc::no_solution: return "no solution";
    case Errc::numerical_integration: return "numerical integration";
    case Errc::config: return "configuration error";
    case Errc::data: return "data error";
    case Errc::io: return "i/o error";
  }
  return "unknown error";
}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) fail(Errc::invalid_parameter, std::string(name) + " must be finite");
}

}  // namespace peac
