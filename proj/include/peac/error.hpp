#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace peac {

enum class Errc {
  invalid_parameter,
  degenerate_range,
  singular_parameter,
  division_degenerate,
  fit_failure,
  incomplete_dataset,
  undefined_phase,
  inconsistent_amplitude,
  branch_degenerate,
  degenerate_geometry,
  sign_convention,
  no_solution,
  numerical_integration,
  config,
  data,
  io,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Thrown by fits that ran out of iterations; carries the best parameters seen.
class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, std::vector<double> best)
      : Error(Errc::fit_failure, what), best_(std::move(best)) {}
  const std::vector<double>& best_so_far() const noexcept { return best_; }

 private:
  std::vector<double> best_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

void require_finite(double value, const char* name);

}  // namespace peac
