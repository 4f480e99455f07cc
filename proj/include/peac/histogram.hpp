#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace peac {

/// Equal-width histogram spanning exactly [min, max] of the data.
struct Histogram {
  std::vector<double> bin_edges;  // nbins + 1, strictly increasing
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  std::size_t bins() const noexcept { return counts.size(); }
  double bin_width() const noexcept { return bin_edges[1] - bin_edges[0]; }
  double center(std::size_t i) const noexcept { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
  /// counts / (total * width), the empirical density at the bin centres.
  std::vector<double> densities() const;
};

/// Square-root rule: ceil(sqrt(n)) bins, so 300 points give 18 bins.
std::size_t default_bin_count(std::size_t n) noexcept;

Histogram bin(std::span<const double> values, std::optional<std::size_t> nbins = std::nullopt);

}  // namespace peac
