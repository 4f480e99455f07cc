#include "peac/histogram.hpp"

#include <algorithm>
#include <cmath>

#include "peac/error.hpp"

namespace peac {

std::vector<double> Histogram::densities() const {
  std::vector<double> out(counts.size());
  const double scale = 1.0 / (static_cast<double>(total) * bin_width());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) * scale;
  return out;
}

std::size_t default_bin_count(std::size_t n) noexcept {
  const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  return std::max<std::size_t>(root, 1);
}

Histogram bin(std::span<const double> values, std::optional<std::size_t> nbins) {
  if (values.size() < 2) fail(Errc::degenerate_range, "histogram needs at least 2 values");
  for (double v : values) require_finite(v, "histogram value");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) fail(Errc::degenerate_range, "all histogram values are identical");

  const std::size_t n = nbins.value_or(default_bin_count(values.size()));
  if (n < 1) fail(Errc::invalid_parameter, "histogram needs at least one bin");

  Histogram h;
  h.bin_edges.resize(n + 1);
  const double width = (hi - lo) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) h.bin_edges[i] = lo + width * static_cast<double>(i);
  h.bin_edges.back() = hi;
  h.counts.assign(n, 0);
  for (double v : values) {
    auto i = static_cast<std::size_t>((v - lo) / width);
    if (i >= n) i = n - 1;
    // guard against rounding at interior edges
    while (i > 0 && v < h.bin_edges[i]) --i;
    while (i + 1 < n && v >= h.bin_edges[i + 1]) ++i;
    ++h.counts[i];
  }
  h.total = values.size();
  return h;
}

}  // namespace peac
