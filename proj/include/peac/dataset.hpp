#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace peac {

enum class Channel { plus, minus, zero, all, sum, diff };

std::string_view to_string(Channel channel) noexcept;
std::optional<Channel> parse_channel(std::string_view name) noexcept;

struct Record {
  double T_s = 0.0;
  int scan_index = 0;
  int repetition = 0;
  Channel channel = Channel::all;
  double value = 0.0;
};

/// Tabular measurement records. CSV schema: T_s,scan_index,repetition,channel,value
class Dataset {
 public:
  static constexpr std::string_view kCsvHeader = "T_s,scan_index,repetition,channel,value";

  void add(const Record& record) { records_.push_back(record); }
  const std::vector<Record>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  /// Distinct interrogation times, ascending.
  std::vector<double> times() const;
  bool has_channel(double T_s, Channel channel) const;
  /// Values at one time, ordered by (repetition, scan_index) so that shots align
  /// across channels.
  std::vector<double> values(double T_s, Channel channel) const;

  /// Checks the shot-count and sum/diff consistency invariants. Returns one
  /// message per violation; empty means valid.
  std::vector<std::string> violations() const;

  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;
  /// Throws Error(Errc::data) listing offending rows on schema violations.
  static Dataset read_csv(std::istream& in);
  static Dataset read_csv(const std::string& path);

 private:
  std::vector<Record> records_;
};

}  // namespace peac
