#include "peac/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "peac/error.hpp"
#include "peac/signal_model.hpp"

namespace peac {

namespace {

constexpr std::size_t kMaxReportedRows = 20;

struct ShotKey {
  double T_s;
  int repetition;
  int scan_index;
  auto operator<=>(const ShotKey&) const = default;
};

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  text = trim(text);
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::string_view to_string(Channel channel) noexcept {
  switch (channel) {
    case Channel::plus: return "plus";
    case Channel::minus: return "minus";
    case Channel::zero: return "zero";
    case Channel::all: return "all";
    case Channel::sum: return "sum";
    case Channel::diff: return "diff";
  }
  return "?";
}

std::optional<Channel> parse_channel(std::string_view name) noexcept {
  for (Channel c : {Channel::plus, Channel::minus, Channel::zero, Channel::all, Channel::sum,
                    Channel::diff})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

std::vector<double> Dataset::times() const {
  std::set<double> unique;
  for (const auto& r : records_) unique.insert(r.T_s);
  return {unique.begin(), unique.end()};
}

bool Dataset::has_channel(double T_s, Channel channel) const {
  return std::any_of(records_.begin(), records_.end(),
                     [&](const Record& r) { return r.T_s == T_s && r.channel == channel; });
}

std::vector<double> Dataset::values(double T_s, Channel channel) const {
  std::vector<std::pair<ShotKey, double>> rows;
  for (const auto& r : records_)
    if (r.T_s == T_s && r.channel == channel)
      rows.push_back({{r.T_s, r.repetition, r.scan_index}, r.value});
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& [key, v] : rows) out.push_back(v);
  return out;
}

std::vector<std::string> Dataset::violations() const {
  std::vector<std::string> problems;
  std::map<std::pair<double, Channel>, std::size_t> counts;
  std::map<double, std::pair<int, int>> extent;  // max scan index, max repetition
  std::map<std::pair<ShotKey, Channel>, double> shots;
  for (const auto& r : records_) {
    ++counts[{r.T_s, r.channel}];
    auto& e = extent[r.T_s];
    e.first = std::max(e.first, r.scan_index);
    e.second = std::max(e.second, r.repetition);
    shots[{{r.T_s, r.repetition, r.scan_index}, r.channel}] = r.value;
  }
  for (const auto& [key, count] : counts) {
    const auto& e = extent[key.first];
    const std::size_t expected =
        static_cast<std::size_t>(e.first + 1) * static_cast<std::size_t>(e.second + 1);
    if (count != expected) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "T_s=" << key.first << " channel=" << to_string(key.second) << ": " << count
          << " records, expected " << expected;
      problems.push_back(msg.str());
    }
  }
  for (const auto& [key, value] : shots) {
    if (key.second != Channel::sum && key.second != Channel::diff) continue;
    auto p = shots.find({key.first, Channel::plus});
    auto m = shots.find({key.first, Channel::minus});
    if (p == shots.end() || m == shots.end()) continue;
    const double expected = key.second == Channel::sum ? sum_signal(p->second, m->second)
                                                       : diff_signal(p->second, m->second);
    if (std::abs(expected - value) > 1e-12) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "T_s=" << key.first.T_s << " scan_index=" << key.first.scan_index
          << " repetition=" << key.first.repetition << ": " << to_string(key.second)
          << " inconsistent with plus/minus";
      problems.push_back(msg.str());
    }
  }
  return problems;
}

void Dataset::write_csv(std::ostream& out) const {
  out << kCsvHeader << '\n';
  char buf[64];
  for (const auto& r : records_) {
    std::snprintf(buf, sizeof buf, "%.17g", r.T_s);
    out << buf << ',' << r.scan_index << ',' << r.repetition << ',' << to_string(r.channel) << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    out << buf << '\n';
  }
}

void Dataset::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(Errc::io, "cannot open " + path + " for writing");
  write_csv(out);
  if (!out) fail(Errc::io, "failed writing " + path);
}

Dataset Dataset::read_csv(std::istream& in) {
  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) fail(Errc::data, "empty dataset (missing header)");
  if (trim(line) != kCsvHeader)
    fail(Errc::data, "line 1: bad header '" + std::string(trim(line)) + "', expected " +
                         std::string(kCsvHeader));

  std::vector<std::string> bad;
  std::size_t bad_count = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    Record r;
    std::string reason;
    if (fields.size() != 5) {
      reason = "expected 5 fields, got " + std::to_string(fields.size());
    } else if (!parse_number(fields[0], r.T_s) || !std::isfinite(r.T_s) || r.T_s < 0.0) {
      reason = "bad T_s";
    } else if (!parse_number(fields[1], r.scan_index) || r.scan_index < 0) {
      reason = "bad scan_index";
    } else if (!parse_number(fields[2], r.repetition) || r.repetition < 0) {
      reason = "bad repetition";
    } else if (auto c = parse_channel(trim(fields[3])); !c) {
      reason = "unknown channel '" + std::string(trim(fields[3])) + "'";
    } else {
      r.channel = *c;
      if (!parse_number(fields[4], r.value) || !std::isfinite(r.value)) reason = "bad value";
    }
    if (!reason.empty()) {
      if (bad.size() < kMaxReportedRows) bad.push_back("line " + std::to_string(line_no) + ": " + reason);
      ++bad_count;
      continue;
    }
    ds.add(r);
  }
  if (bad_count > 0) {
    std::string msg = std::to_string(bad_count) + " invalid row(s)";
    for (const auto& b : bad) msg += "\n  " + b;
    if (bad_count > bad.size()) msg += "\n  ...";
    fail(Errc::data, msg);
  }
  return ds;
}

Dataset Dataset::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open " + path);
  return read_csv(in);
}

}  // namespace peac
