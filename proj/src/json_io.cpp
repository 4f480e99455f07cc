#include "peac/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "peac/error.hpp"

namespace peac {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

Json to_json(const PdfParams& p) {
  return Json{{"amplitude", p.amplitude}, {"mean", p.mean}, {"sigma", p.sigma}};
}

Json to_json(const PdfFit& f) {
  Json j = to_json(f.params);
  j["converged"] = f.converged;
  j["residual"] = f.residual;
  j["double_peak"] = f.double_peak();
  j["low_confidence_guess"] = f.low_confidence_guess;
  return j;
}

Json to_json(const CollapseFitResult& r) {
  return Json{{"a_ext_m_per_s2", r.a_ext},
              {"lambda0", r.lambda0},
              {"delta_lambda", r.delta_lambda},
              {"a0", r.a0},
              {"a_ext_se_m_per_s2", number_or_null(r.a_ext_se)},
              {"lambda0_se", number_or_null(r.lambda0_se)},
              {"delta_lambda_se", number_or_null(r.delta_lambda_se)},
              {"a0_se", number_or_null(r.a0_se)},
              {"converged", r.converged},
              {"residual", r.residual}};
}

Json to_json(const ConicCoefficients& c) {
  return Json{{"c_plus_sq", c.c_plus_sq}, {"c_minus_sq", c.c_minus_sq}, {"c0", c.c0},
              {"d_plus", c.d_plus},       {"d_minus", c.d_minus},       {"d0", c.d0},
              {"is_ellipse", c.is_ellipse}};
}

Json to_json(const EstimateReport& r) {
  return Json{{"theta_set", r.theta_set},
              {"method", to_string(r.method)},
              {"theta_rec_mean", number_or_null(r.theta_rec_mean)},
              {"theta_bias", number_or_null(r.theta_bias)},
              {"delta_theta", number_or_null(r.delta_theta)},
              {"n_failures", r.n_failures},
              {"n_used", r.n_used},
              {"bias_se", number_or_null(r.bias_se)},
              {"delta_theta_se", number_or_null(r.delta_theta_se)}};
}

PdfParams pdf_params_from_json(const Json& j) {
  try {
    return {j.at("amplitude").get<double>(), j.at("mean").get<double>(), j.at("sigma").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::config, std::string("invalid pdf parameters: ") + e.what());
  }
}

ConicCoefficients conic_from_json(const Json& j) {
  try {
    ConicCoefficients c;
    c.c_plus_sq = j.at("c_plus_sq").get<double>();
    c.c_minus_sq = j.at("c_minus_sq").get<double>();
    c.c0 = j.at("c0").get<double>();
    c.d_plus = j.at("d_plus").get<double>();
    c.d_minus = j.at("d_minus").get<double>();
    c.d0 = j.at("d0").get<double>();
    c.is_ellipse = j.value("is_ellipse", c.discriminant() < 0.0);
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::config, std::string("invalid conic coefficients: ") + e.what());
  }
}

Json parse_config_text(const std::string& text, const std::string& origin) {
  try {
    Json j = Json::parse(text);
    if (!j.is_object()) fail(Errc::config, origin + ": top level must be a JSON object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte > 0 ? e.byte - 1 : 0);
    fail(Errc::config, origin + ":" + std::to_string(line) + ":" + std::to_string(column) +
                           ": JSON syntax error: " + e.what());
  }
}

Json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::config, "cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) fail(Errc::io, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) fail(Errc::io, "write failed for '" + path + "'");
}

double get_number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number()) fail(Errc::config, std::string("field '") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(Errc::config, std::string("field '") + key + "' must be finite");
  return d;
}

int get_int(const Json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer()) fail(Errc::config, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

bool get_bool(const Json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_boolean()) fail(Errc::config, std::string("field '") + key + "' must be true or false");
  return v.get<bool>();
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) fail(Errc::config, where + ": unknown field '" + item.key() + "'");
  }
}

}  // namespace peac
