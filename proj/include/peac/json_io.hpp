#pragma once

#include <json.hpp>
#include <string>

#include "peac/collapse_fit.hpp"
#include "peac/ellipse_estimator.hpp"
#include "peac/pdf.hpp"
#include "peac/peac_estimator.hpp"
#include "peac/replication.hpp"

namespace peac {

using Json = nlohmann::ordered_json;

Json to_json(const PdfParams& p);
Json to_json(const PdfFit& f);
Json to_json(const CollapseFitResult& r);
Json to_json(const ConicCoefficients& c);
Json to_json(const EstimateReport& r);

PdfParams pdf_params_from_json(const Json& j);
ConicCoefficients conic_from_json(const Json& j);

/// Parses a JSON document; syntax errors become Errc::config with line and column.
Json parse_config_text(const std::string& text, const std::string& origin);
Json read_config_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

/// Typed field access with Errc::config messages that name the field.
double get_number(const Json& j, const char* key, double fallback);
int get_int(const Json& j, const char* key, int fallback);
bool get_bool(const Json& j, const char* key, bool fallback);
/// Rejects keys outside `allowed` so that misspelled unit suffixes are not ignored.
void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

}  // namespace peac
