#include "minlab/spec_io.hpp"

#include <fstream>

#include "minlab/error.hpp"

namespace minlab {

namespace {

using nlohmann::json;

ParameterMap bound_params(const json& spec, const ParameterMap& overrides) {
  ParameterMap params;
  if (auto it = spec.find("params"); it != spec.end()) {
    if (!it->is_object()) throw Error(ErrorCode::MalformedSpec, "\"params\" must be an object");
    for (const auto& [key, value] : it->items()) {
      if (!value.is_number()) throw Error(ErrorCode::MalformedSpec, "param '" + key + "' must be a number");
      params[key] = value.get<double>();
    }
  }
  for (const auto& [key, value] : overrides) params[key] = value;
  return params;
}

std::string expression_field(const json& spec, const char* key, const char* fallback) {
  auto it = spec.find(key);
  if (it == spec.end()) {
    if (fallback) return fallback;
    throw Error(ErrorCode::MalformedSpec, std::string("missing \"") + key + "\"");
  }
  if (it->is_number()) return it->dump();
  if (!it->is_string()) throw Error(ErrorCode::MalformedSpec, std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

QMatrix load_rows(const json& spec) {
  const json& rows = spec.at("rows");
  if (!rows.is_array()) throw Error(ErrorCode::MalformedSpec, "\"rows\" must be an array");
  std::vector<Row> out;
  for (const auto& r : rows) {
    if (!r.is_object() || !r.contains("i"))
      throw Error(ErrorCode::MalformedSpec, "each row needs an \"i\" field");
    const auto i = r.at("i").get<std::int64_t>();
    if (i < 0) throw Error(ErrorCode::MalformedSpec, "row index must be >= 0");
    const auto idx = static_cast<State>(i);
    if (idx >= out.size()) out.resize(idx + 1);
    Row row;
    if (auto e = r.find("entries"); e != r.end()) {
      if (!e->is_array()) throw Error(ErrorCode::MalformedSpec, "\"entries\" must be an array");
      for (const auto& pair : *e) {
        if (!pair.is_array() || pair.size() != 2)
          throw Error(ErrorCode::MalformedSpec, "entry must be [target, rate]");
        const auto j = pair[0].get<std::int64_t>();
        if (j < 0) throw Error(ErrorCode::MalformedSpec, "target must be >= 0");
        row.entries.push_back({static_cast<State>(j), pair[1].get<double>()});
      }
    }
    double off = 0.0;
    for (const auto& t : row.entries) off += t.rate;
    row.total_rate = r.contains("qi") ? r.at("qi").get<double>() : off;
    out[idx] = std::move(row);
  }
  return QMatrix::from_rows(std::move(out), spec.value("name", std::string("explicit")));
}

}  // namespace

BirthDeathSpec parse_birth_death(const json& spec, const ParameterMap& overrides) {
  const ParameterMap params = bound_params(spec, overrides);
  const std::string family = spec.value("family", std::string("birth-death"));
  BirthDeathSpec bd;
  bd.birth = RateExpression::parse(expression_field(spec, "birth", nullptr), params);
  bd.death = RateExpression::parse(expression_field(spec, "death", family == "pure-birth" ? "0" : nullptr), params);
  return bd;
}

QMatrix load_matrix(const json& spec, const ParameterMap& overrides) {
  try {
    if (!spec.is_object()) throw Error(ErrorCode::MalformedSpec, "matrix spec must be a JSON object");
    if (spec.contains("rows")) return load_rows(spec);
    const std::string family = spec.value("family", std::string());
    if (family == "birth-death" || family == "pure-birth")
      return make_birth_death(parse_birth_death(spec, overrides), spec.value("name", family));
    throw Error(ErrorCode::MalformedSpec, "unknown family '" + family + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedSpec, e.what());
  }
}

QMatrix load_matrix_file(const std::filesystem::path& path, const ParameterMap& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedSpec, "cannot open " + path.string());
  json spec;
  try {
    in >> spec;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedSpec, path.string() + ": " + e.what());
  }
  return load_matrix(spec, overrides);
}

}  // namespace minlab
