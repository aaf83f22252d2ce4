#include "uqlb/protocol.hpp"

#include <cmath>
#include <cstdlib>

namespace uqlb::protocol {

using nlohmann::json;

void ModelDescriptor::validate() const {
  if (name.empty()) throw Error(ErrorCode::SchemaViolation, "model name is empty");
  auto check = [](const Sizes& sizes, const char* what) {
    if (sizes.empty()) throw Error(ErrorCode::SchemaViolation, std::string(what) + " is empty");
    for (auto s : sizes) {
      if (s == 0) throw Error(ErrorCode::SchemaViolation, std::string(what) + " contains 0");
    }
  };
  check(input_sizes, "input_sizes");
  check(output_sizes, "output_sizes");
}

void validate_shape(const Vectors& values, const Sizes& sizes, std::string_view what) {
  if (values.size() != sizes.size()) {
    throw Error(ErrorCode::SchemaViolation, std::string(what) + ": expected " +
                                                std::to_string(sizes.size()) + " vectors, got " +
                                                std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (values[i].size() != sizes[i]) {
      throw Error(ErrorCode::SchemaViolation,
                  std::string(what) + "[" + std::to_string(i) + "]: expected length " +
                      std::to_string(sizes[i]) + ", got " + std::to_string(values[i].size()));
    }
  }
}

void validate_request(const EvaluationRequest& req, const ModelDescriptor* descriptor) {
  if (req.model_name.empty()) throw Error(ErrorCode::SchemaViolation, "name is empty");
  if (req.inputs.empty()) throw Error(ErrorCode::SchemaViolation, "input has no vectors");
  for (const auto& v : req.inputs) {
    if (v.empty()) throw Error(ErrorCode::SchemaViolation, "input contains an empty vector");
    for (double x : v) {
      if (!std::isfinite(x)) throw Error(ErrorCode::SchemaViolation, "input contains NaN or Inf");
    }
  }
  if (!req.config.is_object()) throw Error(ErrorCode::SchemaViolation, "config must be an object");
  for (const auto& [key, value] : req.config.items()) {
    if (!(value.is_string() || value.is_number() || value.is_boolean())) {
      throw Error(ErrorCode::SchemaViolation,
                  "config['" + key + "'] must be a string, number or boolean");
    }
    if (value.is_number_float() && !std::isfinite(value.get<double>())) {
      throw Error(ErrorCode::SchemaViolation, "config['" + key + "'] is not finite");
    }
  }
  if (descriptor != nullptr) {
    if (req.model_name != descriptor->name) {
      throw Error(ErrorCode::UnknownModel, "no model named '" + req.model_name + "'");
    }
    validate_shape(req.inputs, descriptor->input_sizes, "input");
  }
}

namespace {

json parse_body(std::string_view body) {
  try {
    return json::parse(body.begin(), body.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedBody, e.what());
  } catch (const json::out_of_range& e) {
    // Syntactically valid but not representable, e.g. 1e999.
    throw Error(ErrorCode::SchemaViolation, e.what());
  }
}

Vectors read_vectors(const json& j, const char* field) {
  if (!j.is_array()) throw Error(ErrorCode::SchemaViolation, std::string(field) + " must be an array");
  Vectors out;
  out.reserve(j.size());
  for (const auto& row : j) {
    if (!row.is_array()) {
      throw Error(ErrorCode::SchemaViolation, std::string(field) + " must be an array of arrays");
    }
    Vector v;
    v.reserve(row.size());
    for (const auto& x : row) {
      if (!x.is_number()) throw Error(ErrorCode::SchemaViolation, std::string(field) + " entries must be numbers");
      const double d = x.get<double>();
      if (!std::isfinite(d)) throw Error(ErrorCode::SchemaViolation, std::string(field) + " entries must be finite");
      v.push_back(d);
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

std::string encode_request(const EvaluationRequest& req) {
  json j;
  j["name"] = req.model_name;
  j["input"] = req.inputs;
  j["config"] = req.config.is_null() ? json::object() : req.config;
  return j.dump();
}

EvaluationRequest decode_request(std::string_view body) {
  const json j = parse_body(body);
  if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "request must be a JSON object");
  if (!j.contains("name")) throw Error(ErrorCode::SchemaViolation, "missing field 'name'");
  if (!j["name"].is_string()) throw Error(ErrorCode::SchemaViolation, "'name' must be a string");
  if (!j.contains("input")) throw Error(ErrorCode::SchemaViolation, "missing field 'input'");
  EvaluationRequest req;
  req.model_name = j["name"].get<std::string>();
  req.inputs = read_vectors(j["input"], "input");
  if (j.contains("config")) req.config = j["config"];
  validate_request(req);
  return req;
}

std::string encode_response(const EvaluationResponse& resp) {
  json j;
  if (resp.error) {
    j["error"] = {{"code", resp.error->code}, {"message", resp.error->message}};
  } else {
    j["output"] = resp.outputs;
  }
  return j.dump();
}

EvaluationResponse decode_response(std::string_view body) {
  const json j = parse_body(body);
  if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "response must be a JSON object");
  EvaluationResponse resp;
  if (j.contains("error")) {
    const auto& e = j["error"];
    if (!e.is_object() || !e.contains("code") || !e["code"].is_string()) {
      throw Error(ErrorCode::SchemaViolation, "error must be {code, message}");
    }
    resp.error = ErrorInfo{e["code"].get<std::string>(), e.value("message", std::string{})};
    return resp;
  }
  if (!j.contains("output")) throw Error(ErrorCode::SchemaViolation, "missing field 'output'");
  resp.outputs = read_vectors(j["output"], "output");
  return resp;
}

int resolve_port(std::optional<int> flag) {
  if (const char* env = std::getenv("PORT"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != nullptr && *end == '\0' && value >= 0 && value <= 65535) return static_cast<int>(value);
    throw Error(ErrorCode::InvalidArgument, std::string("PORT is not a valid port: ") + env);
  }
  return flag.value_or(kDefaultPort);
}

}  // namespace uqlb::protocol
