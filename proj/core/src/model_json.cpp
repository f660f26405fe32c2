#include "lipminor/model_json.hpp"

#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>

#include "lipminor/error.hpp"

namespace lipminor {
namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw InputError("model json: " + where + " must be an object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* name : allowed) ok = ok || item.key() == name;
    if (!ok) throw InputError("model json: unknown field '" + item.key() + "' in " + where);
  }
}

double number(const json& j, const char* key, const std::string& where,
              std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw InputError("model json: missing field '" + std::string(key) + "' in " + where);
  }
  const json& v = j.at(key);
  if (!v.is_number()) {
    throw InputError("model json: field '" + std::string(key) + "' in " + where +
                     " must be a number");
  }
  return v.get<double>();
}

std::string type_of(const json& j, const std::string& where) {
  if (!j.contains("type") || !j.at("type").is_string()) {
    throw InputError("model json: " + where + " needs a string 'type'");
  }
  return j.at("type").get<std::string>();
}

JumpLaw law_from_json(const json& j) {
  require_object(j, "law");
  const std::string type = type_of(j, "law");
  if (type == "two_point") {
    reject_unknown(j, {"type", "up", "down", "p_up"}, "law");
    return TwoPointJumps{number(j, "up", "law"), number(j, "down", "law"),
                         number(j, "p_up", "law")};
  }
  if (type == "gaussian") {
    reject_unknown(j, {"type", "mean", "sd"}, "law");
    return GaussianJumps{number(j, "mean", "law"), number(j, "sd", "law")};
  }
  if (type == "symmetric_exponential") {
    reject_unknown(j, {"type", "scale"}, "law");
    return SymmetricExponentialJumps{number(j, "scale", "law")};
  }
  throw InputError("model json: unsupported jump law '" + type + "'");
}

JumpSpec jumps_from_json(const json& j) {
  require_object(j, "jumps");
  const std::string type = type_of(j, "jumps");
  if (type == "none") {
    reject_unknown(j, {"type"}, "jumps");
    return NoJumps{};
  }
  if (type == "compound_poisson") {
    reject_unknown(j, {"type", "rate", "law"}, "jumps");
    if (!j.contains("law")) throw InputError("model json: compound_poisson needs 'law'");
    return CompoundPoisson{number(j, "rate", "jumps"), law_from_json(j.at("law"))};
  }
  if (type == "symmetric_stable") {
    reject_unknown(j, {"type", "index", "scale"}, "jumps");
    return SymmetricStable{number(j, "index", "jumps"), number(j, "scale", "jumps", 1.0)};
  }
  throw InputError("model json: unsupported jumps type '" + type + "'");
}

}  // namespace

LevyModel model_from_json(const json& j) {
  require_object(j, "model");
  reject_unknown(j, {"schema", "sigma2", "drift", "jumps"}, "model");
  if (j.contains("schema")) {
    if (!j.at("schema").is_number_integer() || j.at("schema").get<int>() != kSchemaVersion) {
      throw InputError("model json: unsupported schema version");
    }
  }
  LevyModel model;
  model.sigma2 = number(j, "sigma2", "model");
  model.drift = number(j, "drift", "model");
  model.jumps = j.contains("jumps") ? jumps_from_json(j.at("jumps")) : JumpSpec{NoJumps{}};
  try {
    model.validate();
  } catch (const ParameterError& e) {
    throw InputError(std::string("model json: ") + e.what());
  }
  return model;
}

json model_to_json(const LevyModel& model) {
  json j = {{"schema", kSchemaVersion}, {"sigma2", model.sigma2}, {"drift", model.drift}};
  if (const auto* cp = std::get_if<CompoundPoisson>(&model.jumps)) {
    json law;
    if (const auto* tp = std::get_if<TwoPointJumps>(&cp->law)) {
      law = {{"type", "two_point"}, {"up", tp->up}, {"down", tp->down}, {"p_up", tp->p_up}};
    } else if (const auto* g = std::get_if<GaussianJumps>(&cp->law)) {
      law = {{"type", "gaussian"}, {"mean", g->mean}, {"sd", g->sd}};
    } else {
      law = {{"type", "symmetric_exponential"},
             {"scale", std::get<SymmetricExponentialJumps>(cp->law).scale}};
    }
    j["jumps"] = {{"type", "compound_poisson"}, {"rate", cp->rate}, {"law", law}};
  } else if (const auto* st = std::get_if<SymmetricStable>(&model.jumps)) {
    j["jumps"] = {{"type", "symmetric_stable"}, {"index", st->index}, {"scale", st->scale}};
  } else {
    j["jumps"] = {{"type", "none"}};
  }
  return j;
}

LevyModel parse_model_spec(std::string_view spec) {
  std::string text(spec);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw InputError("model spec is empty");
  if (text[first] != '{') {
    std::ifstream in{std::filesystem::path(text)};
    if (!in) throw InputError("cannot open model file '" + text + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("model json: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace lipminor
