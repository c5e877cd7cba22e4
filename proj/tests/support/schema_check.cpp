#include "schema_check.hpp"

#include <fstream>
#include <stdexcept>

namespace schema {

using nlohmann::json;

namespace {

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  throw std::invalid_argument("unsupported schema type " + t);
}

struct Checker {
  const json& root;
  std::vector<std::string> errors;

  const json& resolve(const json& s) const {
    if (!s.contains("$ref")) return s;
    const std::string ref = s["$ref"];
    const std::string prefix = "#/$defs/";
    if (ref.rfind(prefix, 0) != 0) throw std::invalid_argument("unsupported $ref " + ref);
    return root.at("$defs").at(ref.substr(prefix.size()));
  }

  void check(const json& v, const json& s0, const std::string& path) {
    const json& s = resolve(s0);
    auto fail = [&](const std::string& m) { errors.push_back((path.empty() ? "/" : path) + ": " + m); };

    if (s.contains("type")) {
      bool ok = false;
      if (s["type"].is_array()) {
        for (const auto& t : s["type"]) ok |= has_type(v, t.get<std::string>());
      } else {
        ok = has_type(v, s["type"].get<std::string>());
      }
      if (!ok) return fail("expected type " + s["type"].dump() + ", got " + v.type_name());
    }
    if (s.contains("const") && v != s["const"]) fail("expected " + s["const"].dump());
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found |= e == v;
      if (!found) fail(v.dump() + " not in " + s["enum"].dump());
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>()) fail("below minimum");
      if (s.contains("maximum") && x > s["maximum"].get<double>()) fail("above maximum");
    }
    if (v.is_object()) {
      for (const auto& r : s.value("required", json::array())) {
        if (!v.contains(r.get<std::string>())) fail("missing \"" + r.get<std::string>() + "\"");
      }
      const json props = s.value("properties", json::object());
      for (const auto& [k, child] : v.items()) {
        if (props.contains(k)) {
          check(child, props[k], path + "/" + k);
        } else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
          fail("unexpected \"" + k + "\"");
        }
      }
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) fail("too few items");
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) fail("too many items");
      if (s.contains("items")) {
        for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], path + "/" + std::to_string(i));
      }
    }
  }
};

}  // namespace

std::vector<std::string> validate(const json& doc, const json& schema) {
  Checker c{schema, {}};
  c.check(doc, schema, "");
  return c.errors;
}

json load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schema " + path.string());
  return json::parse(in);
}

}  // namespace schema
