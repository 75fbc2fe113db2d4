#include "vso/catalog_store.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace vso {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::parse_error, "ParseError at " + path + ": " + what, path);
}

std::string child(const std::string& path, std::string_view key) {
  return path + "/" + std::string(key);
}
std::string child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

const json& expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path.empty() ? "/" : path, "expected an object");
  return j;
}

const json& expect_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

std::string expect_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

double expect_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

void allow_keys(const json& obj, const std::string& path,
                std::initializer_list<std::string_view> keys) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      fail(child(path, key), "unknown field");
    }
  }
}

const json& required(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(child(path, key), "missing field");
  return *it;
}

std::optional<std::string> optional_string(const json& obj, const std::string& path,
                                           const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  return expect_string(*it, child(path, key));
}

template <class Fn>
void each(const json& obj, const std::string& path, const char* key, Fn&& fn) {
  const std::string p = child(path, key);
  const json& arr = expect_array(required(obj, path, key), p);
  for (std::size_t i = 0; i < arr.size(); ++i) fn(arr[i], child(p, i));
}

template <class Fn>
void each_optional(const json& obj, const std::string& path, const char* key, Fn&& fn) {
  if (obj.contains(key)) each(obj, path, key, std::forward<Fn>(fn));
}

json parse_document(std::string_view bytes, std::string_view format) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    const std::string where = "byte " + std::to_string(e.byte);
    throw Error(ErrorCode::parse_error, "ParseError at " + where + ": " + e.what(), where);
  }
  expect_object(doc, "");
  const json& version = required(doc, "", "schema_version");
  if (!version.is_number_integer()) fail("/schema_version", "expected an integer");
  if (version.get<std::int64_t>() != kSchemaVersion) {
    throw Error(ErrorCode::schema_version_unsupported,
                "SchemaVersionUnsupported: " + version.dump() + " (supported: " +
                    std::to_string(kSchemaVersion) + ")",
                version.dump());
  }
  if (expect_string(required(doc, "", "format"), "/format") != format) {
    fail("/format", "expected \"" + std::string(format) + "\"");
  }
  return doc;
}

json header(std::string_view format) {
  return json{{"format", format}, {"schema_version", kSchemaVersion}};
}

template <class Params>
Params sorted_by_varname(Params params) {
  std::sort(params.begin(), params.end(),
            [](const auto& a, const auto& b) { return a.varname < b.varname; });
  return params;
}

json catalog_json(const Catalog& catalog) {
  json doc = header("vso-catalog");

  json sps = json::array();
  for (const auto& [id, sp] : catalog.software_packages) {
    json inputs = json::array();
    for (const auto& in : sorted_by_varname(sp.inputs)) {
      json j{{"varname", in.varname}};
      if (in.value) j["value"] = *in.value;
      inputs.push_back(std::move(j));
    }
    json outputs = json::array();
    for (const auto& out : sorted_by_varname(sp.outputs)) outputs.push_back({{"varname", out.varname}});
    json j{{"id", id}, {"inputs", std::move(inputs)}, {"outputs", std::move(outputs)}};
    if (sp.perf) {
      j["performance"] = {{"fixed_cost", sp.perf->fixed_cost},
                          {"per_unit_cost", sp.perf->per_unit_cost}};
    }
    sps.push_back(std::move(j));
  }
  doc["software_packages"] = std::move(sps);

  json ips = json::array();
  for (const auto& [id, ip] : catalog.implementing_packages) {
    json inputs = json::array();
    for (const auto& in : sorted_by_varname(ip.inputs)) {
      json j{{"varname", in.varname}, {"uri", in.uri.str()}};
      if (in.default_value) j["default_value"] = *in.default_value;
      inputs.push_back(std::move(j));
    }
    json outputs = json::array();
    for (const auto& out : sorted_by_varname(ip.outputs)) {
      outputs.push_back({{"varname", out.varname}, {"uri", out.uri.str()}});
    }
    ips.push_back({{"id", id},
                   {"software_package", ip.software_package},
                   {"inputs", std::move(inputs)},
                   {"outputs", std::move(outputs)}});
  }
  doc["implementing_packages"] = std::move(ips);

  json methods = json::array();
  for (const auto& [id, m] : catalog.methods) methods.push_back({{"id", id}, {"packages", m.packages}});
  doc["methods"] = std::move(methods);

  json models = json::array();
  for (const auto& [id, m] : catalog.models) {
    json j{{"id", id}, {"methods", m.methods}};
    if (!m.selected_method.empty()) j["selected_method"] = m.selected_method;
    models.push_back(std::move(j));
  }
  doc["models"] = std::move(models);

  json images = json::array();
  for (const auto& [id, image] : catalog.images) {
    auto props = image.properties;
    std::sort(props.begin(), props.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });
    json properties = json::array();
    for (const auto& p : props) {
      json j{{"name", p.name}, {"uri", p.uri.str()}};
      if (p.value) j["value"] = *p.value;
      properties.push_back(std::move(j));
    }
    images.push_back({{"id", id},
                      {"properties", std::move(properties)},
                      {"models", image.models},
                      {"children", image.children}});
  }
  doc["images"] = std::move(images);

  json same_as = json::array();
  for (const auto& [a, b] : catalog.registry.assertions()) same_as.push_back({a.str(), b.str()});
  doc["same_as"] = std::move(same_as);
  return doc;
}

template <class Map, class Value>
void insert_unique(Map& map, Value value, std::string_view kind, ValidationReport& report) {
  std::string id = value.id;
  if (!map.emplace(id, std::move(value)).second) {
    report.violations.push_back(Violation{"DuplicateId", std::string(kind) + " " + id});
  }
}

std::vector<std::string> string_list(const json& obj, const std::string& path, const char* key) {
  std::vector<std::string> out;
  each(obj, path, key, [&](const json& j, const std::string& p) { out.push_back(expect_string(j, p)); });
  return out;
}

std::set<std::string> string_set(const json& obj, const std::string& path, const char* key,
                                 std::string_view owner, ValidationReport& report) {
  std::set<std::string> out;
  for (auto& s : string_list(obj, path, key)) {
    if (!out.insert(s).second) {
      report.violations.push_back(Violation{"DuplicateReference", std::string(owner) + "→" + s});
    }
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace

std::string canonical_text(const json& doc) { return doc.dump(2) + "\n"; }

std::string save_catalog(const Catalog& catalog) {
  if (auto report = validate_catalog(catalog); !report.ok()) throw ValidationFailed(std::move(report));
  return canonical_text(catalog_json(catalog));
}

Catalog load_catalog(std::string_view bytes) {
  const json doc = parse_document(bytes, "vso-catalog");
  allow_keys(doc, "", {"format", "schema_version", "software_packages", "implementing_packages",
                       "methods", "models", "images", "same_as"});
  Catalog catalog;
  ValidationReport report;

  each(doc, "", "software_packages", [&](const json& j, const std::string& p) {
    expect_object(j, p);
    allow_keys(j, p, {"id", "inputs", "outputs", "performance"});
    SoftwarePackage sp;
    sp.id = expect_string(required(j, p, "id"), child(p, "id"));
    each(j, p, "inputs", [&](const json& in, const std::string& ip) {
      expect_object(in, ip);
      allow_keys(in, ip, {"varname", "value"});
      sp.inputs.push_back(InputParamSp{expect_string(required(in, ip, "varname"), child(ip, "varname")),
                                       optional_string(in, ip, "value")});
    });
    each(j, p, "outputs", [&](const json& out, const std::string& op) {
      expect_object(out, op);
      allow_keys(out, op, {"varname"});
      sp.outputs.push_back(OutputParamSp{expect_string(required(out, op, "varname"), child(op, "varname"))});
    });
    if (auto it = j.find("performance"); it != j.end()) {
      const std::string pp = child(p, "performance");
      expect_object(*it, pp);
      allow_keys(*it, pp, {"fixed_cost", "per_unit_cost"});
      sp.perf = PerformanceModel{
          expect_number(required(*it, pp, "fixed_cost"), child(pp, "fixed_cost")),
          expect_number(required(*it, pp, "per_unit_cost"), child(pp, "per_unit_cost"))};
    }
    insert_unique(catalog.software_packages, std::move(sp), "software_package", report);
  });

  each(doc, "", "implementing_packages", [&](const json& j, const std::string& p) {
    expect_object(j, p);
    allow_keys(j, p, {"id", "software_package", "inputs", "outputs"});
    ImplementingPackage ip;
    ip.id = expect_string(required(j, p, "id"), child(p, "id"));
    ip.software_package =
        expect_string(required(j, p, "software_package"), child(p, "software_package"));
    each(j, p, "inputs", [&](const json& in, const std::string& q) {
      expect_object(in, q);
      allow_keys(in, q, {"varname", "default_value", "uri"});
      ip.inputs.push_back(InputParamIp{expect_string(required(in, q, "varname"), child(q, "varname")),
                                       optional_string(in, q, "default_value"),
                                       SemanticUri(expect_string(required(in, q, "uri"), child(q, "uri")))});
    });
    each(j, p, "outputs", [&](const json& out, const std::string& q) {
      expect_object(out, q);
      allow_keys(out, q, {"varname", "uri"});
      ip.outputs.push_back(OutputParamIp{expect_string(required(out, q, "varname"), child(q, "varname")),
                                         SemanticUri(expect_string(required(out, q, "uri"), child(q, "uri")))});
    });
    insert_unique(catalog.implementing_packages, std::move(ip), "implementing_package", report);
  });

  each(doc, "", "methods", [&](const json& j, const std::string& p) {
    expect_object(j, p);
    allow_keys(j, p, {"id", "packages"});
    Method m;
    m.id = expect_string(required(j, p, "id"), child(p, "id"));
    m.packages = string_list(j, p, "packages");
    insert_unique(catalog.methods, std::move(m), "method", report);
  });

  each(doc, "", "models", [&](const json& j, const std::string& p) {
    expect_object(j, p);
    allow_keys(j, p, {"id", "methods", "selected_method"});
    SimulationModel m;
    m.id = expect_string(required(j, p, "id"), child(p, "id"));
    m.methods = string_set(j, p, "methods", m.id, report);
    m.selected_method = optional_string(j, p, "selected_method").value_or("");
    insert_unique(catalog.models, std::move(m), "model", report);
  });

  each(doc, "", "images", [&](const json& j, const std::string& p) {
    expect_object(j, p);
    allow_keys(j, p, {"id", "properties", "models", "children"});
    VsoImage image;
    image.id = expect_string(required(j, p, "id"), child(p, "id"));
    each(j, p, "properties", [&](const json& prop, const std::string& q) {
      expect_object(prop, q);
      allow_keys(prop, q, {"name", "uri", "value"});
      image.properties.push_back(
          Property{expect_string(required(prop, q, "name"), child(q, "name")),
                   SemanticUri(expect_string(required(prop, q, "uri"), child(q, "uri"))),
                   optional_string(prop, q, "value")});
    });
    std::sort(image.properties.begin(), image.properties.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });
    image.models = string_set(j, p, "models", image.id, report);
    image.children = string_set(j, p, "children", image.id, report);
    insert_unique(catalog.images, std::move(image), "image", report);
  });

  each(doc, "", "same_as", [&](const json& j, const std::string& p) {
    expect_array(j, p);
    if (j.size() != 2) fail(p, "expected a pair of URIs");
    catalog.registry.assert_same_as(SemanticUri(expect_string(j[0], child(p, 0))),
                                    SemanticUri(expect_string(j[1], child(p, 1))));
  });

  for (auto& [_, sp] : catalog.software_packages) {
    sp.inputs = sorted_by_varname(std::move(sp.inputs));
    sp.outputs = sorted_by_varname(std::move(sp.outputs));
  }
  for (auto& [_, ip] : catalog.implementing_packages) {
    ip.inputs = sorted_by_varname(std::move(ip.inputs));
    ip.outputs = sorted_by_varname(std::move(ip.outputs));
  }
  catalog.index_uris();

  auto structural = validate_catalog(catalog);
  report.violations.insert(report.violations.end(), structural.violations.begin(),
                           structural.violations.end());
  if (!report.ok()) {
    std::sort(report.violations.begin(), report.violations.end());
    throw ValidationFailed(std::move(report));
  }
  return catalog;
}

std::string catalog_version(const Catalog& catalog) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << fnv1a(canonical_text(catalog_json(catalog)));
  return out.str();
}

std::string save_environment(const Environment& env, const Catalog& catalog) {
  if (auto report = validate_environment(env, catalog); !report.ok()) {
    throw ValidationFailed(std::move(report));
  }
  json doc = header("vso-env");
  doc["env_id"] = env.env_id;
  doc["catalog_version"] = env.catalog_version;
  json instances = json::array();
  for (const auto& [id, inst] : env.instances) {
    instances.push_back({{"id", id},
                         {"image", inst.image},
                         {"enabled_models", inst.enabled_models},
                         {"method_choice", inst.method_choice}});
  }
  doc["instances"] = std::move(instances);
  auto conns = env.connections;
  std::sort(conns.begin(), conns.end(), [](const Connection& a, const Connection& b) {
    return std::tie(a.target, a.source) < std::tie(b.target, b.source);
  });
  json connections = json::array();
  for (const auto& c : conns) {
    connections.push_back({{"source", to_string(c.source)}, {"target", to_string(c.target)}});
  }
  doc["connections"] = std::move(connections);
  return canonical_text(doc);
}

Environment load_environment(std::string_view bytes, const Catalog& catalog) {
  const json doc = parse_document(bytes, "vso-env");
  allow_keys(doc, "", {"format", "schema_version", "env_id", "catalog_version", "instances",
                       "connections"});
  Environment env;
  ValidationReport report;
  env.env_id = expect_string(required(doc, "", "env_id"), "/env_id");
  env.catalog_version = optional_string(doc, "", "catalog_version").value_or("");

  each(doc, "", "instances", [&](const json& j, const std::string& p) {
    expect_object(j, p);
    allow_keys(j, p, {"id", "image", "enabled_models", "method_choice"});
    VsoInstance inst;
    inst.instance_id = expect_string(required(j, p, "id"), child(p, "id"));
    inst.image = expect_string(required(j, p, "image"), child(p, "image"));
    inst.enabled_models = string_set(j, p, "enabled_models", inst.instance_id, report);
    if (auto it = j.find("method_choice"); it != j.end()) {
      const std::string q = child(p, "method_choice");
      expect_object(*it, q);
      for (const auto& [slot, method] : it->items()) {
        inst.method_choice[slot] = expect_string(method, child(q, slot));
      }
    }
    const std::string id = inst.instance_id;
    if (!env.instances.emplace(id, std::move(inst)).second) {
      report.violations.push_back(Violation{"DuplicateId", "instance " + id});
    }
  });

  each(doc, "", "connections", [&](const json& j, const std::string& p) {
    expect_object(j, p);
    allow_keys(j, p, {"source", "target"});
    auto endpoint = [&](const char* key) {
      const std::string q = child(p, key);
      try {
        return parse_endpoint(expect_string(required(j, p, key), q));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::parse_error) throw;
        fail(q, e.what());
      }
    };
    Connection c{endpoint("source"), endpoint("target"), Level::ip};
    env.connections.push_back(std::move(c));
  });
  std::sort(env.connections.begin(), env.connections.end(),
            [](const Connection& a, const Connection& b) {
              return std::tie(a.target, a.source) < std::tie(b.target, b.source);
            });

  auto structural = validate_environment(env, catalog);
  report.violations.insert(report.violations.end(), structural.violations.begin(),
                           structural.violations.end());
  if (!report.ok()) {
    std::sort(report.violations.begin(), report.violations.end());
    throw ValidationFailed(std::move(report));
  }
  return env;
}

std::string save_vocabulary(const DslVocabulary& vocab) {
  if (vocab.name.empty()) {
    throw ValidationFailed(ValidationReport{{Violation{"InvalidId", "vocabulary name is empty"}}});
  }
  json doc = header("vso-vocab");
  doc["name"] = vocab.name;
  doc["ref_syntax"] = vocab.ref_syntax;
  doc["templates"] = vocab.templates;
  if (vocab.header) doc["header"] = *vocab.header;
  if (vocab.footer) doc["footer"] = *vocab.footer;
  return canonical_text(doc);
}

DslVocabulary load_vocabulary(std::string_view bytes) {
  const json doc = parse_document(bytes, "vso-vocab");
  allow_keys(doc, "", {"format", "schema_version", "name", "ref_syntax", "templates", "header",
                       "footer"});
  DslVocabulary vocab;
  vocab.name = expect_string(required(doc, "", "name"), "/name");
  vocab.ref_syntax = expect_string(required(doc, "", "ref_syntax"), "/ref_syntax");
  vocab.header = optional_string(doc, "", "header");
  vocab.footer = optional_string(doc, "", "footer");
  const json& templates = expect_object(required(doc, "", "templates"), "/templates");
  for (const auto& [sp, tmpl] : templates.items()) {
    vocab.templates[sp] = expect_string(tmpl, "/templates/" + sp);
  }
  if (vocab.name.empty()) {
    throw ValidationFailed(ValidationReport{{Violation{"InvalidId", "vocabulary name is empty"}}});
  }
  return vocab;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string(), path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string(), path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string(), path.string());
}

json to_json(const ValidationReport& report) {
  json out = json::array();
  for (const auto& v : report.violations) {
    out.push_back({{"code", v.code}, {"detail", v.detail}});
  }
  return out;
}

json to_json(const Parameter& param) {
  json j{{"address", to_string(param.address)},
         {"name", param.address.name},
         {"kind", param.address.kind == ParamKind::package ? "package" : "property"},
         {"uri", param.uri.str()}};
  if (!param.package.empty()) j["package"] = param.package;
  if (param.value) j["value"] = *param.value;
  return j;
}

json to_json(const ParamSets& sets) {
  json inputs = json::array();
  for (const auto& p : sets.inputs) inputs.push_back(to_json(p));
  json outputs = json::array();
  for (const auto& p : sets.outputs) outputs.push_back(to_json(p));
  return {{"inputs", std::move(inputs)}, {"outputs", std::move(outputs)}};
}

json to_json(const CandidateConnection& candidate) {
  return {{"source", to_string(candidate.source)},
          {"target", to_string(candidate.target)},
          {"source_uri", candidate.source_uri.str()},
          {"target_uri", candidate.target_uri.str()}};
}

json to_json(const ConnSet& conns) {
  json out = json::array();
  for (const auto& [a, b] : conns) out.push_back({a, b});
  return out;
}

json to_json(const ConfigurationReport& report) {
  json j{{"config", report.config.key()},
         {"total_time", report.total_time},
         {"critical_path_time", report.critical_path_time},
         {"package_count", report.package_count},
         {"missing_performance", report.missing_performance},
         {"feasible", report.feasible}};
  if (!report.error.empty()) j["error"] = report.error;
  return j;
}

json to_json(const TraversalRow& row) {
  json inputs = json::object();
  for (const auto& b : row.inputs) {
    if (b.fed()) {
      inputs[b.varname] = {{"step", b.source_step}, {"output", b.source_output}};
    } else {
      inputs[b.varname] = b.literal ? json(*b.literal) : json(nullptr);
    }
  }
  return {{"step", row.step},
          {"package", row.occurrence.package},
          {"software_package", row.software_package},
          {"occurrence", row.occurrence.label(Level::ip)},
          {"inputs", std::move(inputs)},
          {"outputs", row.outputs}};
}

json error_json(const Error& error) {
  json j{{"code", to_string(error.code())}, {"message", error.what()}};
  if (!error.subject().empty()) j["subject"] = error.subject();
  if (const auto* vf = dynamic_cast<const ValidationFailed*>(&error)) {
    j["violations"] = to_json(vf->report());
  }
  return j;
}

}  // namespace vso
