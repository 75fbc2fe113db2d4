#include "vso/service.hpp"

#include <charconv>

#include "vso/catalog_store.hpp"
#include "vso/configurator.hpp"

namespace vso::api {

using nlohmann::json;

namespace {

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  while (!path.empty()) {
    const auto slash = path.find('/');
    if (slash != 0) out.emplace_back(path.substr(0, slash));
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash + 1);
  }
  return out;
}

Error bad_request(const std::string& what) {
  return Error(ErrorCode::invalid_argument, "InvalidArgument: " + what);
}

std::string string_field(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw bad_request(std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::string query_param(const std::map<std::string, std::string>& query, const char* key,
                        std::string fallback) {
  auto it = query.find(key);
  return it == query.end() ? std::move(fallback) : it->second;
}

Response not_found(std::string_view what) {
  Error e(ErrorCode::invalid_argument, "no such endpoint: " + std::string(what));
  return Response{404, json{{"error", error_json(e)}}};
}

json environment_document(const Environment& env, const Catalog& catalog) {
  return json::parse(save_environment(env, catalog));
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown_session:
    case ErrorCode::unknown_image:
    case ErrorCode::unknown_instance:
    case ErrorCode::unknown_endpoint:
    case ErrorCode::unknown_model:
    case ErrorCode::unknown_method:
    case ErrorCode::unknown_vocabulary:
      return 404;
    case ErrorCode::stale_revision:
    case ErrorCode::input_occupied:
      return 409;
    case ErrorCode::parse_error:
      return 400;
    default:
      return 422;
  }
}

Service::Service(Catalog catalog, std::map<std::string, DslVocabulary> vocabularies)
    : catalog_(std::move(catalog)),
      catalog_version_(vso::catalog_version(catalog_)),
      vocabularies_(std::move(vocabularies)) {
  vocabularies_.try_emplace("generic", generic_vocabulary(catalog_));
}

std::shared_ptr<Service::Session> Service::find_session(const std::string& id) const {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::unknown_session, "UnknownSession: " + id, id);
  }
  return it->second;
}

const DslVocabulary& Service::vocabulary(const std::string& name) const {
  auto it = vocabularies_.find(name);
  if (it == vocabularies_.end()) {
    throw Error(ErrorCode::unknown_vocabulary, "UnknownVocabulary: " + name, name);
  }
  return it->second;
}

Response Service::handle(std::string_view method, std::string_view path,
                         const std::map<std::string, std::string>& query,
                         std::string_view body) {
  try {
    json parsed = json::object();
    if (!body.empty()) {
      try {
        parsed = json::parse(body.begin(), body.end());
      } catch (const json::parse_error& e) {
        const std::string where = "byte " + std::to_string(e.byte);
        throw Error(ErrorCode::parse_error, "ParseError at " + where + ": " + e.what(), where);
      }
      if (!parsed.is_object()) throw bad_request("request body must be an object");
    }
    auto segments = split_path(path);
    if (segments.empty() || segments.front() != "v1") return not_found(path);
    segments.erase(segments.begin());
    return route(method, segments, query, parsed);
  } catch (const Error& e) {
    return Response{http_status(e.code()), json{{"error", error_json(e)}}};
  } catch (const json::exception& e) {
    Error wrapped(ErrorCode::invalid_argument, std::string("InvalidArgument: ") + e.what());
    return Response{422, json{{"error", error_json(wrapped)}}};
  }
}

Response Service::route(std::string_view method, const std::vector<std::string>& seg,
                        const std::map<std::string, std::string>& query, const json& body) {
  if (seg.size() == 1 && seg[0] == "images" && method == "GET") {
    json images = json::array();
    for (const auto& [id, image] : catalog_.images) {
      json props = json::array();
      for (const auto& p : image.properties) {
        json j{{"name", p.name}, {"uri", p.uri.str()}};
        if (p.value) j["value"] = *p.value;
        props.push_back(std::move(j));
      }
      images.push_back({{"id", id},
                        {"composite", image.composite()},
                        {"models", model_slots(image, catalog_)},
                        {"children", image.children},
                        {"properties", std::move(props)}});
    }
    return {200, json{{"images", std::move(images)}}};
  }
  if (seg.size() == 1 && seg[0] == "catalog" && method == "GET") {
    return {200, json{{"catalog_version", catalog_version_},
                      {"document", json::parse(save_catalog(catalog_))}}};
  }
  if (seg.size() == 1 && seg[0] == "vocabularies" && method == "GET") {
    json names = json::array();
    for (const auto& [name, _] : vocabularies_) names.push_back(name);
    return {200, json{{"vocabularies", std::move(names)}}};
  }
  if (seg.size() == 1 && seg[0] == "sessions" && method == "POST") {
    Environment env;
    if (auto it = body.find("environment"); it != body.end()) {
      env = load_environment(it->dump(), catalog_);
    }
    std::lock_guard lock(sessions_mutex_);
    auto session = std::make_shared<Session>();
    session->id = "s" + std::to_string(next_session_++);
    env.env_id = session->id;
    env.catalog_version = catalog_version_;
    session->env = std::move(env);
    sessions_.emplace(session->id, session);
    return {201, json{{"session_id", session->id}, {"revision", session->revision}}};
  }
  if (seg.size() >= 2 && seg[0] == "sessions") {
    if (seg.size() == 2 && method == "DELETE") {
      std::lock_guard lock(sessions_mutex_);
      if (sessions_.erase(seg[1]) == 0) {
        throw Error(ErrorCode::unknown_session, "UnknownSession: " + seg[1], seg[1]);
      }
      return {200, json{{"deleted", seg[1]}}};
    }
    auto session = find_session(seg[1]);
    return session_route(method, *session, {seg.begin() + 2, seg.end()}, query, body);
  }
  return not_found(method);
}

template <class Fn>
Response Service::mutate(Session& session, const json& body, Fn&& fn) {
  std::lock_guard lock(session.mutex);
  auto rev = body.find("revision");
  if (rev == body.end() || !rev->is_number_unsigned()) {
    throw bad_request("mutations must carry the current 'revision'");
  }
  if (rev->get<std::uint64_t>() != session.revision) {
    throw Error(ErrorCode::stale_revision,
                "StaleRevision: session is at revision " + std::to_string(session.revision) +
                    ", request carried " + rev->dump(),
                std::to_string(session.revision));
  }
  Environment draft = session.env;
  json result = fn(draft);
  // reject anything that would not persist cleanly
  if (auto report = validate_environment(draft, catalog_); !report.ok()) {
    throw ValidationFailed(std::move(report));
  }
  session.env = std::move(draft);
  ++session.revision;
  result["revision"] = session.revision;
  return {200, std::move(result)};
}

Response Service::session_route(std::string_view method, Session& session,
                                const std::vector<std::string>& rest,
                                const std::map<std::string, std::string>& query,
                                const json& body) {
  const bool get = method == "GET";
  const bool post = method == "POST";

  auto read = [&](auto&& fn) -> Response {
    std::lock_guard lock(session.mutex);
    json result = fn(static_cast<const Environment&>(session.env));
    result["revision"] = session.revision;
    return {200, std::move(result)};
  };

  if (rest.empty() && get) {
    return read([&](const Environment& env) {
      return json{{"session_id", session.id}, {"environment", environment_document(env, catalog_)}};
    });
  }
  if (rest.size() == 1 && rest[0] == "environment" && get) {
    return read([&](const Environment& env) {
      return json{{"document", environment_document(env, catalog_)}};
    });
  }
  if (rest.size() == 1 && rest[0] == "instances" && post) {
    const std::string image = string_field(body, "image");
    return mutate(session, body, [&](Environment& env) {
      return json{{"instance_id", instantiate(env, catalog_, image)}};
    });
  }
  if (rest.size() == 3 && rest[0] == "instances" && rest[2] == "models" && post) {
    const std::string slot = string_field(body, "model");
    auto enabled = body.find("enabled");
    if (enabled == body.end() || !enabled->is_boolean()) {
      throw bad_request("field 'enabled' must be a boolean");
    }
    return mutate(session, body, [&](Environment& env) {
      set_model_enabled(env, catalog_, rest[1], slot, enabled->get<bool>());
      return json::object();
    });
  }
  if (rest.size() == 3 && rest[0] == "instances" && rest[2] == "methods" && post) {
    const std::string slot = string_field(body, "model");
    const std::string m = string_field(body, "method");
    return mutate(session, body, [&](Environment& env) {
      choose_method(env, catalog_, rest[1], slot, m);
      return json::object();
    });
  }
  if (rest.size() == 3 && rest[0] == "instances" && rest[2] == "visible" && get) {
    const Level level = parse_level(query_param(query, "level", "OBJECT"));
    return read([&](const Environment& env) {
      json out = to_json(visible_params(env, catalog_, rest[1], level));
      out["level"] = to_string(level);
      return out;
    });
  }
  if (rest.size() == 1 && rest[0] == "suggestions" && get) {
    return read([&](const Environment& env) {
      json list = json::array();
      for (const auto& c : suggest_connections(env, catalog_)) list.push_back(to_json(c));
      return json{{"suggestions", std::move(list)}};
    });
  }
  if (rest.size() == 2 && rest[0] == "suggestions" && rest[1] == "apply" && post) {
    return mutate(session, body, [&](Environment& env) {
      json applied = json::array();
      if (auto index = body.find("index"); index != body.end()) {
        if (!index->is_number_unsigned()) throw bad_request("field 'index' must be unsigned");
        const auto list = suggest_connections(env, catalog_);
        const auto i = index->get<std::size_t>();
        if (i >= list.size()) {
          throw Error(ErrorCode::unknown_endpoint,
                      "UnknownEndpoint: no suggestion #" + std::to_string(i));
        }
        connect(env, catalog_, list[i].source, list[i].target);
        applied.push_back({{"source", to_string(list[i].source)}, {"target", to_string(list[i].target)}});
      } else {
        for (const auto& c : apply_all_suggestions(env, catalog_)) {
          applied.push_back({{"source", to_string(c.source)}, {"target", to_string(c.target)}});
        }
      }
      return json{{"applied", std::move(applied)}};
    });
  }
  if (rest.size() == 1 && rest[0] == "connections" && post) {
    const Endpoint source = parse_endpoint(string_field(body, "source"));
    const Endpoint target = parse_endpoint(string_field(body, "target"));
    return mutate(session, body, [&](Environment& env) {
      connect(env, catalog_, source, target);
      return json::object();
    });
  }
  if (rest.size() == 2 && rest[0] == "connections" && rest[1] == "remove" && post) {
    const Endpoint target = parse_endpoint(string_field(body, "target"));
    return mutate(session, body, [&](Environment& env) {
      disconnect(env, target);
      return json::object();
    });
  }
  if (rest.size() == 1 && rest[0] == "connections" && get) {
    const Level level = parse_level(query_param(query, "level", "OBJECT"));
    return read([&](const Environment& env) {
      return json{{"level", to_string(level)},
                  {"connections", to_json(lifted_view(env, catalog_, level))}};
    });
  }
  if (rest.size() == 1 && rest[0] == "connect-objects" && post) {
    const std::string source = string_field(body, "source");
    const std::string target = string_field(body, "target");
    return mutate(session, body, [&](Environment& env) {
      const Connection c = connect_objects(env, catalog_, source, target);
      return json{{"connection", {{"source", to_string(c.source)}, {"target", to_string(c.target)}}}};
    });
  }
  if (rest.size() == 1 && rest[0] == "configurations" && get) {
    std::size_t limit = 1000;
    if (auto it = query.find("limit"); it != query.end()) {
      const auto& s = it->second;
      if (std::from_chars(s.data(), s.data() + s.size(), limit).ec != std::errc{}) {
        throw bad_request("limit must be an unsigned integer");
      }
    }
    return read([&](const Environment& env) {
      json keys = json::array();
      for (const auto& c : enumerate_configurations(env, catalog_, limit)) keys.push_back(c.key());
      return json{{"count", count_configurations(env, catalog_)},
                  {"current", current_configuration(env, catalog_).key()},
                  {"configurations", std::move(keys)}};
    });
  }
  if (rest.size() == 1 && rest[0] == "compare" && post) {
    const Criterion criterion =
        parse_criterion(body.contains("criterion") ? string_field(body, "criterion") : "total");
    double units = 1.0;
    if (auto it = body.find("data_units"); it != body.end()) {
      if (!it->is_number() || it->get<double>() < 0.0) {
        throw bad_request("data_units must be a nonnegative number");
      }
      units = it->get<double>();
    }
    std::vector<Configuration> configs;
    bool explicit_configs = false;
    if (auto it = body.find("configurations"); it != body.end()) {
      if (!it->is_array()) throw bad_request("configurations must be an array of keys");
      explicit_configs = true;
      for (const auto& key : *it) configs.push_back(Configuration::parse(key.get<std::string>()));
    }
    return read([&](const Environment& env) {
      const auto all = explicit_configs ? configs : enumerate_configurations(env, catalog_);
      json reports = json::array();
      for (const auto& r : compare_configurations(env, catalog_, all, criterion, units)) {
        reports.push_back(to_json(r));
      }
      return json{{"criterion", to_string(criterion)}, {"reports", std::move(reports)}};
    });
  }
  if (rest.size() == 1 && rest[0] == "generate" && post) {
    const DslVocabulary& vocab =
        vocabulary(body.contains("vocabulary") ? string_field(body, "vocabulary") : "generic");
    std::optional<Configuration> requested;
    if (body.contains("config")) requested = Configuration::parse(string_field(body, "config"));
    return read([&](const Environment& env) {
      const Configuration config = requested ? *requested : current_configuration(env, catalog_);
      const WorkflowScript script = generate_script(env, catalog_, config, vocab);
      json steps = json::array();
      for (const auto& row : explain_traversal(env, catalog_, config)) steps.push_back(to_json(row));
      return json{{"config", config.key()},
                  {"vocabulary", vocab.name},
                  {"script", script.text},
                  {"steps", std::move(steps)}};
    });
  }
  return not_found(method);
}

}  // namespace vso::api
