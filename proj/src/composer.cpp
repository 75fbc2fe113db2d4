#include "vso/composer.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <tuple>

#include "vso/error.hpp"

namespace vso {

namespace {

struct Resolved {
  const VsoInstance* instance = nullptr;
  const ImplementingPackage* package = nullptr;
  SemanticUri uri;
};

std::string chosen_method(const VsoInstance& inst, const SimulationModel& model,
                          const std::string& slot) {
  auto it = inst.method_choice.find(slot);
  return it == inst.method_choice.end() ? model.selected_method : it->second;
}

Resolved resolve(const Environment& env, const Catalog& catalog, const Endpoint& endpoint,
                 bool want_output, bool require_active) {
  auto fail = [&](std::string_view why) {
    return Error(ErrorCode::unknown_endpoint,
                 "UnknownEndpoint: " + to_string(endpoint) + " (" + std::string(why) + ")");
  };
  auto inst_it = env.instances.find(endpoint.instance);
  if (inst_it == env.instances.end()) throw fail("no such instance");
  const VsoInstance& inst = inst_it->second;
  const ParamAddress& addr = endpoint.address;
  if (addr.kind != ParamKind::package) throw fail("properties cannot be connected");

  const SimulationModel* model = nullptr;
  try {
    model = &model_at_slot(catalog.image(inst.image), addr.scope, catalog);
  } catch (const Error&) {
    throw fail("no such model slot");
  }
  if (!model->methods.contains(addr.method)) throw fail("method not in model");
  if (require_active) {
    if (!inst.enabled_models.contains(addr.scope)) throw fail("model is disabled");
    if (chosen_method(inst, *model, addr.scope) != addr.method) {
      throw fail("method is not the chosen one");
    }
  }
  const Method& method = catalog.method(addr.method);
  if (addr.position >= method.packages.size()) throw fail("no such package position");
  const auto& ip = catalog.implementing_package(method.packages[addr.position], method.id);

  Resolved out{&inst, &ip, {}};
  if (want_output) {
    const auto* param = ip.find_output(addr.name);
    if (!param) throw fail("no such output");
    out.uri = param->uri;
  } else {
    const auto* param = ip.find_input(addr.name);
    if (!param) throw fail("no such input");
    out.uri = param->uri;
  }
  return out;
}

bool by_target(const Connection& a, const Connection& b) {
  return std::tie(a.target, a.source) < std::tie(b.target, b.source);
}

bool implicitly_fed(const Catalog& catalog, const Endpoint& target) {
  const auto& addr = target.address;
  if (addr.position == 0) return false;
  for (const auto& [out, in] : implicit_links(catalog.method(addr.method), catalog)) {
    if (in.position == addr.position && in.name == addr.name) return true;
  }
  return false;
}

struct Feeds {
  std::set<Endpoint> fed;      // inputs with an incoming link
  std::set<Endpoint> sources;  // outputs with an outgoing link
};

Feeds feeds_of(const std::vector<Link>& links) {
  Feeds f;
  for (const auto& link : links) {
    f.fed.insert(link.target);
    f.sources.insert(link.source);
  }
  return f;
}

ParamSets filter_visible(const Environment& env, const Catalog& catalog,
                         const std::string& instance, Level level, const Feeds* feeds) {
  const VsoInstance& inst = env.instance(instance);
  ParamSets io = derive_vso_io(catalog.image(inst.image), inst.selection(), catalog);

  auto keep_kind = [&](const Parameter& p) {
    return p.address.kind == ParamKind::package || level == Level::object;
  };
  ParamSets out;
  for (auto& p : io.inputs) {
    if (!keep_kind(p)) continue;
    if (feeds && (p.value || feeds->fed.contains(Endpoint{instance, p.address}))) continue;
    out.inputs.push_back(std::move(p));
  }
  for (auto& p : io.outputs) {
    if (!keep_kind(p)) continue;
    if (feeds && feeds->sources.contains(Endpoint{instance, p.address})) continue;
    out.outputs.push_back(std::move(p));
  }
  return out;
}

void check_configuration(const Environment& env, const Catalog& catalog,
                         const Configuration& config) {
  std::set<std::pair<std::string, std::string>> covered;
  for (const auto& c : config.choices) {
    const VsoInstance& inst = env.instance(c.instance);
    if (!inst.enabled_models.contains(c.slot)) {
      throw Error(ErrorCode::invalid_argument, "configuration chooses a method for disabled "
                                               "or unknown model " + c.instance + ":" + c.slot);
    }
    const auto& model = model_at_slot(catalog.image(inst.image), c.slot, catalog);
    if (!model.methods.contains(c.method)) {
      throw Error(ErrorCode::unknown_method,
                  "UnknownMethod: " + c.method + " is not a method of " + model.id);
    }
    if (!covered.emplace(c.instance, c.slot).second) {
      throw Error(ErrorCode::invalid_argument,
                  "configuration chooses twice for " + c.instance + ":" + c.slot);
    }
  }
  for (const auto& [id, inst] : env.instances) {
    for (const auto& slot : inst.enabled_models) {
      if (!covered.contains({id, slot})) {
        throw Error(ErrorCode::invalid_argument,
                    "configuration has no method for " + id + ":" + slot);
      }
    }
  }
}

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::ip: return "IP";
    case Level::method: return "METHOD";
    case Level::model: return "MODEL";
    case Level::object: return "OBJECT";
  }
  return "IP";
}

Level parse_level(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Level l : {Level::ip, Level::method, Level::model, Level::object}) {
    if (upper == to_string(l)) return l;
  }
  throw Error(ErrorCode::invalid_argument, "unknown level '" + std::string(text) + "'");
}

std::string to_string(const Endpoint& endpoint) {
  return endpoint.instance + ":" + to_string(endpoint.address);
}

Endpoint parse_endpoint(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorCode::invalid_argument, "malformed endpoint '" + std::string(text) + "'");
  }
  return Endpoint{std::string(text.substr(0, colon)), parse_param_address(text.substr(colon + 1))};
}

const VsoInstance& Environment::instance(const std::string& id) const {
  auto it = instances.find(id);
  if (it == instances.end()) {
    throw Error(ErrorCode::unknown_instance, "UnknownInstance: " + id);
  }
  return it->second;
}

std::string Occurrence::label(Level level) const {
  switch (level) {
    case Level::object: return instance;
    case Level::model: return instance + "/" + slot;
    case Level::method: return instance + "/" + slot + "/" + method;
    case Level::ip:
      return instance + "/" + slot + "/" + method + "/" + package + "@" +
             std::to_string(position);
  }
  return instance;
}

std::string instantiate(Environment& env, const Catalog& catalog, const std::string& image_id) {
  auto image_it = catalog.images.find(image_id);
  if (image_it == catalog.images.end()) {
    throw Error(ErrorCode::unknown_image, "UnknownImage: " + image_id);
  }
  const VsoImage& image = image_it->second;

  std::size_t ordinal = 0;
  for (const auto& [id, inst] : env.instances) {
    if (inst.image != image_id) continue;
    const auto hash = id.rfind('#');
    std::size_t n = 0;
    const char* first = id.data() + hash + 1;
    if (hash != std::string::npos &&
        std::from_chars(first, id.data() + id.size(), n).ec == std::errc{}) {
      ordinal = std::max(ordinal, n);
    }
  }

  VsoInstance inst;
  inst.instance_id = image_id + "#" + std::to_string(ordinal + 1);
  inst.image = image_id;
  for (const auto& slot : model_slots(image, catalog)) {
    inst.enabled_models.insert(slot);
    inst.method_choice[slot] = model_at_slot(image, slot, catalog).selected_method;
  }
  std::string id = inst.instance_id;
  env.instances.emplace(id, std::move(inst));
  return id;
}

void connect(Environment& env, const Catalog& catalog, const Endpoint& source,
             const Endpoint& target) {
  const Resolved src = resolve(env, catalog, source, true, true);
  const Resolved dst = resolve(env, catalog, target, false, true);
  if (!semantically_equal(catalog.registry, src.uri, dst.uri)) {
    throw Error(ErrorCode::semantic_mismatch, "SemanticMismatch: " + to_string(source) + " <" +
                                                  src.uri.str() + "> vs " + to_string(target) +
                                                  " <" + dst.uri.str() + ">");
  }
  const bool stored = std::any_of(env.connections.begin(), env.connections.end(),
                                  [&](const Connection& c) { return c.target == target; });
  if (stored || implicitly_fed(catalog, target)) {
    throw Error(ErrorCode::input_occupied, "InputOccupied: " + to_string(target));
  }
  Connection conn{source, target, Level::ip};
  env.connections.insert(
      std::upper_bound(env.connections.begin(), env.connections.end(), conn, by_target), conn);
}

void disconnect(Environment& env, const Endpoint& target) {
  auto it = std::find_if(env.connections.begin(), env.connections.end(),
                         [&](const Connection& c) { return c.target == target; });
  if (it == env.connections.end()) {
    throw Error(ErrorCode::unknown_endpoint,
                "UnknownEndpoint: no stored connection into " + to_string(target));
  }
  env.connections.erase(it);
}

Connection connect_objects(Environment& env, const Catalog& catalog,
                           const std::string& source_instance,
                           const std::string& target_instance) {
  if (source_instance == target_instance) {
    throw Error(ErrorCode::invalid_argument, "an object cannot be connected to itself");
  }
  const Feeds feeds = feeds_of(ip_links(env, catalog));
  const ParamSets from = filter_visible(env, catalog, source_instance, Level::object, &feeds);
  const ParamSets to = filter_visible(env, catalog, target_instance, Level::object, &feeds);
  std::vector<Connection> candidates;
  for (const auto& out : from.outputs) {
    if (out.address.kind != ParamKind::package) continue;
    for (const auto& in : to.inputs) {
      if (in.address.kind != ParamKind::package) continue;
      if (catalog.registry.equivalent(out.uri, in.uri)) {
        candidates.push_back(Connection{Endpoint{source_instance, out.address},
                                        Endpoint{target_instance, in.address}, Level::ip});
      }
    }
  }
  if (candidates.empty()) {
    throw Error(ErrorCode::semantic_mismatch, "SemanticMismatch: no semantically equal "
                                              "parameters between " +
                                                  source_instance + " and " + target_instance);
  }
  if (candidates.size() > 1) {
    std::string listing;
    for (const auto& c : candidates) {
      listing += "\n  " + to_string(c.source) + " -> " + to_string(c.target);
    }
    throw Error(ErrorCode::ambiguous_connection,
                "AmbiguousConnection: " + std::to_string(candidates.size()) +
                    " possible connections" + listing);
  }
  connect(env, catalog, candidates.front().source, candidates.front().target);
  return candidates.front();
}

void set_model_enabled(Environment& env, const Catalog& catalog, const std::string& instance,
                       const std::string& slot, bool enabled) {
  const VsoInstance& current = env.instance(instance);
  const VsoImage& image = catalog.image(current.image);
  const SimulationModel* model = nullptr;
  try {
    model = &model_at_slot(image, slot, catalog);
  } catch (const Error&) {
    throw Error(ErrorCode::unknown_model, "UnknownModel: " + instance + ":" + slot);
  }
  VsoInstance& inst = env.instances.at(instance);
  if (enabled) {
    inst.enabled_models.insert(slot);
    inst.method_choice.try_emplace(slot, model->selected_method);
  } else {
    inst.enabled_models.erase(slot);
    inst.method_choice.erase(slot);
  }
}

void choose_method(Environment& env, const Catalog& catalog, const std::string& instance,
                   const std::string& slot, const std::string& method) {
  const VsoInstance& current = env.instance(instance);
  const SimulationModel* model = nullptr;
  try {
    model = &model_at_slot(catalog.image(current.image), slot, catalog);
  } catch (const Error&) {
    throw Error(ErrorCode::unknown_model, "UnknownModel: " + instance + ":" + slot);
  }
  if (!model->methods.contains(method)) {
    throw Error(ErrorCode::unknown_method,
                "UnknownMethod: " + method + " is not a method of " + model->id);
  }
  if (!current.enabled_models.contains(slot)) {
    throw Error(ErrorCode::invalid_argument, "model " + instance + ":" + slot + " is disabled");
  }
  env.instances.at(instance).method_choice[slot] = method;
}

Configuration current_configuration(const Environment& env, const Catalog& catalog) {
  Configuration config;
  for (const auto& [id, inst] : env.instances) {
    const VsoImage& image = catalog.image(inst.image, id);
    for (const auto& slot : inst.enabled_models) {
      config.choices.push_back(
          Choice{id, slot, chosen_method(inst, model_at_slot(image, slot, catalog), slot)});
    }
  }
  return config;
}

std::vector<Occurrence> occurrences(const Environment& env, const Catalog& catalog,
                                    const Configuration& config) {
  check_configuration(env, catalog, config);
  std::vector<Occurrence> out;
  for (const auto& c : config.choices) {
    const Method& method = catalog.method(c.method);
    for (std::size_t pos = 0; pos < method.packages.size(); ++pos) {
      out.push_back(Occurrence{c.instance, c.slot, c.method, pos, method.packages[pos]});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<ParamAddress, ParamAddress>> implicit_links(const Method& method,
                                                                  const Catalog& catalog) {
  std::vector<std::pair<ParamAddress, ParamAddress>> out;
  for (std::size_t k = 0; k + 1 < method.packages.size(); ++k) {
    const auto& producer = catalog.implementing_package(method.packages[k], method.id);
    const auto& consumer = catalog.implementing_package(method.packages[k + 1], method.id);
    auto outs = producer.outputs;
    auto ins = consumer.inputs;
    std::sort(outs.begin(), outs.end(),
              [](const auto& a, const auto& b) { return a.varname < b.varname; });
    std::sort(ins.begin(), ins.end(),
              [](const auto& a, const auto& b) { return a.varname < b.varname; });
    for (const auto& in : ins) {
      if (in.uri.empty()) continue;
      for (const auto& o : outs) {
        if (!o.uri.empty() && catalog.registry.equivalent(o.uri, in.uri)) {
          out.emplace_back(ParamAddress{"", method.id, k, o.varname},
                           ParamAddress{"", method.id, k + 1, in.varname});
          break;
        }
      }
    }
  }
  return out;
}

std::vector<Link> ip_links(const Environment& env, const Catalog& catalog,
                           const Configuration& config) {
  check_configuration(env, catalog, config);
  std::set<std::tuple<std::string, std::string, std::string>> selected;
  std::vector<Link> out;
  for (const auto& c : config.choices) {
    selected.emplace(c.instance, c.slot, c.method);
    for (auto [from, to] : implicit_links(catalog.method(c.method), catalog)) {
      from.scope = c.slot;
      to.scope = c.slot;
      out.push_back(Link{Endpoint{c.instance, from}, Endpoint{c.instance, to}, true});
    }
  }
  auto active = [&](const Endpoint& e) {
    return selected.contains({e.instance, e.address.scope, e.address.method});
  };
  for (const auto& conn : env.connections) {
    if (active(conn.source) && active(conn.target)) {
      out.push_back(Link{conn.source, conn.target, false});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Link> ip_links(const Environment& env, const Catalog& catalog) {
  return ip_links(env, catalog, current_configuration(env, catalog));
}

ParamSets visible_params(const Environment& env, const Catalog& catalog,
                         const std::string& instance, Level level) {
  env.instance(instance);
  if (level == Level::ip) return filter_visible(env, catalog, instance, level, nullptr);
  const Feeds feeds = feeds_of(ip_links(env, catalog));
  return filter_visible(env, catalog, instance, level, &feeds);
}

std::vector<CandidateConnection> suggest_connections(const Environment& env,
                                                     const Catalog& catalog) {
  const Feeds feeds = feeds_of(ip_links(env, catalog));
  std::map<std::string, ParamSets> visible;
  for (const auto& [id, _] : env.instances) {
    visible[id] = filter_visible(env, catalog, id, Level::object, &feeds);
  }

  std::vector<CandidateConnection> out;
  for (const auto& [src_id, src] : visible) {
    for (const auto& o : src.outputs) {
      if (o.address.kind != ParamKind::package) continue;
      for (const auto& [dst_id, dst] : visible) {
        if (dst_id == src_id) continue;
        for (const auto& in : dst.inputs) {
          if (in.address.kind != ParamKind::package) continue;
          if (catalog.registry.equivalent(o.uri, in.uri)) {
            out.push_back(CandidateConnection{Endpoint{src_id, o.address},
                                              Endpoint{dst_id, in.address}, o.uri, in.uri});
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.source.instance, a.source.address.name, a.target.instance,
                    a.target.address.name, a.source.address, a.target.address) <
           std::tie(b.source.instance, b.source.address.name, b.target.instance,
                    b.target.address.name, b.source.address, b.target.address);
  });
  return out;
}

std::vector<Connection> apply_all_suggestions(Environment& env, const Catalog& catalog) {
  std::vector<Connection> applied;
  for (const auto& candidate : suggest_connections(env, catalog)) {
    try {
      connect(env, catalog, candidate.source, candidate.target);
      applied.push_back(Connection{candidate.source, candidate.target, Level::ip});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::input_occupied) throw;
    }
  }
  return applied;
}

ValidationReport validate_environment(const Environment& env, const Catalog& catalog) {
  ValidationReport report;
  auto add = [&](std::string code, std::string detail) {
    report.violations.push_back(Violation{std::move(code), std::move(detail)});
  };
  const std::string arrow = "→";

  for (const auto& [key, inst] : env.instances) {
    if (key != inst.instance_id) add("InvalidId", "'" + inst.instance_id + "' stored under '" + key + "'");
    auto image_it = catalog.images.find(inst.image);
    if (image_it == catalog.images.end()) {
      add("DanglingReference", key + arrow + inst.image);
      continue;
    }
    const VsoImage& image = image_it->second;
    std::vector<std::string> slots;
    try {
      slots = model_slots(image, catalog);
    } catch (const Error& e) {
      add(std::string(to_string(e.code())), key + arrow + inst.image);
      continue;
    }
    for (const auto& slot : inst.enabled_models) {
      if (!std::binary_search(slots.begin(), slots.end(), slot)) {
        add("DanglingReference", key + arrow + slot);
      }
    }
    for (const auto& [slot, method] : inst.method_choice) {
      if (!inst.enabled_models.contains(slot)) {
        add("InvalidChoice", key + ":" + slot + " is not enabled");
        continue;
      }
      if (!std::binary_search(slots.begin(), slots.end(), slot)) continue;
      if (!model_at_slot(image, slot, catalog).methods.contains(method)) {
        add("DanglingReference", key + ":" + slot + arrow + method);
      }
    }
  }

  std::set<Endpoint> targets;
  for (const auto& conn : env.connections) {
    try {
      const Resolved src = resolve(env, catalog, conn.source, true, false);
      const Resolved dst = resolve(env, catalog, conn.target, false, false);
      if (!catalog.registry.equivalent(src.uri, dst.uri)) {
        add("SemanticMismatch", to_string(conn.source) + " -> " + to_string(conn.target));
      }
      if (implicitly_fed(catalog, conn.target)) add("InputOccupied", to_string(conn.target));
    } catch (const Error& e) {
      add(std::string(to_string(e.code())), to_string(conn.source) + " -> " + to_string(conn.target));
    }
    if (!targets.insert(conn.target).second) add("InputOccupied", to_string(conn.target));
    if (conn.level != Level::ip) add("InvalidLevel", to_string(conn.target));
  }
  std::sort(report.violations.begin(), report.violations.end());
  return report;
}

ConnSet lift_connections(const ConnSet& conns, const MembershipMap& parent) {
  auto up = [&](const std::string& element) -> const std::string& {
    auto it = parent.find(element);
    if (it == parent.end()) {
      throw Error(ErrorCode::unmapped_element, "UnmappedElement: " + element);
    }
    return it->second;
  };
  ConnSet out;
  for (const auto& [a, b] : conns) {
    const auto& pa = up(a);
    const auto& pb = up(b);
    if (pa != pb) out.emplace(pa, pb);
  }
  return out;
}

MembershipMap membership(const Environment& env, const Catalog& catalog, Level level) {
  if (level == Level::object) {
    throw Error(ErrorCode::invalid_argument, "objects have no parent level");
  }
  const Level up = static_cast<Level>(static_cast<int>(level) + 1);
  MembershipMap out;
  for (const auto& occ : occurrences(env, catalog, current_configuration(env, catalog))) {
    out.emplace(occ.label(level), occ.label(up));
  }
  return out;
}

ConnSet lifted_view(const Environment& env, const Catalog& catalog, Level level) {
  const Configuration config = current_configuration(env, catalog);
  std::map<std::tuple<std::string, std::string, std::string, std::size_t>, Occurrence> index;
  for (auto& occ : occurrences(env, catalog, config)) {
    index.emplace(std::tuple{occ.instance, occ.slot, occ.method, occ.position}, occ);
  }
  auto occ_of = [&](const Endpoint& e) -> const Occurrence& {
    return index.at({e.instance, e.address.scope, e.address.method, e.address.position});
  };

  ConnSet conns;
  for (const auto& link : ip_links(env, catalog, config)) {
    conns.emplace(occ_of(link.source).label(Level::ip), occ_of(link.target).label(Level::ip));
  }
  for (Level l = Level::ip; l != level; l = static_cast<Level>(static_cast<int>(l) + 1)) {
    MembershipMap parents;
    for (const auto& [_, occ] : index) {
      parents.emplace(occ.label(l), occ.label(static_cast<Level>(static_cast<int>(l) + 1)));
    }
    conns = lift_connections(conns, parents);
  }
  return conns;
}

}  // namespace vso
