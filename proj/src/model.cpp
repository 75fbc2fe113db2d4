#include "vso/model.hpp"

#include <algorithm>
#include <charconv>

#include "vso/error.hpp"

namespace vso {

namespace {

template <class Map>
const typename Map::mapped_type& lookup(const Map& map, const std::string& id,
                                        std::string_view from) {
  if (auto it = map.find(id); it != map.end()) return it->second;
  std::string message = "DanglingReference: ";
  if (!from.empty()) message.append(from).append("→");
  message.append(id);
  throw Error(ErrorCode::dangling_reference, message);
}

template <class Params>
auto find_by_varname(const Params& params, std::string_view varname)
    -> decltype(&params.front()) {
  auto it = std::find_if(params.begin(), params.end(),
                         [&](const auto& p) { return p.varname == varname; });
  return it == params.end() ? nullptr : &*it;
}

void sort_unique(std::vector<Parameter>& params) {
  std::sort(params.begin(), params.end(),
            [](const Parameter& a, const Parameter& b) { return a.address < b.address; });
  params.erase(std::unique(params.begin(), params.end(),
                           [](const Parameter& a, const Parameter& b) {
                             return a.address == b.address;
                           }),
               params.end());
}

void append(ParamSets& into, ParamSets&& from) {
  into.inputs.insert(into.inputs.end(), std::make_move_iterator(from.inputs.begin()),
                     std::make_move_iterator(from.inputs.end()));
  into.outputs.insert(into.outputs.end(), std::make_move_iterator(from.outputs.begin()),
                      std::make_move_iterator(from.outputs.end()));
}

ParamSets with_scope(ParamSets sets, const std::string& scope) {
  for (auto& p : sets.inputs) p.address.scope = scope;
  for (auto& p : sets.outputs) p.address.scope = scope;
  return sets;
}

std::string strip_trailing_slash(const std::string& prefix) {
  return prefix.empty() ? prefix : prefix.substr(0, prefix.size() - 1);
}

void collect_slots(const VsoImage& image, const std::string& prefix, const Catalog& catalog,
                   std::vector<std::string>& stack, std::vector<std::string>& out) {
  if (std::find(stack.begin(), stack.end(), image.id) != stack.end()) {
    throw Error(ErrorCode::cyclic_containment, "CyclicContainment: " + image.id);
  }
  stack.push_back(image.id);
  for (const auto& model : image.models) out.push_back(prefix + model);
  for (const auto& child : image.children) {
    collect_slots(catalog.image(child, image.id), prefix + child + "/", catalog, stack, out);
  }
  stack.pop_back();
}

void collect_io(const VsoImage& image, const std::string& prefix,
                const ModelSelection& selection, const Catalog& catalog,
                std::vector<std::string>& stack, ParamSets& out) {
  if (std::find(stack.begin(), stack.end(), image.id) != stack.end()) {
    throw Error(ErrorCode::cyclic_containment, "CyclicContainment: " + image.id);
  }
  stack.push_back(image.id);

  const std::string own_scope = strip_trailing_slash(prefix);
  for (const auto& prop : image.properties) {
    ParamAddress address{own_scope, "", 0, prop.name, ParamKind::property};
    out.inputs.push_back(Parameter{address, "", prop.uri, prop.value});
    out.outputs.push_back(Parameter{address, "", prop.uri, std::nullopt});
  }

  for (const auto& model_id : image.models) {
    const std::string slot = prefix + model_id;
    if (!selection.enabled.contains(slot)) continue;
    const SimulationModel& model = catalog.model(model_id, image.id);
    auto chosen = selection.methods.find(slot);
    ParamSets io = chosen == selection.methods.end()
                       ? derive_model_io(model, catalog)
                       : derive_model_io(model, chosen->second, catalog);
    append(out, with_scope(std::move(io), slot));
  }

  for (const auto& child : image.children) {
    collect_io(catalog.image(child, image.id), prefix + child + "/", selection, catalog, stack,
               out);
  }
  stack.pop_back();
}

}  // namespace

const InputParamSp* SoftwarePackage::find_input(std::string_view varname) const {
  return find_by_varname(inputs, varname);
}
const OutputParamSp* SoftwarePackage::find_output(std::string_view varname) const {
  return find_by_varname(outputs, varname);
}
const InputParamIp* ImplementingPackage::find_input(std::string_view varname) const {
  return find_by_varname(inputs, varname);
}
const OutputParamIp* ImplementingPackage::find_output(std::string_view varname) const {
  return find_by_varname(outputs, varname);
}

const SoftwarePackage& Catalog::software_package(const std::string& id,
                                                 std::string_view from) const {
  return lookup(software_packages, id, from);
}
const ImplementingPackage& Catalog::implementing_package(const std::string& id,
                                                         std::string_view from) const {
  return lookup(implementing_packages, id, from);
}
const Method& Catalog::method(const std::string& id, std::string_view from) const {
  return lookup(methods, id, from);
}
const SimulationModel& Catalog::model(const std::string& id, std::string_view from) const {
  return lookup(models, id, from);
}
const VsoImage& Catalog::image(const std::string& id, std::string_view from) const {
  return lookup(images, id, from);
}

std::optional<std::string> Catalog::effective_value(const ImplementingPackage& ip,
                                                    const InputParamIp& in) const {
  if (in.default_value) return in.default_value;
  const auto& sp = software_package(ip.software_package, ip.id);
  if (const auto* base = sp.find_input(in.varname)) return base->value;
  return std::nullopt;
}

void Catalog::index_uris() {
  for (const auto& [_, ip] : implementing_packages) {
    for (const auto& in : ip.inputs) {
      if (!in.uri.empty()) registry.register_uri(in.uri);
    }
    for (const auto& out : ip.outputs) {
      if (!out.uri.empty()) registry.register_uri(out.uri);
    }
  }
  for (const auto& [_, image] : images) {
    for (const auto& prop : image.properties) {
      if (!prop.uri.empty()) registry.register_uri(prop.uri);
    }
  }
}

std::string to_string(const ParamAddress& address) {
  std::string out;
  if (!address.scope.empty()) out = address.scope + "/";
  if (address.kind == ParamKind::property) return out + "@" + address.name;
  out += address.method;
  out += "[" + std::to_string(address.position) + "].";
  out += address.name;
  return out;
}

ParamAddress parse_param_address(std::string_view text) {
  auto fail = [&] {
    return Error(ErrorCode::invalid_argument,
                 "malformed parameter address '" + std::string(text) + "'");
  };
  ParamAddress address;
  const auto at = text.rfind('@');
  if (at != std::string_view::npos && text.find('/', at) == std::string_view::npos) {
    if (at != 0 && text[at - 1] != '/') throw fail();
    address.kind = ParamKind::property;
    address.scope = std::string(text.substr(0, at == 0 ? 0 : at - 1));
    address.name = std::string(text.substr(at + 1));
    if (address.name.empty()) throw fail();
    return address;
  }
  const auto close = text.find("].");
  const auto open = close == std::string_view::npos ? close : text.rfind('[', close);
  if (open == std::string_view::npos || open == 0) throw fail();
  const auto digits = text.substr(open + 1, close - open - 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(),
                                   address.position);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) throw fail();
  address.name = std::string(text.substr(close + 2));
  const auto head = text.substr(0, open);
  const auto slash = head.rfind('/');
  if (slash == std::string_view::npos) {
    address.method = std::string(head);
  } else {
    address.scope = std::string(head.substr(0, slash));
    address.method = std::string(head.substr(slash + 1));
  }
  if (address.method.empty() || address.name.empty()) throw fail();
  return address;
}

ParamSets derive_method_io(const Method& method, const Catalog& catalog) {
  ParamSets out;
  for (std::size_t pos = 0; pos < method.packages.size(); ++pos) {
    const auto& ip = catalog.implementing_package(method.packages[pos], method.id);
    for (const auto& in : ip.inputs) {
      out.inputs.push_back(Parameter{ParamAddress{"", method.id, pos, in.varname},
                                     ip.id, in.uri, catalog.effective_value(ip, in)});
    }
    for (const auto& o : ip.outputs) {
      out.outputs.push_back(
          Parameter{ParamAddress{"", method.id, pos, o.varname}, ip.id, o.uri, std::nullopt});
    }
  }
  sort_unique(out.inputs);
  sort_unique(out.outputs);
  return out;
}

ParamSets derive_model_io(const SimulationModel& model, const Catalog& catalog) {
  if (model.selected_method.empty()) {
    throw Error(ErrorCode::no_method_selected, "NoMethodSelected: " + model.id);
  }
  return derive_model_io(model, model.selected_method, catalog);
}

ParamSets derive_model_io(const SimulationModel& model, const std::string& method_id,
                          const Catalog& catalog) {
  if (!model.methods.contains(method_id)) {
    throw Error(ErrorCode::unknown_method,
                "UnknownMethod: " + method_id + " is not a method of " + model.id);
  }
  return derive_method_io(catalog.method(method_id, model.id), catalog);
}

ParamSets derive_vso_io(const VsoImage& image, const Catalog& catalog) {
  ModelSelection all;
  for (auto& slot : model_slots(image, catalog)) all.enabled.insert(std::move(slot));
  return derive_vso_io(image, all, catalog);
}

ParamSets derive_vso_io(const VsoImage& image, const std::set<std::string>& enabled_models,
                        const Catalog& catalog) {
  return derive_vso_io(image, ModelSelection{enabled_models, {}}, catalog);
}

ParamSets derive_vso_io(const VsoImage& image, const ModelSelection& selection,
                        const Catalog& catalog) {
  const auto slots = model_slots(image, catalog);
  for (const auto& slot : selection.enabled) {
    if (!std::binary_search(slots.begin(), slots.end(), slot)) {
      throw Error(ErrorCode::dangling_reference, "DanglingReference: " + image.id + "→" + slot);
    }
  }
  ParamSets out;
  std::vector<std::string> stack;
  collect_io(image, "", selection, catalog, stack, out);
  sort_unique(out.inputs);
  sort_unique(out.outputs);
  return out;
}

std::vector<std::string> model_slots(const VsoImage& image, const Catalog& catalog) {
  std::vector<std::string> out;
  std::vector<std::string> stack;
  collect_slots(image, "", catalog, stack, out);
  std::sort(out.begin(), out.end());
  return out;
}

const SimulationModel& model_at_slot(const VsoImage& image, std::string_view slot,
                                     const Catalog& catalog) {
  const VsoImage* current = &image;
  std::string_view rest = slot;
  for (auto slash = rest.find('/'); slash != std::string_view::npos; slash = rest.find('/')) {
    const std::string child(rest.substr(0, slash));
    if (!current->children.contains(child)) {
      throw Error(ErrorCode::dangling_reference,
                  "DanglingReference: " + image.id + "→" + std::string(slot));
    }
    current = &catalog.image(child, current->id);
    rest.remove_prefix(slash + 1);
  }
  const std::string model_id(rest);
  if (!current->models.contains(model_id)) {
    throw Error(ErrorCode::dangling_reference,
                "DanglingReference: " + image.id + "→" + std::string(slot));
  }
  return catalog.model(model_id, current->id);
}

}  // namespace vso
