#pragma once

// Structural types of the virtual simulation object hierarchy:
//
//   SoftwarePackage       really-executable unit, named inputs/outputs
//   ImplementingPackage   wraps one software package, adds defaults and URIs
//   Method                ordered sequence of implementing packages
//   SimulationModel       alternative methods, one selected
//   VsoImage              properties + models + nested images (composite)
//
// Parameters are generalized bottom-up: a method exposes the union of its
// packages' parameters, a model exposes its selected method's, an object
// exposes the union over its enabled models, its children and its
// properties. Union elements keep their occurrence identity (see
// ParamAddress), so equal varnames from different packages never merge.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vso/semantic_registry.hpp"

namespace vso {

struct InputParamSp {
  std::string varname;
  std::optional<std::string> value;

  bool operator==(const InputParamSp&) const = default;
};

struct OutputParamSp {
  std::string varname;

  bool operator==(const OutputParamSp&) const = default;
};

/// Affine cost: fixed_cost + per_unit_cost * units (seconds).
struct PerformanceModel {
  double fixed_cost = 0.0;
  double per_unit_cost = 0.0;

  double estimate(double units) const { return fixed_cost + per_unit_cost * units; }

  bool operator==(const PerformanceModel&) const = default;
};

struct SoftwarePackage {
  std::string id;
  std::vector<InputParamSp> inputs;
  std::vector<OutputParamSp> outputs;
  std::optional<PerformanceModel> perf;

  const InputParamSp* find_input(std::string_view varname) const;
  const OutputParamSp* find_output(std::string_view varname) const;

  bool operator==(const SoftwarePackage&) const = default;
};

/// Wraps the software input of the same varname.
struct InputParamIp {
  std::string varname;
  std::optional<std::string> default_value;
  SemanticUri uri;

  bool operator==(const InputParamIp&) const = default;
};

struct OutputParamIp {
  std::string varname;
  SemanticUri uri;

  bool operator==(const OutputParamIp&) const = default;
};

struct ImplementingPackage {
  std::string id;
  std::string software_package;
  std::vector<InputParamIp> inputs;
  std::vector<OutputParamIp> outputs;

  const InputParamIp* find_input(std::string_view varname) const;
  const OutputParamIp* find_output(std::string_view varname) const;

  bool operator==(const ImplementingPackage&) const = default;
};

struct Method {
  std::string id;
  std::vector<std::string> packages;  // execution order

  bool operator==(const Method&) const = default;
};

struct SimulationModel {
  std::string id;
  std::set<std::string> methods;
  std::string selected_method;

  bool operator==(const SimulationModel&) const = default;
};

struct Property {
  std::string name;
  SemanticUri uri;
  std::optional<std::string> value;

  bool operator==(const Property&) const = default;
};

struct VsoImage {
  std::string id;
  std::vector<Property> properties;
  std::set<std::string> models;
  std::set<std::string> children;

  bool composite() const noexcept { return !children.empty(); }

  bool operator==(const VsoImage&) const = default;
};

/// An immutable-after-load knowledge base. Entity collections are keyed by
/// id, so iteration order is the canonical (lexicographic) order.
struct Catalog {
  std::map<std::string, SoftwarePackage> software_packages;
  std::map<std::string, ImplementingPackage> implementing_packages;
  std::map<std::string, Method> methods;
  std::map<std::string, SimulationModel> models;
  std::map<std::string, VsoImage> images;
  EquivalenceRegistry registry;

  // Lookups throw Error(dangling_reference) naming `from` when unresolved.
  const SoftwarePackage& software_package(const std::string& id,
                                          std::string_view from = {}) const;
  const ImplementingPackage& implementing_package(const std::string& id,
                                                  std::string_view from = {}) const;
  const Method& method(const std::string& id, std::string_view from = {}) const;
  const SimulationModel& model(const std::string& id, std::string_view from = {}) const;
  const VsoImage& image(const std::string& id, std::string_view from = {}) const;

  /// Effective value of an implementing-package input: its default if set,
  /// otherwise the wrapped software input's value.
  std::optional<std::string> effective_value(const ImplementingPackage& ip,
                                              const InputParamIp& in) const;

  /// Registers every bound URI with the registry.
  void index_uris();

  bool operator==(const Catalog&) const = default;
};

// ---------------------------------------------------------------------------
// Generalized parameters

enum class ParamKind { package, property };

/// Occurrence identity of a generalized parameter.
///
/// Package parameters: `scope` is the model slot inside the object ("m1",
/// or "child/m4" for a model reached through a nested image; empty below
/// the object level), `method` and `position` locate the package
/// occurrence, `name` is the varname. Properties: `scope` is the image path
/// relative to the object ("" for its own), `method` is empty.
struct ParamAddress {
  std::string scope;
  std::string method;
  std::size_t position = 0;
  std::string name;
  ParamKind kind = ParamKind::package;

  auto operator<=>(const ParamAddress&) const = default;
};

/// "scope/method[pos].name" for package parameters, "scope/@name" for
/// properties; the scope segment is omitted when empty.
std::string to_string(const ParamAddress& address);

/// Inverse of to_string. Throws Error(invalid_argument).
ParamAddress parse_param_address(std::string_view text);

struct Parameter {
  ParamAddress address;
  std::string package;  // implementing package id, empty for properties
  SemanticUri uri;
  std::optional<std::string> value;  // effective value; inputs and properties only

  bool operator==(const Parameter&) const = default;
};

/// Inputs and outputs, each sorted by address with no duplicates.
struct ParamSets {
  std::vector<Parameter> inputs;
  std::vector<Parameter> outputs;

  bool operator==(const ParamSets&) const = default;
};

/// Which models of an object take part and which method each one uses.
/// Keys are slot paths; a slot missing from `methods` uses its model's
/// selected_method.
struct ModelSelection {
  std::set<std::string> enabled;
  std::map<std::string, std::string> methods;
};

ParamSets derive_method_io(const Method& method, const Catalog& catalog);

/// IO of the selected method. Throws Error(no_method_selected).
ParamSets derive_model_io(const SimulationModel& model, const Catalog& catalog);

/// IO of `model` realized by `method_id`, which must be one of its methods.
ParamSets derive_model_io(const SimulationModel& model, const std::string& method_id,
                          const Catalog& catalog);

/// Object IO with every model slot enabled and default methods.
ParamSets derive_vso_io(const VsoImage& image, const Catalog& catalog);

/// Object IO restricted to the given slot paths, default methods.
ParamSets derive_vso_io(const VsoImage& image, const std::set<std::string>& enabled_models,
                        const Catalog& catalog);

ParamSets derive_vso_io(const VsoImage& image, const ModelSelection& selection,
                        const Catalog& catalog);

/// Every model slot path reachable from `image` (own models first by id,
/// then each child's slots prefixed with "child/"), in sorted order.
/// Throws Error(cyclic_containment).
std::vector<std::string> model_slots(const VsoImage& image, const Catalog& catalog);

/// Resolves a slot path to its model. Throws Error(dangling_reference).
const SimulationModel& model_at_slot(const VsoImage& image, std::string_view slot,
                                     const Catalog& catalog);

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string code;    // e.g. "DanglingReference"
  std::string detail;  // e.g. "s2→ip99"

  std::string to_string() const { return code + ": " + detail; }

  auto operator<=>(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool contains(std::string_view rendered) const;
  std::string to_string() const;  // one violation per line
};

/// Lists every violated structural invariant. Never throws.
ValidationReport validate_catalog(const Catalog& catalog);

bool is_valid_id(std::string_view id);

}  // namespace vso
