#pragma once

// Design-time environment: instances of catalog images plus the
// user-defined connections between their package parameters.
//
// Connections are stored only between implementing-package parameters
// (the IP level). Method, model and object level connections are derived
// on demand by lifting through membership maps. Inside a method, adjacent
// packages whose output and input are semantically equal are linked
// implicitly; those links are derived too and never stored.

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vso/configuration.hpp"
#include "vso/model.hpp"

namespace vso {

enum class Level { ip, method, model, object };

std::string_view to_string(Level level);
/// Accepts IP, METHOD, MODEL, OBJECT in any case. Throws Error(invalid_argument).
Level parse_level(std::string_view text);

struct VsoInstance {
  std::string instance_id;
  std::string image;
  std::set<std::string> enabled_models;              // slot paths
  std::map<std::string, std::string> method_choice;  // slot -> method

  ModelSelection selection() const { return {enabled_models, method_choice}; }

  bool operator==(const VsoInstance&) const = default;
};

struct Endpoint {
  std::string instance;
  ParamAddress address;

  auto operator<=>(const Endpoint&) const = default;
};

/// "instance:address", e.g. "o1#1:m1/s2[1].state".
std::string to_string(const Endpoint& endpoint);
Endpoint parse_endpoint(std::string_view text);

struct Connection {
  Endpoint source;  // an output
  Endpoint target;  // an input
  Level level = Level::ip;

  auto operator<=>(const Connection&) const = default;
};

struct Environment {
  std::string env_id = "env";
  std::string catalog_version;
  std::map<std::string, VsoInstance> instances;
  std::vector<Connection> connections;  // IP level, sorted by (target, source)

  /// Throws Error(unknown_instance).
  const VsoInstance& instance(const std::string& id) const;

  bool operator==(const Environment&) const = default;
};

/// One implementing-package occurrence inside an instance.
struct Occurrence {
  std::string instance;
  std::string slot;
  std::string method;
  std::size_t position = 0;
  std::string package;

  /// Label of the element owning this occurrence at `level`:
  ///   OBJECT "o1#1", MODEL "o1#1/m1", METHOD "o1#1/m1/s2",
  ///   IP "o1#1/m1/s2/ip4@0".
  std::string label(Level level) const;

  auto operator<=>(const Occurrence&) const = default;
};

/// A parameter-level dataflow edge between two occurrences.
struct Link {
  Endpoint source;
  Endpoint target;
  bool implicit = false;

  auto operator<=>(const Link&) const = default;
};

struct CandidateConnection {
  Endpoint source;
  Endpoint target;
  SemanticUri source_uri;
  SemanticUri target_uri;

  bool operator==(const CandidateConnection&) const = default;
};

// ---------------------------------------------------------------------------
// Mutations. Each either succeeds or throws leaving `env` unchanged.

/// Adds an instance "<image>#<n>" with every model slot enabled and the
/// models' selected methods. Throws Error(unknown_image).
std::string instantiate(Environment& env, const Catalog& catalog, const std::string& image_id);

/// Stores an IP-level connection between two active endpoints.
/// Throws UnknownEndpoint, SemanticMismatch or InputOccupied.
void connect(Environment& env, const Catalog& catalog, const Endpoint& source,
             const Endpoint& target);

/// Removes the stored connection feeding `target`. Throws UnknownEndpoint.
void disconnect(Environment& env, const Endpoint& target);

/// Object-level gesture: connects the unique semantically equal pair of
/// visible output of `source_instance` and visible input of
/// `target_instance`. Throws SemanticMismatch when there is none and
/// AmbiguousConnection when there are several.
Connection connect_objects(Environment& env, const Catalog& catalog,
                           const std::string& source_instance,
                           const std::string& target_instance);

void set_model_enabled(Environment& env, const Catalog& catalog, const std::string& instance,
                       const std::string& slot, bool enabled);

void choose_method(Environment& env, const Catalog& catalog, const std::string& instance,
                   const std::string& slot, const std::string& method);

// ---------------------------------------------------------------------------
// Queries

/// Configuration made of the instances' current method choices.
Configuration current_configuration(const Environment& env, const Catalog& catalog);

/// Occurrences selected by `config`, sorted.
std::vector<Occurrence> occurrences(const Environment& env, const Catalog& catalog,
                                    const Configuration& config);

/// Implicit intra-method links: for every input of the package at position
/// k+1, the first output (by varname) of the package at k that is
/// semantically equal to it. Pairs are (output, input) addresses with an
/// empty scope.
std::vector<std::pair<ParamAddress, ParamAddress>> implicit_links(const Method& method,
                                                                  const Catalog& catalog);

/// Every active IP-level link under `config`: implicit links of the chosen
/// methods plus stored connections whose endpoints are both selected.
std::vector<Link> ip_links(const Environment& env, const Catalog& catalog,
                           const Configuration& config);
std::vector<Link> ip_links(const Environment& env, const Catalog& catalog);

/// Generalized parameters of an instance after filtration: inputs with an
/// unset value and no feed, outputs with no outgoing link. At IP level the
/// package parameters are returned unfiltered; properties are only
/// reported at OBJECT level. Throws Error(unknown_instance).
ParamSets visible_params(const Environment& env, const Catalog& catalog,
                         const std::string& instance, Level level);

/// Cross-instance pairs (visible output, visible input) that are
/// semantically equal, ordered by (source instance, source name, target
/// instance, target name).
std::vector<CandidateConnection> suggest_connections(const Environment& env,
                                                     const Catalog& catalog);

/// Applies every suggestion in order, skipping the ones invalidated by an
/// earlier application. Returns the applied connections.
std::vector<Connection> apply_all_suggestions(Environment& env, const Catalog& catalog);

/// Lists every violated invariant of a stored environment.
ValidationReport validate_environment(const Environment& env, const Catalog& catalog);

// ---------------------------------------------------------------------------
// Lifting

using ConnSet = std::set<std::pair<std::string, std::string>>;
using MembershipMap = std::map<std::string, std::string>;

/// { (parent(a), parent(b)) : (a, b) in conns, parent(a) != parent(b) }.
/// Throws Error(unmapped_element) when an endpoint has no parent.
ConnSet lift_connections(const ConnSet& conns, const MembershipMap& parent);

/// Maps each element label at `level` to its owner's label one level up.
MembershipMap membership(const Environment& env, const Catalog& catalog, Level level);

/// Active connections viewed at `level`.
ConnSet lifted_view(const Environment& env, const Catalog& catalog, Level level);

}  // namespace vso
