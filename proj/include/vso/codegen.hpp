#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vso/composer.hpp"

namespace vso {

/// Package occurrences of one configuration and the dataflow between them.
struct PackageDag {
  std::vector<Occurrence> nodes;  // sorted
  std::vector<Link> feeds;        // parameter-level edges, sorted
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // node indices, deduplicated

  /// Index of the node owning `endpoint`, or nodes.size() when absent.
  std::size_t index_of(const Endpoint& endpoint) const;
};

struct DagOptions {
  /// Reject inputs with no effective value and no incoming link.
  bool require_inputs_fed = true;
};

/// Throws CycleDetected (message lists one cycle) or
/// DisconnectedRequiredInput (subject is the endpoint).
PackageDag build_package_dag(const Environment& env, const Catalog& catalog,
                             const Configuration& config, DagOptions options = {});

/// Kahn's algorithm; among ready nodes the smallest
/// (instance, method, position, slot) goes first.
std::vector<std::size_t> topological_order(const PackageDag& dag);

/// Statement templates keyed by software package id. Placeholders:
/// {step}, {in:<varname>}, {out:<varname>}; "{{" and "}}" are literal
/// braces. `ref_syntax` renders a reference to another step's output with
/// {step} and {out}.
struct DslVocabulary {
  std::string name;
  std::map<std::string, std::string> templates;
  std::optional<std::string> header;
  std::optional<std::string> footer;
  std::string ref_syntax = "{step}.{out}";

  bool operator==(const DslVocabulary&) const = default;
};

/// Neutral assignment-call syntax covering every software package:
///   step_3 = sp_solver(mesh=grid.dat, state=step_2.state)
DslVocabulary generic_vocabulary(const Catalog& catalog);

struct Binding {
  std::string varname;
  std::optional<std::string> literal;  // unfed input: its effective value
  std::string source_step;             // fed input: producer step label
  std::string source_output;           // fed input: producer output varname

  bool fed() const noexcept { return !source_step.empty(); }

  bool operator==(const Binding&) const = default;
};

struct TraversalRow {
  std::string step;
  Occurrence occurrence;
  std::string software_package;
  std::vector<Binding> inputs;       // by varname
  std::vector<std::string> outputs;  // varnames

  bool operator==(const TraversalRow&) const = default;
};

/// Emission plan: one row per occurrence in script order, steps labelled
/// step_1..step_n.
std::vector<TraversalRow> explain_traversal(const Environment& env, const Catalog& catalog,
                                            const Configuration& config);

struct WorkflowScript {
  std::string text;
  std::map<std::string, Occurrence> step_index;
};

/// Renders the traversal through `vocab`. Output is LF-terminated with no
/// trailing whitespace on statement lines. Throws MissingTemplate or
/// UnresolvedPlaceholder (subject is the software package id).
WorkflowScript generate_script(const Environment& env, const Catalog& catalog,
                               const Configuration& config, const DslVocabulary& vocab);

}  // namespace vso
