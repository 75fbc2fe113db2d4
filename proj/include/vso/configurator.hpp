#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vso/codegen.hpp"
#include "vso/composer.hpp"
#include "vso/configuration.hpp"

namespace vso {

/// Every configuration of `env`: the Cartesian product of the method sets
/// of all enabled model slots, dimensions ordered by (instance, slot) and
/// methods by id, in lexicographic order. An empty environment has exactly
/// one (empty) configuration. `limit` caps the number returned.
std::vector<Configuration> enumerate_configurations(const Environment& env,
                                                    const Catalog& catalog,
                                                    std::size_t limit = SIZE_MAX);

/// Product of the method counts without enumerating. Throws
/// Error(invalid_argument) on 64-bit overflow.
std::uint64_t count_configurations(const Environment& env, const Catalog& catalog);

enum class Criterion { total_time, critical_path_time };

std::string_view to_string(Criterion criterion);
/// "total" or "critical-path". Anything else, including quality metrics
/// that have no measuring model, throws Error(unsupported_criterion).
Criterion parse_criterion(std::string_view text);

struct ConfigurationReport {
  Configuration config;
  double total_time = 0.0;          // sum of package estimates
  double critical_path_time = 0.0;  // longest weighted path, unlimited parallelism
  std::size_t package_count = 0;
  std::vector<std::string> missing_performance;  // software packages costed at 0
  bool feasible = true;                          // false when the induced graph is cyclic
  std::string error;

  bool operator==(const ConfigurationReport&) const = default;
};

/// Evaluates one configuration. `data_units` feeds the per-unit cost term.
ConfigurationReport evaluate_configuration(const Environment& env, const Catalog& catalog,
                                           const Configuration& config,
                                           double data_units = 1.0);

/// Reports sorted ascending by `criterion`, ties broken by configuration
/// order; infeasible configurations come last.
std::vector<ConfigurationReport> compare_configurations(const Environment& env,
                                                        const Catalog& catalog,
                                                        const std::vector<Configuration>& configs,
                                                        Criterion criterion,
                                                        double data_units = 1.0);

}  // namespace vso
