#include "vso/configurator.hpp"

#include <algorithm>
#include <limits>

#include "vso/error.hpp"

namespace vso {

namespace {

struct Dimension {
  std::string instance;
  std::string slot;
  std::vector<std::string> methods;  // sorted
};

std::vector<Dimension> dimensions(const Environment& env, const Catalog& catalog) {
  std::vector<Dimension> dims;
  for (const auto& [id, inst] : env.instances) {
    const VsoImage& image = catalog.image(inst.image, id);
    for (const auto& slot : inst.enabled_models) {
      const auto& model = model_at_slot(image, slot, catalog);
      dims.push_back(Dimension{id, slot, {model.methods.begin(), model.methods.end()}});
    }
  }
  return dims;
}

}  // namespace

std::vector<Configuration> enumerate_configurations(const Environment& env,
                                                    const Catalog& catalog, std::size_t limit) {
  const auto dims = dimensions(env, catalog);
  std::vector<Configuration> out;
  for (const auto& d : dims) {
    if (d.methods.empty()) return out;
  }
  // odometer over method indices, last dimension fastest
  std::vector<std::size_t> digit(dims.size(), 0);
  while (out.size() < limit) {
    Configuration config;
    config.choices.reserve(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
      config.choices.push_back(Choice{dims[i].instance, dims[i].slot, dims[i].methods[digit[i]]});
    }
    out.push_back(std::move(config));

    std::size_t i = dims.size();
    while (i > 0) {
      --i;
      if (++digit[i] < dims[i].methods.size()) break;
      digit[i] = 0;
      if (i == 0) return out;
    }
    if (dims.empty()) return out;
  }
  return out;
}

std::uint64_t count_configurations(const Environment& env, const Catalog& catalog) {
  std::uint64_t count = 1;
  for (const auto& d : dimensions(env, catalog)) {
    const std::uint64_t factor = d.methods.size();
    if (factor != 0 && count > std::numeric_limits<std::uint64_t>::max() / factor) {
      throw Error(ErrorCode::invalid_argument, "configuration count overflows 64 bits");
    }
    count *= factor;
  }
  return count;
}

std::string_view to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::total_time: return "total";
    case Criterion::critical_path_time: return "critical-path";
  }
  return "total";
}

Criterion parse_criterion(std::string_view text) {
  if (text == "total") return Criterion::total_time;
  if (text == "critical-path") return Criterion::critical_path_time;
  throw Error(ErrorCode::unsupported_criterion,
              "UnsupportedCriterion: '" + std::string(text) +
                  "' (available: total, critical-path)",
              std::string(text));
}

ConfigurationReport evaluate_configuration(const Environment& env, const Catalog& catalog,
                                           const Configuration& config, double data_units) {
  ConfigurationReport report;
  report.config = config;

  const auto nodes = occurrences(env, catalog, config);
  std::vector<double> cost(nodes.size(), 0.0);
  std::set<std::string> missing;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& ip = catalog.implementing_package(nodes[i].package);
    const auto& sp = catalog.software_package(ip.software_package, ip.id);
    if (sp.perf) {
      cost[i] = sp.perf->estimate(data_units);
    } else {
      missing.insert(sp.id);
    }
    report.total_time += cost[i];
  }
  report.package_count = nodes.size();
  report.missing_performance.assign(missing.begin(), missing.end());

  PackageDag dag;
  try {
    dag = build_package_dag(env, catalog, config, DagOptions{false});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::cycle_detected) throw;
    report.feasible = false;
    report.error = e.what();
    report.critical_path_time = report.total_time;
    return report;
  }

  // longest path ending at each node, in topological order
  std::vector<std::vector<std::size_t>> preds(dag.nodes.size());
  for (auto [a, b] : dag.edges) preds[b].push_back(a);
  std::vector<double> finish(dag.nodes.size(), 0.0);
  for (std::size_t n : topological_order(dag)) {
    double start = 0.0;
    for (std::size_t p : preds[n]) start = std::max(start, finish[p]);
    finish[n] = start + cost[n];
    report.critical_path_time = std::max(report.critical_path_time, finish[n]);
  }
  return report;
}

std::vector<ConfigurationReport> compare_configurations(const Environment& env,
                                                        const Catalog& catalog,
                                                        const std::vector<Configuration>& configs,
                                                        Criterion criterion, double data_units) {
  std::vector<ConfigurationReport> reports;
  reports.reserve(configs.size());
  for (const auto& config : configs) {
    reports.push_back(evaluate_configuration(env, catalog, config, data_units));
  }
  auto metric = [&](const ConfigurationReport& r) {
    return criterion == Criterion::total_time ? r.total_time : r.critical_path_time;
  };
  std::stable_sort(reports.begin(), reports.end(),
                   [&](const ConfigurationReport& a, const ConfigurationReport& b) {
                     if (a.feasible != b.feasible) return a.feasible;
                     if (metric(a) != metric(b)) return metric(a) < metric(b);
                     return a.config < b.config;
                   });
  return reports;
}

}  // namespace vso
