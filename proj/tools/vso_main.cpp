// vso: batch front end for catalogs, environments and workflow scripts.
//
// Exit status: 0 success, 1 validation failure or core error, 2 usage error.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vso/catalog_store.hpp"
#include "vso/codegen.hpp"
#include "vso/composer.hpp"
#include "vso/configurator.hpp"
#include "vso/service.hpp"

namespace {

using namespace vso;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Inputs {
  std::string catalog;
  std::string env;
};

Catalog load_catalog_file(const std::string& path) { return load_catalog(read_file(path)); }

Environment load_env_or_empty(const std::string& path, const Catalog& catalog) {
  if (path.empty()) {
    Environment env;
    env.catalog_version = catalog_version(catalog);
    return env;
  }
  return load_environment(read_file(path), catalog);
}

DslVocabulary resolve_vocabulary(const std::string& spec, const Catalog& catalog) {
  if (spec == "generic") return generic_vocabulary(catalog);
  return load_vocabulary(read_file(spec));
}

Configuration resolve_config(const std::string& spec, const Environment& env,
                             const Catalog& catalog) {
  if (spec.empty() || spec == "current") return current_configuration(env, catalog);
  return Configuration::parse(spec);
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

std::string format_seconds(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << v;
  return s.str();
}

std::pair<std::string, int> split_addr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::invalid_argument, "address must be host:port, got '" + addr + "'");
  }
  try {
    return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_argument, "bad port in '" + addr + "'");
  }
}

const char* env_or(const char* name, const char* fallback) {
  const char* v = std::getenv(name);
  return v && *v ? v : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compose virtual simulation objects into workflow scripts"};
  app.require_subcommand(1);

  // validate
  std::string validate_catalog_path;
  std::string validate_env_path;
  auto* validate = app.add_subcommand("validate", "Check a catalog (and optionally an environment)");
  validate->add_option("catalog", validate_catalog_path, "Catalog file")->required();
  validate->add_option("--env", validate_env_path, "Environment file to check against it");

  // compose
  Inputs compose_in;
  std::vector<std::string> instantiate_images;
  std::vector<std::string> connect_pairs;
  std::vector<std::string> disable_models;
  std::vector<std::string> method_choices;
  bool auto_connect = false;
  std::string compose_out;
  auto* compose = app.add_subcommand("compose", "Edit an environment non-interactively");
  compose->add_option("--catalog", compose_in.catalog)->required();
  compose->add_option("--env", compose_in.env, "Environment to start from (default: empty)");
  compose->add_option("--instantiate", instantiate_images, "Add an instance of IMAGE")
      ->type_name("IMAGE");
  compose->add_option("--connect", connect_pairs, "Connect SOURCE to TARGET endpoints")
      ->expected(2)
      ->type_name("SOURCE TARGET");
  compose->add_option("--disable-model", disable_models, "Disable a model slot")
      ->type_name("INSTANCE:SLOT");
  compose->add_option("--method", method_choices, "Choose a method for a model slot")
      ->type_name("INSTANCE:SLOT=METHOD");
  compose->add_flag("--auto-connect", auto_connect, "Apply every connection suggestion");
  compose->add_option("-o,--output", compose_out,
                      "Where to write the environment (default: --env, else stdout)");

  // connections
  Inputs conn_in;
  std::string level_text = "OBJECT";
  auto* connections = app.add_subcommand("connections", "Print connections viewed at a level");
  connections->add_option("--catalog", conn_in.catalog)->required();
  connections->add_option("--env", conn_in.env)->required();
  connections->add_option("--level", level_text, "IP, METHOD, MODEL or OBJECT");

  // enumerate
  Inputs enum_in;
  std::size_t enum_limit = SIZE_MAX;
  auto* enumerate = app.add_subcommand("enumerate", "Print the configuration count and keys");
  enumerate->add_option("--catalog", enum_in.catalog)->required();
  enumerate->add_option("--env", enum_in.env)->required();
  enumerate->add_option("--limit", enum_limit, "Print at most this many keys");

  // compare
  Inputs cmp_in;
  std::string criterion_text = "total";
  double data_units = 1.0;
  bool cmp_json = false;
  std::vector<std::string> cmp_configs;
  auto* compare = app.add_subcommand("compare", "Rank configurations by estimated time");
  compare->add_option("--catalog", cmp_in.catalog)->required();
  compare->add_option("--env", cmp_in.env)->required();
  compare->add_option("--criterion", criterion_text, "total or critical-path");
  compare->add_option("--data-units", data_units, "Input size for per-unit costs")
      ->check(CLI::NonNegativeNumber);
  compare->add_option("--config", cmp_configs, "Restrict to these configuration keys");
  compare->add_flag("--json", cmp_json, "Print reports as JSON");

  // generate
  Inputs gen_in;
  std::string vocab_spec = "generic";
  std::string config_spec;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Emit the workflow script of a configuration");
  generate->add_option("--catalog", gen_in.catalog)->required();
  generate->add_option("--env", gen_in.env)->required();
  generate->add_option("--vocab", vocab_spec, "Vocabulary file, or 'generic'");
  generate->add_option("--config", config_spec, "Configuration key (default: current choices)");
  generate->add_option("-o,--output", gen_out, "Output file (default: stdout)");

  // serve
  std::string serve_addr = env_or("VSO_ADDR", "127.0.0.1:8080");
  std::string serve_catalog = env_or("VSO_CATALOG", "");
  std::vector<std::string> serve_vocabs;
  auto* serve = app.add_subcommand("serve", "Run the HTTP session API");
  serve->add_option("--addr", serve_addr, "host:port (env VSO_ADDR)");
  serve->add_option("--catalog", serve_catalog, "Catalog file (env VSO_CATALOG)");
  serve->add_option("--vocab", serve_vocabs, "Extra vocabulary files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*validate) {
      Catalog catalog;
      try {
        catalog = load_catalog_file(validate_catalog_path);
        if (!validate_env_path.empty()) {
          load_environment(read_file(validate_env_path), catalog);
        }
      } catch (const ValidationFailed& e) {
        std::cerr << e.report().to_string();
        return kExitFailure;
      }
      std::cerr << "ok\n";
      return 0;
    }

    if (*compose) {
      const Catalog catalog = load_catalog_file(compose_in.catalog);
      Environment env = load_env_or_empty(compose_in.env, catalog);
      for (const auto& image : instantiate_images) {
        std::cerr << "instantiated " << instantiate(env, catalog, image) << "\n";
      }
      for (const auto& spec : disable_models) {
        const auto colon = spec.find(':');
        if (colon == std::string::npos) {
          throw Error(ErrorCode::invalid_argument, "expected INSTANCE:SLOT, got '" + spec + "'");
        }
        set_model_enabled(env, catalog, spec.substr(0, colon), spec.substr(colon + 1), false);
      }
      for (const auto& spec : method_choices) {
        for (const auto& c : Configuration::parse(spec).choices) {
          choose_method(env, catalog, c.instance, c.slot, c.method);
        }
      }
      for (std::size_t i = 0; i + 1 < connect_pairs.size(); i += 2) {
        connect(env, catalog, parse_endpoint(connect_pairs[i]), parse_endpoint(connect_pairs[i + 1]));
      }
      if (auto_connect) {
        for (const auto& c : apply_all_suggestions(env, catalog)) {
          std::cerr << "connected " << to_string(c.source) << " -> " << to_string(c.target) << "\n";
        }
      }
      const std::string out = compose_out.empty() ? compose_in.env : compose_out;
      emit(out, save_environment(env, catalog));
      return 0;
    }

    if (*connections) {
      const Catalog catalog = load_catalog_file(conn_in.catalog);
      const Environment env = load_environment(read_file(conn_in.env), catalog);
      for (const auto& [a, b] : lifted_view(env, catalog, parse_level(level_text))) {
        std::cout << a << " -> " << b << "\n";
      }
      return 0;
    }

    if (*enumerate) {
      const Catalog catalog = load_catalog_file(enum_in.catalog);
      const Environment env = load_environment(read_file(enum_in.env), catalog);
      std::cout << count_configurations(env, catalog) << "\n";
      for (const auto& c : enumerate_configurations(env, catalog, enum_limit)) {
        std::cout << c.key() << "\n";
      }
      return 0;
    }

    if (*compare) {
      const Criterion criterion = parse_criterion(criterion_text);
      const Catalog catalog = load_catalog_file(cmp_in.catalog);
      const Environment env = load_environment(read_file(cmp_in.env), catalog);
      std::vector<Configuration> configs;
      for (const auto& key : cmp_configs) configs.push_back(Configuration::parse(key));
      if (configs.empty()) configs = enumerate_configurations(env, catalog);
      const auto reports = compare_configurations(env, catalog, configs, criterion, data_units);
      if (cmp_json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        std::cout << canonical_text(arr);
        return 0;
      }
      std::cout << "rank\ttotal\tcritical-path\tpackages\tconfiguration\n";
      for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        std::cout << i + 1 << "\t" << format_seconds(r.total_time) << "\t"
                  << format_seconds(r.critical_path_time) << "\t" << r.package_count << "\t"
                  << r.config.key();
        if (!r.feasible) std::cout << "\t(infeasible: " << r.error << ")";
        if (!r.missing_performance.empty()) {
          std::cout << "\t(no performance model:";
          for (const auto& sp : r.missing_performance) std::cout << " " << sp;
          std::cout << ")";
        }
        std::cout << "\n";
      }
      return 0;
    }

    if (*generate) {
      const Catalog catalog = load_catalog_file(gen_in.catalog);
      const Environment env = load_environment(read_file(gen_in.env), catalog);
      const DslVocabulary vocab = resolve_vocabulary(vocab_spec, catalog);
      const Configuration config = resolve_config(config_spec, env, catalog);
      emit(gen_out, generate_script(env, catalog, config, vocab).text);
      return 0;
    }

    if (*serve) {
      if (serve_catalog.empty()) {
        std::cerr << "serve needs --catalog or VSO_CATALOG\n";
        return kExitUsage;
      }
      Catalog catalog = load_catalog_file(serve_catalog);
      std::map<std::string, DslVocabulary> vocabs;
      for (const auto& path : serve_vocabs) {
        DslVocabulary v = load_vocabulary(read_file(path));
        vocabs.emplace(v.name, std::move(v));
      }
      api::Service service(std::move(catalog), std::move(vocabs));
      api::HttpServer server(service);
      const auto [host, port] = split_addr(serve_addr);
      const int bound = server.bind(host, port);
      if (bound < 0) {
        std::cerr << "error[IoError]: cannot bind " << serve_addr << "\n";
        return kExitFailure;
      }
      std::cerr << "listening on " << host << ":" << bound << "\n";
      return server.listen() ? 0 : kExitFailure;
    }
  } catch (const ValidationFailed& e) {
    std::cerr << "error[" << to_string(e.code()) << "]: " << e.report().to_string();
    return kExitFailure;
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
