#pragma once

// Canonical persistence for catalogs (.vso-catalog), environments
// (.vso-env) and DSL vocabularies (.vso-vocab). All three are JSON
// documents with sorted keys, two-space indentation, LF line endings and a
// trailing newline; collections are sorted by id so the bytes do not
// depend on insertion order. See docs/formats.md.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "vso/codegen.hpp"
#include "vso/composer.hpp"
#include "vso/configurator.hpp"
#include "vso/error.hpp"
#include "vso/model.hpp"

namespace vso {

inline constexpr int kSchemaVersion = 1;

/// Thrown by save/load when the object violates invariants.
class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(ValidationReport report)
      : Error(ErrorCode::validation_failed, "ValidationFailed:\n" + report.to_string()),
        report_(std::move(report)) {}

  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

std::string save_catalog(const Catalog& catalog);
std::string save_environment(const Environment& env, const Catalog& catalog);
std::string save_vocabulary(const DslVocabulary& vocab);

// Loaders throw Error(parse_error) with the byte offset or the JSON
// pointer of the offending field as subject, Error(schema_version_unsupported),
// or ValidationFailed.
Catalog load_catalog(std::string_view bytes);
Environment load_environment(std::string_view bytes, const Catalog& catalog);
DslVocabulary load_vocabulary(std::string_view bytes);

/// Hex FNV-1a-64 fingerprint of the catalog's canonical form.
std::string catalog_version(const Catalog& catalog);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Pretty canonical rendering used for every document written by the
/// store: dump(2) plus a trailing newline.
std::string canonical_text(const nlohmann::json& doc);

// Structured renderings of core results, shared by the CLI and the API.
nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const Parameter& param);
nlohmann::json to_json(const ParamSets& sets);
nlohmann::json to_json(const CandidateConnection& candidate);
nlohmann::json to_json(const ConnSet& conns);
nlohmann::json to_json(const ConfigurationReport& report);
nlohmann::json to_json(const TraversalRow& row);
nlohmann::json error_json(const Error& error);

}  // namespace vso
