#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace vso {

/// Machine-readable error taxonomy shared by the library, the CLI and the
/// HTTP API. The names returned by `to_string` are part of the wire format.
enum class ErrorCode {
  invalid_argument,
  dangling_reference,
  no_method_selected,
  cyclic_containment,
  missing_uri,
  unknown_image,
  unknown_instance,
  unknown_endpoint,
  unknown_model,
  unknown_method,
  semantic_mismatch,
  input_occupied,
  ambiguous_connection,
  unmapped_element,
  cycle_detected,
  disconnected_required_input,
  missing_template,
  unresolved_placeholder,
  unsupported_criterion,
  parse_error,
  schema_version_unsupported,
  validation_failed,
  unknown_session,
  unknown_vocabulary,
  stale_revision,
  io_error,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string subject = {})
      : std::runtime_error(message), code_(code), subject_(std::move(subject)) {}

  ErrorCode code() const noexcept { return code_; }

  /// Id of the offending element when there is a single one (package id,
  /// endpoint, instance id), empty otherwise.
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace vso
