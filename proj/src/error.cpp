#include "vso/error.hpp"

namespace vso {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::dangling_reference: return "DanglingReference";
    case ErrorCode::no_method_selected: return "NoMethodSelected";
    case ErrorCode::cyclic_containment: return "CyclicContainment";
    case ErrorCode::missing_uri: return "MissingUri";
    case ErrorCode::unknown_image: return "UnknownImage";
    case ErrorCode::unknown_instance: return "UnknownInstance";
    case ErrorCode::unknown_endpoint: return "UnknownEndpoint";
    case ErrorCode::unknown_model: return "UnknownModel";
    case ErrorCode::unknown_method: return "UnknownMethod";
    case ErrorCode::semantic_mismatch: return "SemanticMismatch";
    case ErrorCode::input_occupied: return "InputOccupied";
    case ErrorCode::ambiguous_connection: return "AmbiguousConnection";
    case ErrorCode::unmapped_element: return "UnmappedElement";
    case ErrorCode::cycle_detected: return "CycleDetected";
    case ErrorCode::disconnected_required_input: return "DisconnectedRequiredInput";
    case ErrorCode::missing_template: return "MissingTemplate";
    case ErrorCode::unresolved_placeholder: return "UnresolvedPlaceholder";
    case ErrorCode::unsupported_criterion: return "UnsupportedCriterion";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::schema_version_unsupported: return "SchemaVersionUnsupported";
    case ErrorCode::validation_failed: return "ValidationFailed";
    case ErrorCode::unknown_session: return "UnknownSession";
    case ErrorCode::unknown_vocabulary: return "UnknownVocabulary";
    case ErrorCode::stale_revision: return "StaleRevision";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

}  // namespace vso
