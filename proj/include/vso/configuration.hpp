#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace vso {

/// One method choice for one enabled model slot of one instance.
struct Choice {
  std::string instance;
  std::string slot;
  std::string method;

  auto operator<=>(const Choice&) const = default;
};

/// A method choice for every enabled model of every instance, sorted by
/// (instance, slot). Configurations over the same environment compare in
/// enumeration order.
struct Configuration {
  std::vector<Choice> choices;

  const std::string* method_for(std::string_view instance, std::string_view slot) const;

  /// "inst:slot=method,inst:slot=method"; empty for the empty configuration.
  std::string key() const;

  /// Inverse of key(). Throws Error(invalid_argument).
  static Configuration parse(std::string_view key);

  auto operator<=>(const Configuration&) const = default;
};

}  // namespace vso
