#include "vso/configuration.hpp"

#include <algorithm>

#include "vso/error.hpp"

namespace vso {

const std::string* Configuration::method_for(std::string_view instance,
                                             std::string_view slot) const {
  for (const auto& c : choices) {
    if (c.instance == instance && c.slot == slot) return &c.method;
  }
  return nullptr;
}

std::string Configuration::key() const {
  std::string out;
  for (const auto& c : choices) {
    if (!out.empty()) out += ',';
    out += c.instance + ":" + c.slot + "=" + c.method;
  }
  return out;
}

Configuration Configuration::parse(std::string_view key) {
  Configuration config;
  while (!key.empty()) {
    const auto comma = key.find(',');
    const std::string_view item = key.substr(0, comma);
    const auto colon = item.find(':');
    const auto eq = item.rfind('=');
    if (colon == std::string_view::npos || eq == std::string_view::npos || eq < colon ||
        colon == 0 || eq == colon + 1 || eq + 1 == item.size()) {
      throw Error(ErrorCode::invalid_argument,
                  "malformed configuration entry '" + std::string(item) + "'");
    }
    config.choices.push_back(Choice{std::string(item.substr(0, colon)),
                                    std::string(item.substr(colon + 1, eq - colon - 1)),
                                    std::string(item.substr(eq + 1))});
    key = comma == std::string_view::npos ? std::string_view{} : key.substr(comma + 1);
  }
  std::sort(config.choices.begin(), config.choices.end());
  return config;
}

}  // namespace vso
