#include "vso/semantic_registry.hpp"

#include <algorithm>

#include "vso/error.hpp"

namespace vso {

void EquivalenceRegistry::register_uri(const SemanticUri& uri) {
  if (parent_.try_emplace(uri.str(), uri.str()).second) {
    size_[uri.str()] = 1;
    ++classes_;
  }
}

const std::string& EquivalenceRegistry::root(const std::string& uri) const {
  const std::string* node = &parent_.at(uri);
  const std::string* current = &uri;
  while (*node != *current) {
    current = node;
    node = &parent_.at(*node);
  }
  return *node;
}

void EquivalenceRegistry::assert_same_as(const SemanticUri& a, const SemanticUri& b) {
  register_uri(a);
  register_uri(b);
  if (a == b) return;
  assertions_.insert(a < b ? Assertion{a, b} : Assertion{b, a});

  std::string ra = root(a.str());
  std::string rb = root(b.str());
  if (ra == rb) return;
  // union by size; ties go to the lexicographically smaller root
  if (size_[ra] < size_[rb] || (size_[ra] == size_[rb] && rb < ra)) std::swap(ra, rb);
  parent_[rb] = ra;
  size_[ra] += size_[rb];
  size_.erase(rb);
  --classes_;
}

EquivalenceRegistry EquivalenceRegistry::with_same_as(const SemanticUri& a,
                                                      const SemanticUri& b) const {
  EquivalenceRegistry next = *this;
  next.assert_same_as(a, b);
  return next;
}

bool EquivalenceRegistry::equivalent(const SemanticUri& a, const SemanticUri& b) const {
  if (a == b) return true;
  if (!contains(a) || !contains(b)) return false;
  return root(a.str()) == root(b.str());
}

std::vector<std::vector<SemanticUri>> EquivalenceRegistry::classes() const {
  std::map<std::string, std::vector<SemanticUri>> by_root;
  for (const auto& [uri, _] : parent_) by_root[root(uri)].emplace_back(uri);
  std::vector<std::vector<SemanticUri>> out;
  out.reserve(by_root.size());
  for (auto& [_, members] : by_root) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

std::set<std::string> EquivalenceRegistry::uris() const {
  std::set<std::string> out;
  for (const auto& [uri, _] : parent_) out.insert(uri);
  return out;
}

bool semantically_equal(const EquivalenceRegistry& registry, const SemanticUri& a,
                        const SemanticUri& b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::missing_uri, "parameter has no semantic binding");
  }
  return registry.equivalent(a, b);
}

}  // namespace vso
