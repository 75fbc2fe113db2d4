#pragma once

#include <concepts>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace vso {

/// Opaque IRI-shaped identifier of a semantic entity. Compared by exact
/// string equality; the stored form is the canonical form.
class SemanticUri {
 public:
  SemanticUri() = default;
  explicit SemanticUri(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  auto operator<=>(const SemanticUri&) const = default;

 private:
  std::string value_;
};

/// sameAs equivalence over URIs: the reflexive, symmetric and transitive
/// closure of the asserted pairs, kept as a disjoint-set forest.
///
/// Queries never mutate the forest (no path compression on lookup), so a
/// registry that is no longer being built can be read concurrently.
class EquivalenceRegistry {
 public:
  using Assertion = std::pair<SemanticUri, SemanticUri>;

  void register_uri(const SemanticUri& uri);

  /// Unknown URIs are registered on the fly. Self-assertions are no-ops.
  void assert_same_as(const SemanticUri& a, const SemanticUri& b);

  /// Copy-on-write variant for versioned use.
  [[nodiscard]] EquivalenceRegistry with_same_as(const SemanticUri& a,
                                                 const SemanticUri& b) const;

  bool equivalent(const SemanticUri& a, const SemanticUri& b) const;

  bool contains(const SemanticUri& uri) const { return parent_.contains(uri.str()); }
  std::size_t uri_count() const noexcept { return parent_.size(); }
  std::size_t class_count() const noexcept { return classes_; }

  /// Asserted pairs, each stored with the smaller URI first.
  const std::set<Assertion>& assertions() const noexcept { return assertions_; }

  /// The partition, each class sorted and the classes ordered by first member.
  std::vector<std::vector<SemanticUri>> classes() const;

  /// Registries are equal when they assert the same pairs; registered but
  /// unasserted URIs only form singleton classes.
  bool operator==(const EquivalenceRegistry& other) const {
    return assertions_ == other.assertions_;
  }

  std::set<std::string> uris() const;

 private:
  const std::string& root(const std::string& uri) const;

  std::map<std::string, std::string> parent_;
  std::map<std::string, std::size_t> size_;
  std::set<Assertion> assertions_;
  std::size_t classes_ = 0;
};

/// Anything carrying a URI binding can be compared semantically.
template <class T>
concept UriBound = requires(const T& t) {
  { t.uri } -> std::convertible_to<SemanticUri>;
};

/// True iff both URIs are identical or sameAs-connected. Throws
/// Error(missing_uri) when either side is unbound (empty).
bool semantically_equal(const EquivalenceRegistry& registry, const SemanticUri& a,
                        const SemanticUri& b);

template <UriBound A, UriBound B>
bool semantically_equal(const EquivalenceRegistry& registry, const A& a, const B& b) {
  return semantically_equal(registry, SemanticUri(a.uri), SemanticUri(b.uri));
}

}  // namespace vso
