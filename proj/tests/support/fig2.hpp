#pragma once

// The two-object fixture: o1 with models m1..m3, o2 with m4, fifteen
// implementing packages. Built here in code, independently of the files in
// fixtures/, so file round-trips can be checked against it.

#include <filesystem>
#include <string>

#include "vso/composer.hpp"
#include "vso/model.hpp"

namespace vso::test {

std::filesystem::path fixture_path(const std::string& name);

Catalog fig2_catalog();

/// o1#1 and o2#1 with default choices, no connections.
Environment fig2_env(const Catalog& catalog);

/// fig2_env plus m1/s2 -> m3/s5 (state) and o1 -> o2 (track).
Environment fig2_linked_env(const Catalog& catalog);

/// fig2_linked_env with m2 disabled: the five-package chain
/// ip4, ip5, ip10, ip14, ip15.
Environment fig2_chain_env(const Catalog& catalog);

}  // namespace vso::test
