#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

#include "fig2.hpp"
#include "vso/catalog_store.hpp"
#include "vso/configurator.hpp"

using namespace vso;
using namespace vso::test;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
};

// Runs the CLI with `args` (already shell-quoted), capturing stdout.
Run vso_cli(const std::string& args) {
  const std::string cmd = std::string(VSO_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("vso-cli-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const std::string kCatalog = q(fixture_path("fig2.vso-catalog"));

}  // namespace

TEST_CASE("validate") {
  CHECK(vso_cli("validate " + kCatalog).status == 0);
  TempDir tmp;
  auto doc = nlohmann::json::parse(read_file(fixture_path("fig2.vso-catalog")));
  doc["methods"][1]["packages"].push_back("ip99");
  write_file(tmp.path / "bad.vso-catalog", doc.dump());
  CHECK(vso_cli("validate " + q(tmp.path / "bad.vso-catalog")).status == 1);
  CHECK(vso_cli("validate /nonexistent.vso-catalog").status == 1);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(vso_cli("").status == 2);
  CHECK(vso_cli("enumerate --catalog").status == 2);
  CHECK(vso_cli("frobnicate").status == 2);
  CHECK(vso_cli("compare --catalog x --env y --data-units -3").status == 2);
}

TEST_CASE("compose with auto-connect reproduces the linked fixture") {
  TempDir tmp;
  const auto out = tmp.path / "env.vso-env";
  const auto r = vso_cli("compose --catalog " + kCatalog + " --instantiate o1 --instantiate o2" +
                         " --connect 'o1#1:m1/s2[1].state' 'o1#1:m3/s5[0].state'" +
                         " --auto-connect -o " + q(out));
  REQUIRE(r.status == 0);
  CHECK(read_file(out) == read_file(fixture_path("fig2-linked.vso-env")));
}

TEST_CASE("compose reports core errors with exit 1") {
  TempDir tmp;
  CHECK(vso_cli("compose --catalog " + kCatalog + " --instantiate o9 -o " + q(tmp.path / "e")).status == 1);
}

TEST_CASE("enumerate prints the count then every key") {
  const auto r = vso_cli("enumerate --catalog " + kCatalog + " --env " +
                         q(fixture_path("fig2.vso-env")));
  REQUIRE(r.status == 0);
  const Catalog c = fig2_catalog();
  const Environment env = fig2_env(c);
  std::string expected = "12\n";
  for (const auto& config : enumerate_configurations(env, c)) expected += config.key() + "\n";
  CHECK(r.out == expected);
  CHECK(vso_cli("enumerate --limit 2 --catalog " + kCatalog + " --env " +
                q(fixture_path("fig2.vso-env")))
            .out.size() < expected.size());
}

TEST_CASE("enumerate on a two-by-three environment prints 6") {
  TempDir tmp;
  const auto env = tmp.path / "small.vso-env";
  REQUIRE(vso_cli("compose --catalog " + kCatalog +
                  " --instantiate o1 --instantiate o2 --disable-model 'o1#1:m2'" +
                  " --disable-model 'o1#1:m3' -o " + q(env))
              .status == 0);
  const auto r = vso_cli("enumerate --catalog " + kCatalog + " --env " + q(env));
  CHECK(r.out.substr(0, r.out.find('\n')) == "6");
}

TEST_CASE("compare json equals the library reports") {
  const auto r = vso_cli("compare --json --criterion critical-path --data-units 2 --catalog " +
                         kCatalog + " --env " + q(fixture_path("fig2-linked.vso-env")));
  REQUIRE(r.status == 0);
  const Catalog c = fig2_catalog();
  const Environment env = fig2_linked_env(c);
  nlohmann::json expected = nlohmann::json::array();
  for (const auto& rep : compare_configurations(env, c, enumerate_configurations(env, c),
                                                Criterion::critical_path_time, 2.0)) {
    expected.push_back(to_json(rep));
  }
  CHECK(nlohmann::json::parse(r.out) == expected);
  CHECK(vso_cli("compare --criterion quality --catalog " + kCatalog + " --env " +
                q(fixture_path("fig2-linked.vso-env")))
            .status == 1);
}

TEST_CASE("generate writes the golden script, identically each time") {
  TempDir tmp;
  const std::string base = "generate --catalog " + kCatalog + " --env " +
                           q(fixture_path("fig2-chain.vso-env"));
  REQUIRE(vso_cli(base + " -o " + q(tmp.path / "a.wf")).status == 0);
  REQUIRE(vso_cli(base + " -o " + q(tmp.path / "b.wf")).status == 0);
  CHECK(read_file(tmp.path / "a.wf") == read_file(tmp.path / "b.wf"));
  CHECK(read_file(tmp.path / "a.wf") == read_file(fixture_path("fig2-chain.generic.wf")));
  CHECK(vso_cli(base + " --vocab " + q(fixture_path("shell.vso-vocab"))).out ==
        read_file(fixture_path("fig2-chain.shell.wf")));
  CHECK(vso_cli(base + " --config 'o1#1:m1=s1,o1#1:m3=s5,o2#1:m4=s7'").status == 0);
  // the default environment leaves o2's track input unconnected
  CHECK(vso_cli("generate --catalog " + kCatalog + " --env " + q(fixture_path("fig2.vso-env")))
            .status == 1);
}

TEST_CASE("connections at each level") {
  const std::string base = "connections --catalog " + kCatalog + " --env " +
                           q(fixture_path("fig2-linked.vso-env"));
  CHECK(vso_cli(base + " --level METHOD").out ==
        "o1#1/m1/s2 -> o1#1/m3/s5\no1#1/m3/s5 -> o2#1/m4/s7\n");
  CHECK(vso_cli(base + " --level OBJECT").out == "o1#1 -> o2#1\n");
}
