#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "primeorbits/cli.hpp"

using namespace primeorbits;
namespace fs = std::filesystem;

namespace {

std::string maps_dir() {
  const char* env = std::getenv("PRIMEORBITS_MAPS");
  return env ? env : "maps";
}

CliResult run(std::vector<std::string> args, bool write = false) {
  std::ostringstream out, err;
  return run_cli(args, out, err, write);
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("unknown flag exits 2 and writes nothing") {
  const auto d = fresh_dir("primeorbits_cli_bad");
  const auto r = run({"orbits", "--map", "z2p5", "--bogus", "--out-dir", d.string()}, true);
  CHECK(r.exit_code == 2);
  CHECK_FALSE(fs::exists(d));
  CHECK(run({}).exit_code == 2);
}

TEST_CASE("errors go to stderr as json") {
  std::ostringstream out, err;
  const auto r = run_cli({"count", "--map", "z2p5", "--nmax", "6", "--tgrid", "1e30"}, out, err, false);
  CHECK(r.exit_code == 2);
  const auto j = nlohmann::json::parse(err.str());
  CHECK(j["error"] == "HorizonExceeded");
  // a numerical failure: the circle has no full-shift coding
  CHECK(run({"orbits", "--map", "z2", "--coding", "full", "--backend", "symbolic", "--nmax", "3"}).exit_code == 3);
}

TEST_CASE("orbits from a map file writes outputs and a manifest") {
  const auto d = fresh_dir("primeorbits_cli_orbits");
  const auto r = run({"orbits", "--map", maps_dir() + "/z2p5.json", "--nmax", "6", "--backend", "both", "--out-dir",
                      d.string()},
                     true);
  REQUIRE(r.exit_code == 0);
  for (const char* f : {"orbits.csv", "orbits.json", "agreement.csv", "run_manifest.json"}) CHECK(fs::exists(d / f));
  std::ifstream in(d / "run_manifest.json");
  const auto m = nlohmann::json::parse(in);
  CHECK(m["outputs"]["orbits.csv"] == sha256_hex(r.files.at("orbits.csv")));
  CHECK(m["map_hash"].get<std::string>().size() == 64);

  // the saved database feeds later commands
  const auto c = run({"count", "--db", (d / "orbits").string(), "--tgrid", "log:10:h:5"});
  CHECK(c.exit_code == 0);
  fs::remove_all(d);
}

TEST_CASE("dimension of the circle") {
  std::ostringstream out, err;
  const auto r = run_cli({"dimension", "--map", maps_dir() + "/z2.json", "--coding", maps_dir() + "/z2.coding.json",
                          "--nmax", "10", "--depth", "8"},
                         out, err, false);
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(std::abs(j["delta"].get<double>() - 1.0) < 1e-3);
  CHECK(std::abs(j["leading_eigenvalue"]["delta"].get<double>() - 1.0) < 1e-3);
}

TEST_CASE("outputs do not depend on the thread count") {
  const std::vector<std::vector<std::string>> commands = {
      {"orbits", "--map", "z2p2p2i", "--nmax", "9"},
      {"zeta", "--map", "z2p5", "--nmax", "10", "--ell", "1", "--rect", "0.5:0.6:-1:1", "--step", "0.05"},
      {"equidist", "--map", "z2p2p2i", "--nmax", "9", "--lmax", "3"},
      {"probe", "ncp", "--map", "z2p2p2i", "--depth", "10"},
  };
  for (auto cmd : commands) {
    auto one = cmd, eight = cmd;
    one.insert(one.end(), {"--threads", "1"});
    eight.insert(eight.end(), {"--threads", "8"});
    const auto a = run(one), b = run(eight);
    REQUIRE(a.exit_code == 0);
    CHECK(a.digests == b.digests);
  }
}
