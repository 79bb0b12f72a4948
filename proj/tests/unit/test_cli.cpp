#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "itp/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "itp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  int code = itp::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::string kDir = ITP_SCENARIO_DIR;

}  // namespace

TEST_CASE("no arguments prints usage and exits 2") {
  auto r = run({});
  CHECK(r.code == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("compare prints the verdict first") {
  auto r = run({"compare", "--scenario", kDir + "/villa.sdu", "--g", "cash", "--f", "villa_t2",
                "--s", "0", "--t", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("PRECEQ\n", 0) == 0);
}

TEST_CASE("cce and tsv output") {
  auto r = run({"cce", "--scenario", kDir + "/villa.sdu", "--f", "villa_t1", "--s", "0", "--t",
                "1", "--format", "tsv"});
  CHECK(r.code == 0);
  CHECK(r.out.find("1000000") != std::string::npos);
  CHECK(r.out.find('\t') != std::string::npos);
}

TEST_CASE("input errors exit 2") {
  CHECK(run({"cce", "--scenario", kDir + "/missing.sdu", "--f", "x"}).code == 2);
  CHECK(run({"cce", "--scenario", kDir + "/villa.sdu", "--f", "nope"}).code == 2);
  CHECK(run({"compare", "--scenario", kDir + "/villa.sdu", "--variant", "nope", "--g", "cash",
             "--f", "villa_t2"})
            .code == 2);
}

TEST_CASE("examples run") {
  CHECK(run({"example", "villa"}).code == 0);
  auto dpp = run({"example", "dpp", "--scenario", kDir + "/binomial.sdu"});
  CHECK(dpp.code == 0);
  CHECK(dpp.out.find("optimal strategy") != std::string::npos);
}

TEST_CASE("semigroup and uniqueness subcommands") {
  auto s = run({"semigroup", "--scenario", kDir + "/random8.sdu", "--count", "5"});
  CHECK(s.code == 0);
  auto u = run({"uniqueness", "--scenario", kDir + "/villa.sdu", "--other",
                kDir + "/villa.sdu"});
  CHECK(u.code == 0);
}

TEST_CASE("axioms subcommand flags a fault") {
  auto ok = run({"axioms", "--scenario", kDir + "/forward_martingale.sdu", "--level", "0"});
  CHECK(ok.code == 0);
  auto bad = run({"axioms", "--scenario", kDir + "/forward_martingale.sdu", "--level", "0",
                  "--fault", "degenerate"});
  CHECK(bad.code == 1);
}

TEST_CASE("recover writes a scenario that passes uniqueness") {
  auto out = (std::filesystem::temp_directory_path() / "itp_unit_recovered.sdu").string();
  auto r = run({"recover", "--scenario", kDir + "/recoverable.sdu", "--out", out});
  CHECK(r.code == 0);
  CHECK(r.out.find("result: PASS") != std::string::npos);
  auto u = run({"uniqueness", "--scenario", kDir + "/recoverable.sdu", "--other", out});
  CHECK(u.code == 0);
  CHECK(run({"recover", "--scenario", kDir + "/villa.sdu"}).code == 1);
  std::filesystem::remove(out);
}
