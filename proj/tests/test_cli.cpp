#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "scalefn/cli.hpp"

using namespace scalefn;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "scalefn");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::main_entry(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("scalefn_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("analyze the worked example") {
  const auto dir = scratch("analyze");
  std::ofstream(dir / "ex.json") << R"({"dimension":2,"matrix":[[0,1],[3,1]],"coefficients":[{"q":[0,0],"c":1}]})";
  const auto r = run({"analyze", (dir / "ex.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("2.30277563773") != std::string::npos);
  CHECK(r.out.find("-1.30277563773") != std::string::npos);
  CHECK(r.out.find("verdict: dilation") != std::string::npos);
  const auto s = run({"analyze", (dir / "ex.json").string(), "--format", "structured"});
  const auto j = nlohmann::json::parse(s.out);
  CHECK(j["dilation"] == true);
  CHECK(j["m"] == 3);
}

TEST_CASE("bound on D4 names the corollary") {
  const auto r = run({"bound", oracle::data_path("d4.json")});
  CHECK(r.code == 0);
  CHECK(r.out.find("Corollary d=1: |x| <= 3") != std::string::npos);
}

TEST_CASE("values on Haar warns and succeeds") {
  const auto r = run({"values", oracle::data_path("haar.json")});
  CHECK(r.code == 0);
  CHECK(r.err.find("NonUniqueWarning") != std::string::npos);
}

TEST_CASE("refine writes level dumps") {
  const auto dir = scratch("refine");
  const auto r = run({"refine", oracle::data_path("d4.json"), "--levels", "3", "--dump-dir", dir.string(),
                      "--format", "delimited"});
  CHECK(r.code == 0);
  for (int j = 0; j <= 3; ++j) CHECK(std::filesystem::exists(dir / ("d4.level" + std::to_string(j) + ".tsv")));
  const auto again = run({"refine", oracle::data_path("d4.json"), "--levels", "3", "--dump-dir", dir.string(),
                          "--format", "delimited"});
  CHECK(again.out == r.out);  // deterministic
}

TEST_CASE("refine without a unique eigenvector") {
  const auto r = run({"refine", oracle::data_path("haar.json"), "--dump-dir", ""});
  CHECK(r.code == 3);
  CHECK(r.err.find("error: NormalizationImpossible") != std::string::npos);
  CHECK(run({"refine", oracle::data_path("haar.json"), "--dump-dir", "", "--left-closed"}).code == 0);
}

TEST_CASE("cascade output") {
  const auto r = run({"cascade", oracle::data_path("haar.json"), "--iters", "3", "--dump-dir", ""});
  CHECK(r.code == 0);
  CHECK(r.out.find("level 3: samples 8, mass 1, support [0, 0.875]") != std::string::npos);
}

TEST_CASE("check suite passes on D4") {
  const auto r = run({"check", oracle::data_path("d4.json"), "--levels", "4", "--iters", "6"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"analyze", oracle::data_path("d4.json"), "--format", "xml"}).code == 1);
  CHECK(run({"cascade", oracle::data_path("d4.json"), "--iters", "40"}).code == 1);
  const auto missing = run({"analyze", (dir / "none.json").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.rfind("error: ParseError", 0) == 0);
  std::ofstream(dir / "sum.json") << R"({"dimension":1,"matrix":[[2]],"coefficients":[{"q":[0],"c":"1/3"}]})";
  CHECK(run({"analyze", (dir / "sum.json").string()}).code == 2);
  std::ofstream(dir / "nodil.json") << R"({"dimension":1,"matrix":[[1]],"coefficients":[{"q":[0],"c":1}]})";
  CHECK(run({"bound", (dir / "nodil.json").string()}).code == 2);
  std::ofstream(dir / "unbal.json")
      << R"({"dimension":1,"matrix":[[2]],"coefficients":[{"q":[0],"c":"3/4"},{"q":[1],"c":"1/4"}]})";
  const auto nu = run({"values", (dir / "unbal.json").string()});
  CHECK(nu.code == 3);
  CHECK(nu.err.find("NoUnitEigenvalue") != std::string::npos);
  CHECK(nu.err.find("unbalanced") != std::string::npos);
}

TEST_CASE("the installed binary reports exit codes") {
  const std::string cmd = std::string(SCALEFN_CLI) + " bound " + oracle::data_path("d4.json") + " > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  const std::string bad = std::string(SCALEFN_CLI) + " nonsense 2> /dev/null";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == 1);
}

}
