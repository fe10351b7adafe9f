#include <cstdio>
#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = chaoskit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("chaoskit_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  std::string s;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) s.append(buf, got);
  std::fclose(f);
  return s;
}

}  // namespace

TEST_CASE("cli examples") {
  auto r = call({"partitions", "star", "--k", "2"});
  CHECK(r.code == 0);
  CHECK(r.out == "60\n");
  CHECK(call({"partitions", "star", "--k", "2", "--noncrossing"}).out == "3\n");
  CHECK(call({"partitions", "count", "--class", "nc-partitions", "--k", "5"}).out == "42\n");
  CHECK(call({"partitions", "count", "--class", "pairings", "--k", "8"}).out == "105\n");
  auto t = call({"examples", "tetilla", "--m", "4"});
  CHECK(t.out == "5/2\nkappa4 = 1/2\n");
  auto q = call({"examples", "qgauss", "--m", "4", "--q", "1/2"});
  CHECK(q.out == "5/2\nkappa4 = 1/2\npolynomial = 2 + q\n");
  CHECK(call({"examples", "hermite", "--k", "2", "--m", "4"}).out == "60\nexpansion = 60\n");
  CHECK(call({"examples", "chebyshev", "--k", "2", "--m", "4"}).out == "3\nexpansion = 3\n");
}

TEST_CASE("cli criterion scan csv") {
  std::string csv = temp_path("crit.csv");
  auto r = call({"scan", "criterion", "--family", "disjoint_pairs", "--dist", "gaussian", "--side", "classical",
                 "--n-grid", "4,8", "--csv", csv});
  REQUIRE(r.code == 0);
  CHECK(slurp(csv) == "n,tau,\"m4\",\"gap\"\n4,1/8,6,3\n8,1/16,9/2,3/2\n");
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["rows"][1]["values"]["m4"] == "9/2");
  CHECK(j["meta"]["timestamp"].is_null());
  std::remove(csv.c_str());
}

TEST_CASE("cli kernel round trip") {
  std::string path = temp_path("k.json");
  auto gen = call({"kernel", "gen", "--family", "disjoint_pairs", "--n", "8", "-o", path});
  REQUIRE(gen.code == 0);
  auto stats = call({"kernel", "stats", path});
  REQUIRE(stats.code == 0);
  auto a = nlohmann::json::parse(gen.out);
  auto b = nlohmann::json::parse(stats.out);
  CHECK(a["tau"] == "1/16");
  CHECK(a["tau"] == b["tau"]);
  auto m = call({"moment", "classical", "--kernel", path, "--dist", "gaussian", "--order", "4"});
  CHECK(nlohmann::json::parse(m.out)["value"] == "9/2");
  auto f = call({"moment", "free", "--kernel", path, "--dist", "semicircular", "--order", "4"});
  auto fj = nlohmann::json::parse(f.out);
  CHECK(fj["engine"] == "nc_pairing");
  CHECK(fj["value"] == "17/32");  // (2 + 1/8) / 4
  auto g = call({"moment", "free", "--kernel", path, "--dist", "semicircular", "--order", "4", "--engine", "general"});
  CHECK(nlohmann::json::parse(g.out)["value"] == "17/32");

  std::string dense = temp_path("dense.json");
  REQUIRE(call({"kernel", "gen", "--family", "random_dense", "--n", "6", "--seed", "4", "-o", dense}).code == 0);
  auto mc = call({"moment", "classical", "--kernel", dense, "--dist", "gaussian", "--order", "4", "--engine", "mc",
                  "--samples", "5000", "--seed", "9"});
  CHECK(mc.code == 0);
  CHECK(nlohmann::json::parse(mc.out)["engine"] == "montecarlo");
  auto no_seed = call({"moment", "classical", "--kernel", dense, "--dist", "gaussian", "--order", "4", "--engine", "mc"});
  CHECK(no_seed.code == 2);
  std::remove(path.c_str());
  std::remove(dense.c_str());
}

TEST_CASE("cli exit codes") {
  auto outside = call({"scan", "criterion", "--family", "disjoint_pairs", "--dist", "uniform", "--n-grid", "4"});
  CHECK(outside.code == 2);
  CHECK(nlohmann::json::parse(outside.err)["error"] == "OutsideTheoremClass");
  auto large = call({"examples", "tetilla", "--m", "9"});
  CHECK(large.code == 2);
  CHECK(nlohmann::json::parse(large.err)["error"] == "TooLarge");
  auto io = call({"kernel", "stats", "/nonexistent/k.json"});
  CHECK(io.code == 1);
  CHECK(nlohmann::json::parse(io.err)["error"] == "IoError");
  auto usage = call({"partitions", "star", "--k", "2", "--bogus"});
  CHECK(usage.code == 2);
  CHECK(nlohmann::json::parse(usage.err)["error"] == "UsageError");
  CHECK(call({}).code == 2);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("cli reports are byte-identical across runs and workers") {
  std::vector<std::vector<std::string>> commands = {
      {"scan", "transfer", "--family", "disjoint_pairs", "--dist", "laplace", "--free-dist", "freepoisson:1", "--n-grid",
       "4,8,16"},
      {"scan", "joint", "--vectors", "overlap_half", "--n-grid", "6,12", "--side", "free"},
      {"scan", "invariance", "--family", "random_dense", "--seed", "5", "--dist", "laplace", "--n-grid", "4,5"},
  };
  for (const auto& cmd : commands) {
    auto one = cmd;
    one.insert(one.begin(), {"--workers", "1"});
    auto four = cmd;
    four.insert(four.begin(), {"--workers", "4"});
    auto a = call(one);
    auto b = call(one);
    auto c = call(four);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
  }
}

TEST_CASE("cli dist tables") {
  auto k = nlohmann::json::parse(call({"dist", "kurtosis", "laplace"}).out);
  CHECK(k["chi4"] == "3");
  auto t = nlohmann::json::parse(call({"dist", "kurtosis", "tetilla"}).out);
  CHECK(t["kappa4"] == "1/2");
  auto u = nlohmann::json::parse(call({"dist", "show", "uniform"}).out);
  CHECK(u["outside_theorem_class"] == true);
  CHECK(u["moments"][4] == "9/5");
  std::string custom = temp_path("law.json");
  {
    std::FILE* f = std::fopen(custom.c_str(), "wb");
    std::fputs(R"({"name": "custom", "moments": ["1", "0", "1", "0", "3"]})", f);
    std::fclose(f);
  }
  CHECK(nlohmann::json::parse(call({"dist", "kurtosis", custom}).out)["chi4"] == "0");
  CHECK(nlohmann::json::parse(call({"dist", "kurtosis", "--free", custom}).out)["kappa4"] == "1");
  std::remove(custom.c_str());
}
