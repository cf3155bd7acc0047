#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcl/cli.hpp"

namespace {

struct Invocation {
  int code;
  std::string out, err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "qcl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = qcl::cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(QCL_TEST_DATA) + "/" + name; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, NoArgumentsPrintsUsage) {
  const Invocation r = run({});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("reduce"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"count", "--size", "3", "--bogus"}).code, 1);
  EXPECT_EQ(run({"count"}).code, 1);
  EXPECT_EQ(run({"census", "--size", "2", "--fuel", "0"}).code, 1);
  EXPECT_EQ(run({"series", "--fn", "X", "--n", "3"}).code, 1);
  EXPECT_EQ(run({"series", "--fn", "grammar", "--n", "3"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, RuntimeErrors) {
  EXPECT_EQ(run({"density", "--constants", "/nonexistent/constants.json"}).code, 2);
  EXPECT_EQ(run({"count", "--size", "3", "--basis", "/nonexistent/basis.json"}).code, 2);
  const Invocation bad = run({"reduce", "--term", "S (K"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("error"), std::string::npos);
}

TEST(Cli, Count) {
  const Invocation r = run({"count", "--size", "10"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "34398208\n");
  EXPECT_EQ(run({"count", "--size", "2", "--basis", data("bckw_basis.json")}).out, "128\n");
}

TEST(Cli, Reduce) {
  Invocation r = run({"reduce", "--term", "S K K S"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "normal form: S\nsteps: 2\n");
  r = run({"reduce", "--term", "S K K S", "--trace"});
  EXPECT_EQ(r.out, "0\tS K K S\n1\tK S (K S)\n2\tS\nnormal form after 2 steps\n");
  r = run({"reduce", "--term", "S (S K K) (S K K) (S (S K K) (S K K))", "--fuel", "3", "--trace"});
  EXPECT_NE(r.out.find("fuel exhausted after 3 steps"), std::string::npos);
  r = run({"reduce", "--term", "S (S K K) (S K K) (S (S K K) (S K K))", "--fuel", "10"});
  EXPECT_EQ(r.out.rfind("fuel exhausted after 10 steps\nlast: ", 0), 0u);
}

TEST(Cli, Census) {
  Invocation r = run({"census", "--size", "2", "--fuel", "100"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "reduction_length,count\n0,12\n1,4\n");
  r = run({"census", "--size", "3", "--out", "json", "--pattern", "K K", "--typecheck"});
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["total"], 80);
  EXPECT_TRUE(j.contains("containing_pattern"));
  EXPECT_TRUE(j.contains("typeable"));
}

TEST(Cli, Sample) {
  const Invocation a = run({"sample", "--size", "5", "--count", "3", "--seed", "42", "--print"});
  EXPECT_EQ(a.out, "S (S K S S) K\nS (K K) (S (S S))\nS (S K) (S S S)\n");
  const Invocation b = run({"sample", "--size", "2", "--count", "50"});
  EXPECT_EQ(b.code, 0);
  EXPECT_NE(b.out.find("shape,count"), std::string::npos);
}

TEST(Cli, ExperimentIsReproducible) {
  const std::vector<std::string> args{"experiment", "--samples", "200", "--size", "50", "--fuel", "100", "--seed", "7"};
  const Invocation a = run(args);
  const Invocation b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("reduction_length,count\n", 0), 0u);
  EXPECT_EQ(qcl::import_histogram_csv(a.out).size() > 0, true);
}

TEST(Cli, ExperimentWritesFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "qcl_cli_test";
  std::filesystem::create_directories(dir);
  const auto csv = dir / "hist.csv";
  const auto json = dir / "result.json";
  const Invocation r = run({"experiment", "--samples", "40", "--size", "20", "--fuel", "100", "--seed", "3", "--workers",
                           "2", "--out", csv.string(), "--json", json.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("normalized: "), std::string::npos);
  const Invocation stdout_run = run({"experiment", "--samples", "40", "--size", "20", "--fuel", "100", "--seed", "3"});
  EXPECT_EQ(read_file(csv), stdout_run.out);
  const auto j = nlohmann::json::parse(read_file(json));
  EXPECT_EQ(j["config"]["samples"], 40);
  std::filesystem::remove_all(dir);
}

TEST(Cli, Series) {
  Invocation r = run({"series", "--fn", "invsqrt", "--n", "4"});
  EXPECT_EQ(r.out, "n,coefficient\n0,1\n1,2\n2,8\n3,32\n4,136\n");
  r = run({"series", "--fn", "C", "--n", "2"});
  EXPECT_EQ(r.out, "n,coefficient\n0,2\n1,4\n2,16\n");
  r = run({"series", "--fn", "subterm", "--n", "2", "--p", "1"});
  EXPECT_EQ(r.out, "n,coefficient\n0,0\n1,1\n2,4\n");
  r = run({"series", "--fn", "grammar", "--n", "4", "--grammar", data("r1_k_only_grammar.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\n3,32\n4,200\n"), std::string::npos);
}

TEST(Cli, Density) {
  Invocation r = run({"density", "--constants", data("published_densities.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("sum,0.3401040259872616"), std::string::npos) << r.out;
  r = run({"density", "--constants", data("r1_constant.json")});
  EXPECT_EQ(r.out.rfind("m,density\n1,0.0896123329", 0), 0u) << r.out;
}
