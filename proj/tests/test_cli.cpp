// Copyright 2026 The klab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "klab/cli.hpp"
#include "json.hpp"

namespace klab {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "klab");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(CliTest, HelpExitsCleanly) {
  const Result r = invoke({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("sumprod-scan"), std::string::npos);
}

TEST(CliTest, UnknownFlagIsUsageError) {
  const Result r = invoke({"kl-table", "--q", "7", "--bogus"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("UsageError"), std::string::npos);
  EXPECT_EQ(invoke({}).code, kExitError);
  EXPECT_EQ(invoke({"kl-table", "--format", "xml"}).code, kExitError);
}

TEST(CliTest, SampledRunsNeedSeed) {
  const Result r = invoke({"sumprod-scan", "--q", "11"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("--seed"), std::string::npos);
}

TEST(CliTest, SkSquareCase) {
  const Result r = invoke({"sk", "--k", "2", "--q", "7"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["command"], "sk");
  EXPECT_EQ(j["summary"]["entries"], nlohmann::json::parse("[[2,1],[4,4]]"));
  EXPECT_EQ(j["summary"]["stabilizer"], nlohmann::json::parse("[1]"));
  EXPECT_TRUE(j.contains("version"));
  EXPECT_EQ(j["config"]["q"], 7);
}

TEST(CliTest, ScanIsDeterministic) {
  const std::vector<std::string> args = {"sumprod-scan", "--q", "23", "--k", "2", "--seed", "9",
                                         "--samples", "20", "--scan-samples", "30", "--format", "csv"};
  const Result a = invoke(args);
  const Result b = invoke(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("q,k,c,b1,b2,b3,b4"), std::string::npos);
  const Result other = invoke({"sumprod-scan", "--q", "23", "--k", "2", "--seed", "10", "--samples", "20",
                               "--scan-samples", "30", "--format", "csv"});
  EXPECT_NE(a.out, other.out);
}

TEST(CliTest, WorkerCountDoesNotChangeOutput) {
  const std::vector<std::string> args = {"sumprod-scan", "--q", "19", "--seed", "3", "--samples", "10",
                                         "--exhaustive-max", "19"};
  std::vector<std::string> threaded = args;
  threaded.insert(threaded.end(), {"--workers", "4"});
  EXPECT_EQ(invoke(args).out, invoke(threaded).out);
}

TEST(CliTest, HeaderOnlyCsv) {
  const Result r = invoke({"exponent-lp", "--delta", "0.03", "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  std::string line, last;
  int data = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++data;
    last = line;
  }
  EXPECT_EQ(data, 1);
  EXPECT_EQ(last, "slack,delta_star,eta_star");
}

TEST(CliTest, HypothesisViolationExitCode) {
  // MN far above q^(5/4) at q = 101.
  const Result r = invoke({"opnorm", "--q", "101", "--M", "60", "--N", "90"});
  EXPECT_EQ(r.code, kExitHypothesis);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["summary"]["hypothesis_failure"].is_string());
  const Result shift = invoke({"shift-check", "--q", "101", "--B", "60", "--seed", "1", "--samples", "1"});
  EXPECT_EQ(shift.code, kExitHypothesis);
}

TEST(CliTest, CompositeModulusIsError) {
  const Result r = invoke({"kl-table", "--q", "15"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("CompositeModulus"), std::string::npos);
}

TEST(CliTest, ConfigFileSuppliesDefaults) {
  const std::string path = ::testing::TempDir() + "klab_test.ini";
  {
    std::ofstream ini(path);
    ini << "[sk]\nk=3\nq=7\n";
  }
  const Result r = invoke({"--config", path, "sk"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["config"]["k"], 3);
  const Result overridden = invoke({"--config", path, "sk", "--k", "2"});
  EXPECT_EQ(nlohmann::json::parse(overridden.out)["config"]["k"], 2);
}

}  // namespace
}  // namespace klab
