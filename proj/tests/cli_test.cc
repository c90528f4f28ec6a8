/*
 * Copyright 2026 The kip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const std::string kFixtures = KIP_FIXTURES;
const std::string kDayFlags = " --start 1490400000 --intervals 24 -q";

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kip_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the binary with stdout captured to `out`; returns the exit code.
  int run(const std::string& args, const std::string& out = "stdout") {
    const std::string cmd = std::string(KIP_BINARY) + " " + args + " > " +
                            (dir_ / out).string() + " 2> " + (dir_ / "stderr").string();
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string file(const std::string& name) { return slurp(dir_ / name); }
  std::string path(const std::string& name) { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, MatrixMatchesGoldens) {
  ASSERT_EQ(run("matrix -i " + kFixtures + "/single64.log" + kDayFlags), 0);
  EXPECT_EQ(file("stdout"), slurp(kFixtures + "/single64_inferred.txt"));
  ASSERT_EQ(run("matrix --view raw -i " + kFixtures + "/single64.log" + kDayFlags), 0);
  EXPECT_EQ(file("stdout"), slurp(kFixtures + "/single64_raw.txt"));
  EXPECT_EQ(run("matrix -i " + kFixtures + "/single64.log --start 1490410800 --intervals 1"), 2);
}

TEST_F(Cli, SummarizeReportsLineCounters) {
  ASSERT_EQ(run("summarize -i " + kFixtures + "/single64.log --start 1490400000 --intervals 24"), 0);
  EXPECT_NE(file("stdout").find("address_bound_max\t3\n"), std::string::npos);
  EXPECT_EQ(file("stderr"), "kip: lines 25, parsed 25, malformed 0, out-of-window 0\n");
}

TEST_F(Cli, PipelineMeeting) {
  ASSERT_EQ(run("pipeline -i " + kFixtures + "/meeting.log" + kDayFlags +
                " --aggregates-out " + path("set") + " --anon-out " + path("anon")),
            0);
  const std::string set = file("set");
  EXPECT_NE(set.find("\n2001:db8:370::/55\t2\t2\t2\n"), std::string::npos);
  EXPECT_EQ(std::count(set.begin(), set.end(), '\n'), 11);
  const std::string anon = file("anon");
  EXPECT_EQ(std::count(anon.begin(), anon.end(), '\n'), 8);
  EXPECT_EQ(anon.find("2001:db8:370:228"), std::string::npos);

  ASSERT_EQ(run("pipeline -i " + kFixtures + "/meeting.log" + kDayFlags + " --k 4 " +
                "--aggregates-out " + path("set4")),
            0);
  const std::string set4 = file("set4");
  EXPECT_EQ(set4.find("/"), std::string::npos) << set4;

  EXPECT_EQ(run("pipeline -i " + kFixtures + "/meeting.log" + kDayFlags + " --k 1"), 2);
  EXPECT_NE(file("stderr").find("k must be at least 2"), std::string::npos);
  EXPECT_EQ(run("pipeline -i " + kFixtures + "/meeting.log --start 1490400000 --intervals 1"),
            2);
  EXPECT_EQ(run("pipeline -i " + kFixtures + "/meeting.log" + kDayFlags + " --stat mode"), 2);
}

TEST_F(Cli, AggregateAnonEval) {
  ASSERT_EQ(run("aggregate -i " + kFixtures + "/meeting.log --auto-grid -q", "set"), 0);
  ASSERT_EQ(run("anon -q -a " + path("set") + " -i " + kFixtures + "/meeting.log --append-length"),
            0);
  EXPECT_NE(file("stdout").find("\t2001:db8:370::/55\n"), std::string::npos);
  ASSERT_EQ(run("eval -a " + path("set")), 0);
  EXPECT_EQ(file("stdout"), "55\t1\t1.000000\n");
  ASSERT_EQ(run("eval -q --weighting covered64 -a " + path("set") + " --log " + kFixtures +
                "/meeting.log"),
            0);
  EXPECT_EQ(file("stdout"), "55\t2\t1.000000\n");
  EXPECT_EQ(run("eval --weighting covered64 -a " + path("set")), 2);
}

TEST_F(Cli, ClassifyDump) {
  ASSERT_EQ(run("classify -i " + kFixtures + "/single64.log" + kDayFlags), 0);
  const std::string out = file("stdout");
  EXPECT_EQ(out.substr(0, out.find('\n')), "2001:db8::117a:e091:b2bd:ca65\trandomized\t67\t0");
}

TEST_F(Cli, SynthEmitsLogTruthAndManifest) {
  const std::string args = "synth --preset jp --hosts 20 --seed 9 --intervals 24 --log-out " +
                           path("log") + " --truth-out " + path("truth") + " --manifest-out " +
                           path("manifest");
  ASSERT_EQ(run(args), 0);
  const std::string log = file("log");
  ASSERT_EQ(run(args), 0);
  EXPECT_EQ(file("log"), log);
  EXPECT_FALSE(log.empty());
  EXPECT_NE(file("truth").find("# interval\n0\t"), std::string::npos);
  EXPECT_NE(file("truth").find("# fencepost\n0\t"), std::string::npos);
  EXPECT_NE(file("manifest").find("seed: 9\n"), std::string::npos);
  EXPECT_NE(file("manifest").find("preset: jp\n"), std::string::npos);
  // The emitted log is valid pipeline input.
  ASSERT_EQ(run("summarize -i " + path("log") + " --start 2017-03-20T00:00:00Z --intervals 24"),
            0);
  EXPECT_NE(file("stderr").find("malformed 0"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 106);  // CLI11: a subcommand is required
  EXPECT_EQ(run("summarize -i " + kFixtures + "/single64.log"), 2);  // no --start
  EXPECT_EQ(run("summarize -i /nonexistent --start 0"), 1);
}

}  // namespace
