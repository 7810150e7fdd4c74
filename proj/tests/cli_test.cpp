// Copyright 2026 The driftforest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "driftforest/cli.hpp"
#include "driftforest/text.hpp"

using namespace driftforest;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() /
                ("driftforest_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root_);
        fs::create_directories(root_);
        unsetenv("DRIFTFOREST_SEED");
    }
    void TearDown() override {
        fs::remove_all(root_);
        unsetenv("DRIFTFOREST_SEED");
    }

    std::string path(const std::string& name) const { return (root_ / name).string(); }

    std::string synth(const std::string& name, const std::string& instances = "1200",
                      const std::string& shifts = "600") {
        const auto r = run({"synth", "--out", path(name), "--instances", instances, "--shifts", shifts,
                            "--years-every", "400", "--seed", "1"});
        EXPECT_EQ(r.code, 0) << r.err;
        return path(name) + "/flattened.csv";
    }

    fs::path root_;
};

std::string read(const fs::path& p) { return text::read_file(p); }

}  // namespace

TEST_F(CliTest, UnknownSubcommandIsUsageError) {
    const auto r = run({"frobnicate"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.err.rfind("ERROR:Usage:", 0), 0u) << r.err;
}

TEST_F(CliTest, NoSubcommandIsUsageError) { EXPECT_EQ(run({}).code, 2); }

TEST_F(CliTest, HelpSucceeds) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("run-online"), std::string::npos);
}

TEST_F(CliTest, MalformedNumberIsUsageError) {
    const auto input = synth("s");
    const auto r = run({"run-batch", "--input", input, "--out", path("o"), "--trees", "ten"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.err.rfind("ERROR:Usage:", 0), 0u);
    EXPECT_FALSE(fs::exists(path("o") + "/manifest.txt"));
}

TEST_F(CliTest, MissingInputFileIsRuntimeError) {
    const auto r = run({"run-online", "--input", path("nope.csv"), "--out", path("o")});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("ERROR:", 0), 0u);
    EXPECT_EQ(r.err.find("ERROR:Usage"), std::string::npos);
}

TEST_F(CliTest, BadRatioIsRuntimeErrorWithCode) {
    const auto input = synth("s");
    const auto r = run({"run-batch", "--input", input, "--out", path("o"), "--ratio", "1.5"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("ERROR:BadRatio:", 0), 0u) << r.err;
}

TEST_F(CliTest, RunBatchWritesFourMetricsPerModel) {
    const auto input = synth("s");
    const auto r = run({"run-batch", "--input", input, "--out", path("o"), "--ratio", "0.6", "--seed", "7"});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string summary = read(path("o") + "/summary.csv");
    for (const char* model : {"batch", "online"}) {
        for (const char* metric : {"accuracy", "precision", "recall", "f_measure"}) {
            EXPECT_NE(summary.find(std::string(model) + "," + metric + ","), std::string::npos)
                << model << " " << metric;
        }
    }
    const std::string manifest = read(path("o") + "/manifest.txt");
    EXPECT_EQ(manifest.rfind("command=run-batch\n", 0), 0u);
    EXPECT_NE(manifest.find("seed=7\n"), std::string::npos);
    EXPECT_NE(manifest.find("ratio=0.6\n"), std::string::npos);
}

TEST_F(CliTest, ScarcityWritesOneReportPerFractionAndCurve) {
    const auto input = synth("s");
    const auto r = run({"scarcity", "--input", input, "--out", path("o"), "--fractions",
                        "0,0.25,0.5,0.75,1.0"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"0", "0.25", "0.5", "0.75", "1"}) {
        EXPECT_TRUE(fs::exists(path("o") + "/fraction_" + f + "/summary.csv")) << f;
    }
    const std::string contents = read(path("o") + "/scarcity.csv");
    const auto curve = text::lines(contents);
    std::size_t rows = 0;
    for (auto line : curve) rows += !text::trim(line).empty();
    EXPECT_EQ(rows, 6u);
}

TEST_F(CliTest, SynthThenRunOnlineWritesWindowSeries) {
    const auto s = run({"synth", "--out", path("s"), "--instances", "5000", "--shifts", "2500",
                        "--year-boundaries", "1000"});
    ASSERT_EQ(s.code, 0) << s.err;
    const auto r = run({"run-online", "--input", path("s") + "/flattened.csv", "--out", path("o")});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string windows = read(path("o") + "/online/windows.csv");
    const auto lines = text::lines(windows);
    ASSERT_GE(lines.size(), 17u);
    EXPECT_EQ(lines[0], "window_idx,size,accuracy");
    EXPECT_EQ(text::split_fields(lines[1], ',')[1], "250");
    EXPECT_TRUE(fs::exists(path("o") + "/batch/windows.csv"));
}

TEST_F(CliTest, RefusesToOverwriteWithoutForce) {
    const auto input = synth("s");
    ASSERT_EQ(run({"run-batch", "--input", input, "--out", path("o")}).code, 0);
    const auto again = run({"run-batch", "--input", input, "--out", path("o")});
    EXPECT_EQ(again.code, 1);
    EXPECT_EQ(again.err.rfind("ERROR:OutputExists:", 0), 0u) << again.err;
    EXPECT_EQ(run({"run-batch", "--input", input, "--out", path("o"), "--force"}).code, 0);
}

TEST_F(CliTest, ReplayReproducesOutputs) {
    const auto input = synth("s");
    ASSERT_EQ(run({"run-online", "--input", input, "--out", path("a"), "--seed", "11", "--trees", "4"}).code, 0);
    const auto r = run({"replay", path("a") + "/manifest.txt", "--out", path("b")});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"summary.csv", "plan.txt", "online/instances.csv", "batch/windows.csv"}) {
        EXPECT_EQ(read(path("a") + "/" + f), read(path("b") + "/" + f)) << f;
    }
    const std::string b_manifest = read(path("b") + "/manifest.txt");
    EXPECT_NE(b_manifest.find("trees=4\n"), std::string::npos);
    EXPECT_NE(b_manifest.find("seed=11\n"), std::string::npos);
}

TEST_F(CliTest, ConfigFileIsOverriddenByFlags) {
    const auto input = synth("s");
    text::write_file(path("run.cfg"), "# comment\ntrees = 3\nseed=5\nwindow=100\n");
    ASSERT_EQ(run({"run-online", "--input", input, "--out", path("o"), "--config", path("run.cfg"),
                   "--seed", "9"}).code, 0);
    const std::string manifest = read(path("o") + "/manifest.txt");
    EXPECT_NE(manifest.find("trees=3\n"), std::string::npos);
    EXPECT_NE(manifest.find("seed=9\n"), std::string::npos);
    EXPECT_NE(manifest.find("window=100\n"), std::string::npos);
}

TEST_F(CliTest, ConfigWithUnknownKeyIsUsageError) {
    const auto input = synth("s");
    text::write_file(path("bad.cfg"), "colour=blue\n");
    EXPECT_EQ(run({"run-online", "--input", input, "--out", path("o"), "--config", path("bad.cfg")}).code, 2);
    text::write_file(path("other.cfg"), "command=scarcity\n");
    EXPECT_EQ(run({"run-online", "--input", input, "--out", path("p"), "--config", path("other.cfg")}).code, 2);
}

TEST_F(CliTest, SeedFallsBackToEnvironmentThenZero) {
    const auto input = synth("s");
    ASSERT_EQ(run({"run-batch", "--input", input, "--out", path("zero")}).code, 0);
    EXPECT_NE(read(path("zero") + "/manifest.txt").find("seed=0\n"), std::string::npos);
    setenv("DRIFTFOREST_SEED", "42", 1);
    ASSERT_EQ(run({"run-batch", "--input", input, "--out", path("env")}).code, 0);
    EXPECT_NE(read(path("env") + "/manifest.txt").find("seed=42\n"), std::string::npos);
    ASSERT_EQ(run({"run-batch", "--input", input, "--out", path("flag"), "--seed", "43"}).code, 0);
    EXPECT_NE(read(path("flag") + "/manifest.txt").find("seed=43\n"), std::string::npos);
    setenv("DRIFTFOREST_SEED", "x", 1);
    EXPECT_EQ(run({"run-batch", "--input", input, "--out", path("bad")}).code, 2);
}

TEST_F(CliTest, ReportComparesRunsAndRejectsMismatch) {
    const auto input = synth("s");
    ASSERT_EQ(run({"run-online", "--input", input, "--out", path("o")}).code, 0);
    const auto r = run({"report", path("o") + "/online", path("o") + "/batch", "--out", path("cmp")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("metric,first,second,delta\n", 0), 0u);
    EXPECT_NE(r.out.find("verdict,"), std::string::npos);
    EXPECT_EQ(read(path("cmp") + "/comparison.csv"), r.out);

    ASSERT_EQ(run({"run-batch", "--input", input, "--out", path("b")}).code, 0);
    const auto bad = run({"report", path("o") + "/online", path("b") + "/online"});
    EXPECT_EQ(bad.code, 1);
    EXPECT_EQ(bad.err.rfind("ERROR:SequenceMismatch:", 0), 0u) << bad.err;
}

TEST_F(CliTest, PreprocessMatchesGoldenFixture) {
    const std::string data = DRIFTFOREST_TEST_DATA;
    const auto r = run({"preprocess", "--input", data + "/raw_fixture.csv", "--out", path("p"), "--m-max", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read(path("p") + "/flattened.csv"), read(data + "/golden_flattened.csv"));
    EXPECT_EQ(read(path("p") + "/runs.csv"), read(data + "/golden_runs.csv"));
}
