#include <pamsvm/cli.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace pamsvm;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() / ("pamsvm_cli_" + std::to_string(::getpid()) + "_" +
                                           ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string write_config(const std::string& text)
    {
        const auto p = dir / "scenario.json";
        std::ofstream(p) << text;
        return p.string();
    }

    int run(std::vector<std::string> args)
    {
        args.insert(args.begin(), "pamsvm");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        out.str("");
        err.str("");
        return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    }

    static std::string slurp(const fs::path& p)
    {
        std::ifstream is(p);
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    fs::path dir;
    std::ostringstream out, err;
};

const char* small_config = R"({
  "equalizers": [
    {"kind": "svm", "ffe_taps": 9, "dfe_taps": 3},
    {"kind": "ffe_dfe", "ffe_taps": 9, "dfe_taps": 3}
  ],
  "experiment": {"kind": "single", "n_symbols": 20000, "train_length": 3000, "seeds": [1, 2]}
})";

const char* benign_config = R"({
  "channel": {"f3db_norm": 1.96, "snr_db": 10},
  "equalizers": [{"kind": "svm", "ffe_taps": 9, "dfe_taps": 3}, {"kind": "slicer"}],
  "experiment": {"kind": "single", "n_symbols": 10000, "train_length": 2000, "seeds": [1]}
})";

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_F(Cli, SweepSnrCoversEveryEqualizerAtEveryPoint)
{
    const auto cfg = write_config(small_config);
    const auto csv = (dir / "snr.csv").string();
    ASSERT_EQ(run({"sweep-snr", "--config", cfg, "--out", csv, "--set", "experiment.grid=[8, 10, 12]"}), 0)
        << err.str();
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : csv_rows(slurp(csv))) {
        ASSERT_EQ(r.size(), 9u);
        EXPECT_EQ(r[0], "snr_db");
        seen.insert({r[1], r[3]});
    }
    for (const char* x : {"8", "10", "12"})
        for (const char* eq : {"svm_9x3", "ffe_dfe_9x3"}) EXPECT_TRUE(seen.count({x, eq})) << x << " " << eq;
    EXPECT_TRUE(fs::exists(csv + ".manifest.json"));
}

TEST_F(Cli, InfiniteSnrOverrideOnBenignChannel)
{
    const auto cfg = write_config(benign_config);
    const auto csv = (dir / "sim.csv").string();
    ASSERT_EQ(run({"simulate", "--config", cfg, "--out", csv, "--set", "channel.snr_db=inf"}), 0) << err.str();
    const auto rows = csv_rows(slurp(csv));
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        EXPECT_EQ(r[1], "inf");
        EXPECT_EQ(r[5], "0") << r[3];
    }
    EXPECT_NE(out.str().find("ber=0.000000e+00"), std::string::npos) << out.str();
    EXPECT_NE(err.str().find("low confidence"), std::string::npos);
}

TEST_F(Cli, ManifestRecordsResolvedRun)
{
    const auto cfg = write_config(small_config);
    const auto csv = (dir / "run.csv").string();
    ASSERT_EQ(run({"simulate", "--config", cfg, "--out", csv, "--seed-offset", "10"}), 0) << err.str();
    const auto man = nlohmann::json::parse(slurp(csv + ".manifest.json"));
    EXPECT_EQ(man["tool"], "pamsvm");
    EXPECT_EQ(man["version"], tool_version);
    EXPECT_EQ(man["command"], "simulate");
    EXPECT_EQ(man["seed_offset"], 10);
    EXPECT_EQ(man["seeds"], nlohmann::json({11, 12}));
    EXPECT_EQ(man["config"]["experiment"]["seeds"], nlohmann::json({11, 12}));
    EXPECT_EQ(man["config"]["channel"]["snr_db"], 14.0);
    ASSERT_EQ(man["stream_hashes"].size(), 2u);
    EXPECT_EQ(man["stream_hashes"][0]["fnv1a64"].get<std::string>().size(), 16u);
    EXPECT_EQ(man["outputs"]["results"], csv);
}

TEST_F(Cli, RerunsAreByteIdentical)
{
    const auto cfg = write_config(small_config);
    const auto a = (dir / "a.csv").string();
    const auto b = (dir / "b.csv").string();
    ASSERT_EQ(run({"sweep-snr", "--config", cfg, "--out", a, "--set", "experiment.grid=[9, 11]"}), 0);
    ASSERT_EQ(run({"sweep-snr", "--config", cfg, "--out", b, "--set", "experiment.grid=[9, 11]", "--jobs", "3"}), 0);
    EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(Cli, TrainThenEvaluateModel)
{
    const auto cfg = write_config(small_config);
    const auto model = (dir / "svm.json").string();
    ASSERT_EQ(run({"train-model", "--config", cfg, "--out", model}), 0) << err.str();
    const auto doc = nlohmann::json::parse(slurp(model));
    EXPECT_EQ(doc["kind"], "svm");
    EXPECT_EQ(doc["planes"].size(), 3u);
    EXPECT_EQ(doc["training_meta"]["train_length"], 3000);
    EXPECT_TRUE(fs::exists(model + ".manifest.json"));

    const auto csv = (dir / "eval.csv").string();
    ASSERT_EQ(run({"eval-model", "--config", cfg, "--model", model, "--out", csv}), 0) << err.str();
    const auto rows = csv_rows(slurp(csv));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0][3], "svm_9x3");
    const double ber = std::stod(rows[0][6]);
    EXPECT_GT(ber, 0.0);
    EXPECT_LT(ber, 1e-2);

    const auto lms_model = (dir / "lms.json").string();
    ASSERT_EQ(run({"train-model", "--config", cfg, "--out", lms_model, "--equalizer", "ffe_dfe_9x3"}), 0);
    EXPECT_EQ(nlohmann::json::parse(slurp(lms_model))["kind"], "ffe_dfe");
    ASSERT_EQ(run({"eval-model", "--config", cfg, "--model", lms_model, "--out", csv}), 0) << err.str();
}

TEST_F(Cli, SweepTrainUsesLengthGrid)
{
    const auto cfg = write_config(small_config);
    const auto csv = (dir / "train.csv").string();
    ASSERT_EQ(run({"sweep-train", "--config", cfg, "--out", csv, "--set", "experiment.grid=[500, 2000]"}), 0)
        << err.str();
    const auto rows = csv_rows(slurp(csv));
    ASSERT_EQ(rows.size(), 2u * 2u * 2u);
    EXPECT_EQ(rows.front()[0], "train_length");
    EXPECT_EQ(rows.front()[1], "500");
    EXPECT_EQ(rows.back()[1], "2000");
}

TEST_F(Cli, JsonOutputFormat)
{
    const auto cfg = write_config(benign_config);
    const auto path = (dir / "r.json").string();
    ASSERT_EQ(run({"simulate", "--config", cfg, "--out", path, "--set", "output.format=json"}), 0) << err.str();
    const auto rows = nlohmann::json::parse(slurp(path));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0]["x_kind"], "snr_db");
}

TEST_F(Cli, ConfigErrorsExitWithTwo)
{
    EXPECT_EQ(run({"simulate", "--config", (dir / "missing.json").string()}), 2);
    EXPECT_NE(err.str().find((dir / "missing.json").string()), std::string::npos);

    const auto cfg = write_config(R"({"equalizers": [{"kind": "svm", "ffe_taps": 8}]})");
    EXPECT_EQ(run({"simulate", "--config", cfg}), 2);
    EXPECT_NE(err.str().find("ffe_taps must be odd"), std::string::npos) << err.str();

    EXPECT_EQ(run({"simulate"}), 2);
    EXPECT_EQ(run({"frobnicate", "--config", cfg}), 2);
    EXPECT_EQ(run({"eval-model", "--config", write_config(small_config), "--model", (dir / "none.json").string()}),
              2);
}

TEST_F(Cli, BinaryReportsMissingConfig)
{
    const auto missing = (dir / "no_such.json").string();
    const auto log = (dir / "stderr.txt").string();
    const std::string cmd = std::string("'") + PAMSVM_CLI_BINARY + "' simulate --config '" + missing + "' 2> '" + log + "'";
    const int status = std::system(cmd.c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 2);
    EXPECT_NE(slurp(log).find(missing), std::string::npos);

    const int v = std::system((std::string("'") + PAMSVM_CLI_BINARY + "' --version > /dev/null").c_str());
    EXPECT_EQ(WEXITSTATUS(v), 0);
}
