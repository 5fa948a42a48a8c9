#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <desvr/desvr.hpp>

#include "cli.hpp"

using namespace desvr;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "desvr");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t data_lines(const fs::path& p)
{
    const auto text = slurp(p);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p)
{
    std::istringstream in(slurp(p));
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        for (auto c : text::split(line))
            cells.emplace_back(c);
        rows.push_back(cells);
    }
    return rows;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / (std::string("desvr_cli_") + info->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
        prices = dir / "prices.csv";
        std::ofstream out(prices);
        write_price_csv(out, synthetic::random_walk_series(701, 5));
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string out(const std::string& name) const { return (dir / name).string(); }

    fs::path dir;
    fs::path prices;
};

} // namespace

TEST_F(Cli, IngestWritesSupervisedSet)
{
    const auto r = run({"ingest", "--data", prices.string(), "--out", out("a")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(data_lines(dir / "a" / "supervised.csv"), 700u);
    EXPECT_EQ(data_lines(dir / "a" / "train.csv"), 500u);
    EXPECT_EQ(data_lines(dir / "a" / "test.csv"), 200u);
    EXPECT_FALSE(fs::exists(dir / "a" / "normalizer.json"));
    EXPECT_NE(r.out.find("700"), std::string::npos);
}

TEST_F(Cli, IngestNormalizerInvertsToPrices)
{
    const auto r = run({"ingest", "--data", prices.string(), "--normalize", "--out", out("a")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto map = nlohmann::json::parse(slurp(dir / "a" / "normalizer.json")).get<NormalizationMap>();
    const auto set = build_supervised(synthetic::random_walk_series(701, 5));
    EXPECT_EQ(map, fit_normalizer(set, -1, 1, {0, 500}));
    const double y = set.targets[42];
    EXPECT_NEAR(invert_normalizer(map, "next_close", map.apply(map.target, y)), y, 1e-9 * y);
}

TEST_F(Cli, MalformedCsvNamesRow)
{
    const auto bad = dir / "bad.csv";
    std::ofstream(bad) << "Date,Open,High,Low,Close,Adj Close,Volume\n2010-01-04,1,2,0.5,1.5,1.5,10\n"
                          "2010-01-05,1,2,0.5,oops,1.5,10\n";
    const auto r = run({"ingest", "--data", bad.string(), "--out", out("a")});
    EXPECT_EQ(r.code, cli::ExitCode::data);
    EXPECT_NE(r.err.find("row 3"), std::string::npos) << r.err;
}

TEST_F(Cli, UsageErrors)
{
    EXPECT_EQ(run({}).code, cli::ExitCode::usage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::ExitCode::usage);
    EXPECT_EQ(run({"ingest", "--data", out("missing.csv")}).code, cli::ExitCode::usage);
    EXPECT_EQ(run({"train", "--data", prices.string(), "--c", "0", "--out", out("a")}).code, cli::ExitCode::usage);
    EXPECT_EQ(run({"tune", "--data", prices.string(), "--method", "ga", "--preset", "apple-raw"}).code,
              cli::ExitCode::usage);
    EXPECT_EQ(run({"tune", "--data", prices.string(), "--method", "de"}).code, cli::ExitCode::usage);
    EXPECT_EQ(run({"tune", "--data", prices.string(), "--method", "de", "--preset", "apple-raw", "--c-range", "1:2"})
                  .code,
              cli::ExitCode::usage);
    EXPECT_EQ(run({"sweep", "--data", prices.string(), "--vary", "epsilon", "--grid", "0.3:0.1:5"}).code,
              cli::ExitCode::usage);
    EXPECT_EQ(run({"train", "--data", prices.string(), "--test-n", "0", "--out", out("a")}).code,
              cli::ExitCode::usage);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, SplitTooLargeIsDataError)
{
    const auto r = run({"train", "--data", prices.string(), "--train-n", "600", "--test-n", "200", "--out", out("a")});
    EXPECT_EQ(r.code, cli::ExitCode::data);
}

TEST_F(Cli, UnwritableOutputIsIoError)
{
    const auto blocker = dir / "file";
    std::ofstream(blocker) << "x";
    const auto r = run({"ingest", "--data", prices.string(), "--out", (blocker / "sub").string()});
    EXPECT_EQ(r.code, cli::ExitCode::io);
}

TEST_F(Cli, SweepEpsilonFiftyRows)
{
    const auto r = run({"sweep", "--data", prices.string(), "--normalize", "--vary", "epsilon", "--grid",
                        "0.01:0.30:50", "--sv-fraction", "0:1", "--out", out("s")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(dir / "s" / "sweep.csv");
    ASSERT_EQ(rows.size(), 51u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"value", "train_mse", "test_mse", "n_sv"}));
    EXPECT_EQ(rows[1][0], "0.01");
    EXPECT_EQ(rows[50][0], "0.29999999999999999");
    EXPECT_NE(r.out.find("gamma=0.0625"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("0.01:0.3"), std::string::npos) << r.out;
}

TEST_F(Cli, SweepCOverWideSpan)
{
    const auto r = run({"sweep", "--data", prices.string(), "--normalize", "--train-n", "120", "--test-n", "40",
                        "--vary", "c", "--grid", "0.1:6000:50", "--fix", "epsilon=0.039", "--out", out("s")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(data_lines(dir / "s" / "sweep.csv"), 50u);
    EXPECT_NE(r.out.find("epsilon=0.039"), std::string::npos);
}

TEST_F(Cli, SweepSinglePointMatchesTrain)
{
    ASSERT_EQ(run({"sweep", "--data", prices.string(), "--normalize", "--vary", "gamma", "--grid", "0.0625:1:1", "--fix",
                   "c=500,epsilon=0.039", "--out", out("s")})
                  .code,
              0);
    ASSERT_EQ(run({"train", "--data", prices.string(), "--normalize", "--c", "500", "--epsilon", "0.039", "--gamma",
                   "0.0625", "--out", out("t")})
                  .code,
              0);
    const auto rows = csv_rows(dir / "s" / "sweep.csv");
    ASSERT_EQ(rows.size(), 2u);
    const auto rep = nlohmann::json::parse(slurp(dir / "t" / "train_report.json"));
    EXPECT_EQ(std::stod(rows[1][2]), rep.at("test_mse").get<double>());
    EXPECT_EQ(std::stoul(rows[1][3]), rep.at("n_sv").get<std::size_t>());
}

TEST_F(Cli, TrainWritesModelAtRequestedPoint)
{
    const auto r = run({"train", "--data", prices.string(), "--normalize", "--c", "500", "--epsilon", "0.039",
                        "--gamma", "0.0625", "--out", out("t")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto model = nlohmann::json::parse(slurp(dir / "t" / "model.json")).get<SvrModel>();
    EXPECT_EQ(model.params, (SvrParams{500, 0.039, KernelSpec::rbf(0.0625)}));
    EXPECT_NE(r.out.find("train_mse="), std::string::npos);
    EXPECT_NE(r.out.find("n_sv="), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "t" / "normalizer.json"));
}

TEST_F(Cli, TrainDefaultsAreBaseline)
{
    ASSERT_EQ(run({"train", "--data", prices.string(), "--normalize", "--out", out("t")}).code, 0);
    const auto model = nlohmann::json::parse(slurp(dir / "t" / "model.json")).get<SvrModel>();
    EXPECT_EQ(model.params, default_svr_params());
}

TEST_F(Cli, ConfigFileWithFlagOverride)
{
    const auto cfg = dir / "run.json";
    std::ofstream(cfg) << R"({"data": ")" << prices.generic_string()
                       << R"(", "normalize": true, "c": 3.5, "epsilon": 0.02, "train_n": 100, "test_n": 30})";
    ASSERT_EQ(run({"train", "--config", cfg.string(), "--epsilon", "0.05", "--out", out("t")}).code, 0);
    const auto model = nlohmann::json::parse(slurp(dir / "t" / "model.json")).get<SvrModel>();
    EXPECT_EQ(model.params.c, 3.5);
    EXPECT_EQ(model.params.epsilon, 0.05);
    EXPECT_TRUE(fs::exists(dir / "t" / "normalizer.json"));

    std::ofstream(dir / "broken.json") << "{not json";
    EXPECT_EQ(run({"train", "--config", (dir / "broken.json").string(), "--out", out("u")}).code,
              cli::ExitCode::usage);
}

TEST_F(Cli, TunePresetBox)
{
    const auto r = run({"tune", "--data", prices.string(), "--normalize", "--train-n", "60", "--test-n", "20",
                        "--method", "de", "--preset", "apple-normalized", "--np", "30", "--gmax", "200", "--cr", "0.7",
                        "--f", "0.9", "--threads", "1", "--out", out("d")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rep = nlohmann::json::parse(slurp(dir / "d" / "tune_report.json"));
    const double c = rep.at("optimized").at("c"), e = rep.at("optimized").at("epsilon"),
                 g = rep.at("optimized").at("gamma");
    EXPECT_TRUE(c >= 1 && c <= 550);
    EXPECT_TRUE(e >= 0.033 && e <= 0.052);
    EXPECT_TRUE(g >= 0.01 && g <= 0.11);
    EXPECT_EQ(rep.at("optimizer").at("np"), 30);
    EXPECT_EQ(rep.at("optimizer_result").at("evaluations"), 30 * 201);
    EXPECT_EQ(data_lines(dir / "d" / "history.csv"), 201u);
    EXPECT_TRUE(fs::exists(dir / "d" / "model.json"));
    EXPECT_TRUE(fs::exists(dir / "d" / "timing.json"));
    EXPECT_NE(r.out.find("de_svm"), std::string::npos);
}

TEST_F(Cli, TuneCollapsedBoxEqualsTrain)
{
    const std::vector<std::string> common{"--data", prices.string(), "--normalize", "--train-n", "80", "--test-n", "30"};
    std::vector<std::string> tune_args{"tune"};
    tune_args.insert(tune_args.end(), common.begin(), common.end());
    for (const char* a : {"--method", "de", "--np", "5", "--gmax", "2", "--c-range", "4:4.000000001",
                          "--epsilon-range", "0.05:0.050000001", "--gamma-range", "0.5:0.500000001", "--out"})
        tune_args.push_back(a);
    tune_args.push_back(out("d"));
    const auto r = run(tune_args);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rep = nlohmann::json::parse(slurp(dir / "d" / "tune_report.json"));
    const auto p = rep.at("optimized");

    auto train_args = common;
    train_args.insert(train_args.begin(), "train");
    for (const auto& [flag, key] : {std::pair{"--c", "c"}, {"--epsilon", "epsilon"}, {"--gamma", "gamma"}}) {
        train_args.push_back(flag);
        train_args.push_back(text::format_double(p.at(key).get<double>()));
    }
    train_args.push_back("--out");
    train_args.push_back(out("t"));
    ASSERT_EQ(run(train_args).code, 0);
    const auto direct = nlohmann::json::parse(slurp(dir / "t" / "train_report.json"));
    EXPECT_EQ(rep.at("test_mse"), direct.at("test_mse"));
    EXPECT_EQ(slurp(dir / "d" / "model.json"), slurp(dir / "t" / "model.json"));
}

TEST_F(Cli, TuneBeatsBaselineAndIsReproducible)
{
    std::vector<std::string> base{"--data", prices.string(), "--normalize", "--train-n", "150", "--test-n", "50",
                                  "--c-range", "0.1:100", "--epsilon-range", "0.001:0.2", "--gamma-range", "0.01:2",
                                  "--fitness", "holdout:0.2", "--seed", "3", "--compare"};
    auto with = [&](std::vector<std::string> extra) {
        auto args = base;
        args.insert(args.begin(), "tune");
        args.insert(args.end(), extra.begin(), extra.end());
        return run(args);
    };
    ASSERT_EQ(with({"--method", "de", "--np", "10", "--gmax", "15", "--strategy", "local_to_best_1_bin", "--cr", "0.7",
                    "--f", "0.9", "--out", out("de")})
                  .code,
              0);
    ASSERT_EQ(with({"--method", "pso", "--swarm", "10", "--iters", "15", "--out", out("pso")}).code, 0);
    for (const char* m : {"de", "pso"}) {
        const auto rows = csv_rows(dir / m / "comparison.csv");
        ASSERT_EQ(rows.size(), 3u);
        EXPECT_EQ(rows[1][0], "svm_default");
        EXPECT_LE(std::stod(rows[2][5]), std::stod(rows[1][5])) << m;
        EXPECT_EQ(data_lines(dir / m / "comparison_predictions.csv"), 50u);
    }

    ASSERT_EQ(with({"--method", "pso", "--swarm", "10", "--iters", "15", "--threads", "3", "--out", out("pso2")}).code,
              0);
    EXPECT_EQ(slurp(dir / "pso" / "tune_report.json"), slurp(dir / "pso2" / "tune_report.json"));
    EXPECT_EQ(slurp(dir / "pso" / "model.json"), slurp(dir / "pso2" / "model.json"));
}

TEST_F(Cli, PredictTestFile)
{
    ASSERT_EQ(run({"ingest", "--data", prices.string(), "--normalize", "--out", out("i")}).code, 0);
    ASSERT_EQ(run({"train", "--data", prices.string(), "--normalize", "--out", out("t")}).code, 0);
    const auto r = run({"predict", "--model", out("t/model.json"), "--features", out("i/test.csv"), "--normalizer",
                        out("i/normalizer.json"), "--out", out("p")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(dir / "p" / "predictions.csv");
    ASSERT_EQ(rows.size(), 201u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"date", "actual", "predicted"}));

    const auto model = nlohmann::json::parse(slurp(dir / "t" / "model.json")).get<SvrModel>();
    const auto map = nlohmann::json::parse(slurp(dir / "i" / "normalizer.json")).get<NormalizationMap>();
    const auto set = build_supervised(synthetic::random_walk_series(701, 5));
    const auto test = apply_normalizer(map, set.slice(500, 200));
    for (std::size_t i = 0; i < 200; i += 37) {
        const double expect = invert_normalizer(map, "next_close", predict(model, test.features.row(i)));
        EXPECT_NEAR(std::stod(rows[i + 1][2]), expect, 1e-9 * std::abs(expect));
        EXPECT_NEAR(std::stod(rows[i + 1][1]), set.targets[500 + i], 1e-9 * set.targets[500 + i]);
    }
}

TEST_F(Cli, PredictConstantModel)
{
    SvrModel m;
    m.dims = 5;
    m.support_inputs = Matrix(0, 5);
    m.bias = 42.5;
    std::ofstream(dir / "m.json") << nlohmann::json(m).dump();
    ASSERT_EQ(run({"ingest", "--data", prices.string(), "--out", out("i")}).code, 0);
    ASSERT_EQ(run({"predict", "--model", out("m.json"), "--features", out("i/test.csv"), "--out", out("p")}).code, 0);
    const auto rows = csv_rows(dir / "p" / "predictions.csv");
    ASSERT_EQ(rows.size(), 201u);
    for (std::size_t i = 1; i < rows.size(); ++i)
        EXPECT_EQ(rows[i][2], "42.5");
}

TEST_F(Cli, PredictDimensionMismatch)
{
    SvrModel m;
    m.dims = 3;
    m.support_inputs = Matrix(0, 3);
    std::ofstream(dir / "m.json") << nlohmann::json(m).dump();
    ASSERT_EQ(run({"ingest", "--data", prices.string(), "--out", out("i")}).code, 0);
    const auto r = run({"predict", "--model", out("m.json"), "--features", out("i/test.csv"), "--out", out("p")});
    EXPECT_EQ(r.code, cli::ExitCode::data);
    EXPECT_NE(r.err.find("expects 3 features"), std::string::npos) << r.err;
}
