#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mmd/cli.hpp"
#include "mmd/io.hpp"
#include "mmd/synth.hpp"
#include "test_support.hpp"

using namespace mmd;
using testing_support::expect_code;
using testing_support::scratch_dir;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string out, err;
};

CliRun run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "mmd");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

}  // namespace

TEST(ReadSignalCsv, ParsesMinimalFile) {
    const auto dir = scratch_dir("read_signal");
    write_file(dir / "s.csv", "t,value\n0,1.5\n0.5,2.5\n");
    const auto s = io::read_signal_csv(dir / "s.csv");
    EXPECT_EQ(s.size(), 2u);
    EXPECT_EQ(s.values()[0], 1.5);
}

TEST(ReadSignalCsv, ReportsLineOfBadRow) {
    const auto dir = scratch_dir("bad_row");
    write_file(dir / "s.csv", "t,value\n0,1\n0.5,abc\n");
    try {
        (void)io::read_signal_csv(dir / "s.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
    }
    write_file(dir / "h.csv", "time,value\n0,1\n0.5,2\n");
    expect_code(ErrorCode::ParseError, [&] { (void)io::read_signal_csv(dir / "h.csv"); });
    write_file(dir / "n.csv", "t,value\n0,1,3\n");
    expect_code(ErrorCode::ParseError, [&] { (void)io::read_signal_csv(dir / "n.csv"); });
    expect_code(ErrorCode::IoError, [&] { (void)io::read_signal_csv(dir / "missing.csv"); });
}

TEST(ReadPhasesCsv, RejectsNonMonotonePhase) {
    const auto dir = scratch_dir("phases_bad");
    write_file(dir / "p.csv", "t,p_1\n0,0\n0.25,1\n0.5,0.5\n0.75,0.2\n");
    expect_code(ErrorCode::NonMonotonePhase, [&] { (void)io::read_phases_csv(dir / "p.csv"); });
}

TEST(ReadPhasesCsv, OptionalAmplitudeColumns) {
    const auto dir = scratch_dir("phases_amp");
    write_file(dir / "a.csv", "t,p_1,p_2\n0,0,0\n0.5,1,2\n");
    const auto a = io::read_phases_csv(dir / "a.csv");
    EXPECT_FALSE(a.has_amplitude);
    EXPECT_EQ(a.priors.size(), 2u);
    EXPECT_EQ(a.priors[1].amplitude()[1], 1.0);
    write_file(dir / "b.csv", "t,p_1,q_1\n0.5,1,3\n0,0,2\n");
    const auto b = io::read_phases_csv(dir / "b.csv");
    EXPECT_TRUE(b.has_amplitude);
    EXPECT_EQ(b.times[0], 0.0);
    EXPECT_EQ(b.priors[0].amplitude()[0], 2.0);
    write_file(dir / "c.csv", "t,p_1,p_2,q_1\n0,0,0,1\n0.5,1,1,1\n");
    expect_code(ErrorCode::ParseError, [&] { (void)io::read_phases_csv(dir / "c.csv"); });
}

TEST(CsvRoundTrip, SignalPhasesAndShapesAreLossless) {
    const auto dir = scratch_dir("roundtrip");
    const auto ex = gen_example_4_1(2048, 2.25, 5, GridMode::Iid);
    io::write_signal_csv(dir / "s.csv", ex.signal);
    io::write_phases_csv(dir / "p.csv", ex.signal.times(), ex.priors, true);
    io::write_shape_csv(dir / "shape.csv", ex.shapes[1]);
    const auto s = io::read_signal_csv(dir / "s.csv");
    const auto p = io::read_phases_csv(dir / "p.csv");
    const auto shape = io::read_shape_csv(dir / "shape.csv");
    for (std::size_t i = 0; i < s.size(); ++i) {
        ASSERT_EQ(s.times()[i], ex.signal.times()[i]);
        ASSERT_EQ(s.values()[i], ex.signal.values()[i]);
        for (std::size_t k = 0; k < 2; ++k) {
            ASSERT_EQ(p.priors[k].phase()[i], ex.priors[k].phase()[i]);
            ASSERT_EQ(p.priors[k].amplitude()[i], ex.priors[k].amplitude()[i]);
        }
    }
    for (int j = 0; j < shape.size(); ++j) ASSERT_EQ(shape.bins()[j], ex.shapes[1].bins()[j]);
}

TEST(RunConfig, JsonRoundTrip) {
    io::RunConfig cfg;
    cfg.command = "mmd";
    cfg.m0 = 3;
    cfg.eps1 = 1e-5;
    cfg.seed = 42;
    cfg.scheme = "jacobi";
    cfg.out = "x/y";
    EXPECT_EQ(io::config_from_json(io::config_to_json(cfg)), cfg);
    io::RunConfig none;
    EXPECT_EQ(io::config_from_json(io::config_to_json(none)), none);
    expect_code(ErrorCode::ParseError, [] { (void)io::config_from_json("{not json"); });
    expect_code(ErrorCode::ParseError, [] { (void)io::config_from_json(R"({"m0": "two"})"); });
}

TEST(Cli, SynthThenMmdWritesAllArtifacts) {
    const auto dir = scratch_dir("cli_pipeline");
    auto r = run_cli({"synth", "--example", "ex4_1", "--samples", "16384", "--noise-var", "0", "--seed", "7", "--out",
                      (dir / "d").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (auto f : {"signal.csv", "phases.csv", "truth/mode_1.csv", "truth/mode_2.csv", "truth/shape_1.csv",
                   "truth/product_2_sin_1.csv"})
        EXPECT_TRUE(fs::exists(dir / "d" / f)) << f;

    const auto sig = (dir / "d" / "signal.csv").string(), ph = (dir / "d" / "phases.csv").string();
    r = run_cli({"mmd", "--signal", sig, "--phases", ph, "--m0", "2", "--out", (dir / "m").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (auto f : {"mode_1.csv", "mode_2.csv", "shape_1_cos_0.csv", "shape_2_sin_-2.csv", "product_1_cos_1.csv",
                   "coefficients.csv", "residual.csv", "report.json"})
        EXPECT_TRUE(fs::exists(dir / "m" / f)) << f;

    std::ifstream coeffs(dir / "m" / "coefficients.csv");
    std::string line;
    std::getline(coeffs, line);
    EXPECT_EQ(line, "k,n,a_n,b_n");
    std::vector<std::pair<int, int>> rows;
    while (std::getline(coeffs, line)) {
        int k = 0, n = 0;
        ASSERT_EQ(std::sscanf(line.c_str(), "%d,%d,", &k, &n), 2);
        rows.emplace_back(k, n);
    }
    std::vector<std::pair<int, int>> expected;
    for (int k = 1; k <= 2; ++k)
        for (int n = -2; n <= 2; ++n) expected.emplace_back(k, n);
    EXPECT_EQ(rows, expected);

    const auto report = nlohmann::json::parse(io::read_text(dir / "m" / "report.json"));
    for (auto key : {"residual_norms", "shape_increment_norms", "stop_reason", "iterations", "gamma", "beta",
                     "contraction_bound", "seed", "config"})
        EXPECT_TRUE(report.contains(key)) << key;
    EXPECT_EQ(io::config_from_json(report["config"].dump()).m0, 2);

    // every CSV written reads back
    (void)io::read_signal_csv(dir / "m" / "mode_1.csv");
    (void)io::read_signal_csv(dir / "m" / "residual.csv");
    (void)io::read_shape_csv(dir / "m" / "shape_1_cos_0.csv");
}

TEST(Cli, GmdAndReportsAreDeterministic) {
    const auto dir = scratch_dir("cli_determinism");
    ASSERT_EQ(run_cli({"synth", "--example", "ex4_1", "--samples", "8192", "--noise-var", "0.5", "--seed", "3",
                       "--out", (dir / "d").string()}).code, 0);
    const auto sig = (dir / "d" / "signal.csv").string(), ph = (dir / "d" / "phases.csv").string();
    for (auto sub : {"a", "b"}) {
        const auto r = run_cli({"gmd", "--signal", sig, "--phases", ph, "--out", (dir / "g").string(), "--bins", "100"});
        ASSERT_EQ(r.code, 0) << r.err;
        fs::rename(dir / "g", dir / (std::string("g") + sub));
    }
    // config.out differs only by the renamed directory, which was identical at write time
    EXPECT_EQ(io::read_text(dir / "ga" / "report.json"), io::read_text(dir / "gb" / "report.json"));
    EXPECT_EQ(io::read_text(dir / "ga" / "residual.csv"), io::read_text(dir / "gb" / "residual.csv"));
}

TEST(Cli, ZeroSignalRun) {
    const auto dir = scratch_dir("cli_zero");
    std::string sig = "t,value\n", ph = "t,p_1\n";
    for (int i = 0; i < 64; ++i) {
        sig += io::format_double(i / 64.0) + ",0\n";
        ph += io::format_double(i / 64.0) + "," + io::format_double(5.0 * i / 64.0) + "\n";
    }
    write_file(dir / "s.csv", sig);
    write_file(dir / "p.csv", ph);
    const auto r = run_cli({"mmd", "--signal", (dir / "s.csv").string(), "--phases", (dir / "p.csv").string(),
                            "--m0", "1", "--bins", "8", "--out", (dir / "m").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = nlohmann::json::parse(io::read_text(dir / "m" / "report.json"));
    EXPECT_EQ(report["stop_reason"], "ResidualSmall");
    const auto residual = io::read_signal_csv(dir / "m" / "residual.csv");
    for (double v : residual.values()) EXPECT_EQ(v, 0.0);
    const auto mode = io::read_signal_csv(dir / "m" / "mode_1.csv");
    for (double v : mode.values()) EXPECT_EQ(v, 0.0);
    EXPECT_TRUE(io::read_shape_csv(dir / "m" / "shape_1_cos_0.csv").is_zero());
}

TEST(Cli, DiagnoseWritesStatistics) {
    const auto dir = scratch_dir("cli_diag");
    ASSERT_EQ(run_cli({"synth", "--example", "ex4_1", "--samples", "4096", "--noise-var", "1", "--seed", "1", "--out",
                       (dir / "d").string()}).code, 0);
    const auto r = run_cli({"diagnose", "--phases", (dir / "d" / "phases.csv").string(), "--h", "0.05", "--residual",
                            (dir / "d" / "signal.csv").string(), "--max-lag", "20", "--out", (dir / "x").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(io::read_text(dir / "x" / "diagnostics.json"));
    EXPECT_GT(j["gamma"].get<double>(), 0.0);
    EXPECT_TRUE(j.contains("beta"));
    EXPECT_TRUE(fs::exists(dir / "x" / "autocorrelation.csv"));
}

TEST(Cli, SynthFromSpecFile) {
    const auto dir = scratch_dir("cli_spec");
    write_file(dir / "spec.json", R"({"components": [
        {"fundamental": 40, "shape": {"ecg": 2}, "amplitude": {"mean": 1.0, "cos": [0.3]}, "phase": {"sin": [0.01]}}]})");
    const auto r = run_cli({"synth", "--spec", (dir / "spec.json").string(), "--samples", "4096", "--out",
                            (dir / "d").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto p = io::read_phases_csv(dir / "d" / "phases.csv");
    EXPECT_EQ(p.priors[0].fundamental(), 40);
    EXPECT_TRUE(fs::exists(dir / "d" / "truth" / "product_1_cos_1.csv"));
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch_dir("cli_exit");
    auto r = run_cli({"gmd", "--bogus"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
    EXPECT_EQ(run_cli({}).code, 1);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
    r = run_cli({"gmd", "--signal", (dir / "none.csv").string(), "--phases", (dir / "none.csv").string(), "--out",
                 (dir / "o").string()});
    EXPECT_EQ(r.code, 2);
    write_file(dir / "bad.csv", "t,value\n0,x\n");
    r = run_cli({"gmd", "--signal", (dir / "bad.csv").string(), "--phases", (dir / "bad.csv").string(), "--out",
                 (dir / "o").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(run_cli({"synth", "--example", "nope", "--out", (dir / "o").string()}).code, 1);
}
