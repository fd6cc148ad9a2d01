#pragma once

// CSV and JSON artifacts. Floats are written with 17 significant digits so every file the tool
// writes reads back bit-exactly.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmd/diagnostics.hpp"
#include "mmd/gmd.hpp"
#include "mmd/mmd.hpp"
#include "mmd/signal_model.hpp"

namespace mmd::io {

namespace fs = std::filesystem;

[[nodiscard]] std::string format_double(double v);

/// Header `t,value`. Throws ParseError (with line number) or IoError.
[[nodiscard]] SampledSignal read_signal_csv(const fs::path& path);
void write_signal_csv(const fs::path& path, const SampledSignal& signal);

struct PhaseTable {
    std::vector<double> times;
    std::vector<PhasePrior> priors;
    bool has_amplitude = false;
};

/// Header `t,p_1..p_K[,q_1..q_K]`; amplitudes default to 1.
[[nodiscard]] PhaseTable read_phases_csv(const fs::path& path);
void write_phases_csv(const fs::path& path, std::span<const double> times, std::span<const PhasePrior> priors,
                      bool with_amplitude);

/// Header `x,value` with x the bin centers.
[[nodiscard]] ShapeTable read_shape_csv(const fs::path& path);
void write_shape_csv(const fs::path& path, const ShapeTable& shape);

/// Everything a CLI run depends on. Unused fields keep their defaults.
struct RunConfig {
    std::string command;
    // synth
    std::string example;
    std::string spec;
    std::size_t samples = 16384;
    double noise_var = 0.0;
    std::optional<std::uint64_t> seed;
    std::string grid = "uniform";
    // inputs and outputs
    std::string signal;
    std::string phases;
    std::string residual;
    std::string out;
    // gmd
    double eps = 1e-6;
    int max_iter = 200;
    // mmd
    int m0 = 2;
    double eps1 = 1e-6;
    double eps2 = 1e-6;
    int j1 = 200;
    int j2 = 10;
    // shared
    int bins = 200;
    std::string scheme = "gauss_seidel";
    // diagnose
    double h = 0.05;
    std::size_t max_lag = 100;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

[[nodiscard]] std::string config_to_json(const RunConfig& cfg);
/// Missing keys keep defaults. Throws ParseError.
[[nodiscard]] RunConfig config_from_json(std::string_view text);

/// mode_k.csv, shape_k.csv (k from 1) and residual.csv.
void write_gmd_result(const fs::path& dir, const GmdResult& result);

/// mode_k.csv, shape_k_{cos,sin}_n.csv (unit shapes), product_k_{cos,sin}_n.csv (raw
/// accumulators), coefficients.csv and residual.csv.
void write_mmd_result(const fs::path& dir, const MmdResult& result);

/// report.json: trace, well-differentiation summary, seed and config.
void write_report(const fs::path& dir, const DecompositionReport& trace, const std::optional<WellDiffStats>& stats,
                  const RunConfig& cfg);

[[nodiscard]] std::string read_text(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);

}  // namespace mmd::io
