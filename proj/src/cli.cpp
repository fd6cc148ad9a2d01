#include "mmd/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmd/diagnostics.hpp"
#include "mmd/error.hpp"
#include "mmd/gmd.hpp"
#include "mmd/io.hpp"
#include "mmd/kernels.hpp"
#include "mmd/mmd.hpp"
#include "mmd/synth.hpp"

namespace mmd {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Truncated Fourier series c0 + sum_m cos_m cos(2 pi m x) + sin_m sin(2 pi m x).
struct Series {
    double c0 = 0.0;
    std::vector<double> cos, sin;

    double operator()(double x) const {
        double v = c0;
        for (std::size_t m = 0; m < cos.size(); ++m) v += cos[m] * std::cos(kTwoPi * static_cast<double>(m + 1) * x);
        for (std::size_t m = 0; m < sin.size(); ++m) v += sin[m] * std::sin(kTwoPi * static_cast<double>(m + 1) * x);
        return v;
    }
    int order() const { return static_cast<int>(std::max(cos.size(), sin.size())); }
};

Series read_series(const json& j, double c0_default) {
    Series s;
    s.c0 = j.value("mean", c0_default);
    if (j.contains("cos")) j.at("cos").get_to(s.cos);
    if (j.contains("sin")) j.at("sin").get_to(s.sin);
    return s;
}

struct SpecComponent {
    ComponentSpec spec;
    Series amplitude;
};

// {"components": [{"fundamental": N, "shape": {"ecg": 1} | {"table": [...]},
//   "amplitude": {"mean": 1, "cos": [...], "sin": [...]}, "phase": {"cos": [...], "sin": [...]}}]}
// amplitude is a series in phi(t); phase is phi(t) = t + series in t.
std::vector<SpecComponent> read_synth_spec(const fs::path& path) {
    std::vector<SpecComponent> out;
    try {
        const auto j = json::parse(io::read_text(path));
        for (const auto& c : j.at("components")) {
            SpecComponent sc;
            sc.spec.fundamental = c.at("fundamental").get<int>();
            if (sc.spec.fundamental < 1) throw Error(ErrorCode::InvalidArgument, "fundamental must be at least 1");
            const auto& shape = c.at("shape");
            if (shape.contains("ecg"))
                sc.spec.shape = ecg_like_shape(kTruthBins, shape.at("ecg").get<int>());
            else
                sc.spec.shape = ShapeTable(shape.at("table").get<std::vector<double>>());
            sc.amplitude = c.contains("amplitude") ? read_series(c.at("amplitude"), 1.0) : Series{1.0, {}, {}};
            const Series drift = c.contains("phase") ? read_series(c.at("phase"), 0.0) : Series{};
            sc.spec.phase = [drift](double t) { return t + drift(t); };
            sc.spec.amplitude = [amp = sc.amplitude, phase = sc.spec.phase](double t) { return amp(phase(t)); };
            out.push_back(std::move(sc));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "spec has no components");
    return out;
}

// band products of alpha(phi) s(p) for a truncated amplitude series
MimfEstimate bands_of(const ComponentSpec& spec, const Series& amp) {
    auto est = MimfEstimate::zeros(amp.order(), spec.shape.size());
    est.cos_products[est.slot(0)] = spec.shape.scaled(amp.c0);
    for (std::size_t m = 0; m < amp.cos.size(); ++m)
        est.cos_products[est.slot(static_cast<int>(m) + 1)] = spec.shape.scaled(amp.cos[m]);
    for (std::size_t m = 0; m < amp.sin.size(); ++m)
        est.sin_products[est.slot(static_cast<int>(m) + 1)] = spec.shape.scaled(amp.sin[m]);
    normalize(est);
    return est;
}

void write_truth(const fs::path& dir, std::size_t k, const SampledSignal& mode, const ShapeTable& shape,
                 const MimfEstimate& bands) {
    const auto tag = std::to_string(k + 1);
    io::write_signal_csv(dir / ("mode_" + tag + ".csv"), mode);
    io::write_shape_csv(dir / ("shape_" + tag + ".csv"), shape);
    for (int n = -bands.bandwidth; n <= bands.bandwidth; ++n) {
        const auto band = "_" + std::to_string(n) + ".csv";
        io::write_shape_csv(dir / ("product_" + tag + "_cos" + band), bands.cos_product(n));
        if (n != 0) io::write_shape_csv(dir / ("product_" + tag + "_sin" + band), bands.sin_product(n));
    }
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create directory " + dir.string());
}

void run_synth(const io::RunConfig& cfg) {
    const bool has_example = !cfg.example.empty();
    if (has_example == !cfg.spec.empty())
        throw Error(ErrorCode::InvalidArgument, "synth needs exactly one of --example or --spec");
    const auto grid_mode = parse_grid_mode(cfg.grid);
    const std::uint64_t seed = cfg.seed.value_or(0);
    const fs::path out = cfg.out;
    make_dir(out / "truth");

    if (has_example) {
        if (cfg.example != "ex4_1") throw Error(ErrorCode::InvalidArgument, "unknown example '" + cfg.example + "'");
        const auto ex = gen_example_4_1(cfg.samples, cfg.noise_var, seed, grid_mode);
        io::write_signal_csv(out / "signal.csv", ex.signal);
        io::write_phases_csv(out / "phases.csv", ex.signal.times(), ex.priors, true);
        for (std::size_t k = 0; k < ex.components.size(); ++k)
            write_truth(out / "truth", k, ex.components[k], ex.shapes[k], ex.truth[k]);
    } else {
        const auto comps = read_synth_spec(cfg.spec);
        const auto t = sample_grid(cfg.samples, grid_mode, seed);
        std::vector<double> total(t.size(), 0.0);
        std::vector<PhasePrior> priors;
        for (std::size_t k = 0; k < comps.size(); ++k) {
            const auto f = gen_gimf(comps[k].spec, t);
            for (std::size_t i = 0; i < t.size(); ++i) total[i] += f.values()[i];
            priors.push_back(prior_from_spec(comps[k].spec, t));
            write_truth(out / "truth", k, f, comps[k].spec.shape, bands_of(comps[k].spec, comps[k].amplitude));
        }
        const auto signal = add_noise(make_signal(t, std::move(total)), cfg.noise_var, seed ^ 0x9e3779b97f4a7c15ULL);
        io::write_signal_csv(out / "signal.csv", signal);
        io::write_phases_csv(out / "phases.csv", signal.times(), priors, true);
    }
    io::write_text(out / "config.json", io::config_to_json(cfg) + "\n");
}

struct Inputs {
    SampledSignal signal;
    std::vector<PhasePrior> priors;
};

Inputs load_inputs(const io::RunConfig& cfg) {
    Inputs in;
    in.signal = io::read_signal_csv(cfg.signal);
    auto table = io::read_phases_csv(cfg.phases);
    const auto t = in.signal.times();
    if (table.times.size() != t.size() || !std::equal(t.begin(), t.end(), table.times.begin()))
        throw Error(ErrorCode::GridMismatch, "signal and phase files must share the same time grid");
    in.priors = std::move(table.priors);
    return in;
}

WellDiffStats separation_stats(const Inputs& in, double h) {
    const auto counts = partition_counts(in.priors, in.signal.times(), h);
    return well_diff_stats(counts, phase_bound(in.priors, in.signal.times()));
}

void run_gmd(const io::RunConfig& cfg) {
    const auto in = load_inputs(cfg);
    GmdConfig g;
    g.eps = cfg.eps;
    g.max_iter = cfg.max_iter;
    g.bins = cfg.bins;
    g.scheme = parse_scheme(cfg.scheme);
    const auto result = gmd_decompose(in.signal, in.priors, g);
    io::write_gmd_result(cfg.out, result);
    io::write_report(cfg.out, result.trace, separation_stats(in, cfg.h), cfg);
}

void run_mmd(const io::RunConfig& cfg) {
    const auto in = load_inputs(cfg);
    MmdConfig m;
    m.m0 = cfg.m0;
    m.eps1 = cfg.eps1;
    m.eps2 = cfg.eps2;
    m.j1 = cfg.j1;
    m.j2 = cfg.j2;
    m.bins = cfg.bins;
    m.scheme = parse_scheme(cfg.scheme);
    const auto result = mmd_decompose(in.signal, in.priors, m);
    io::write_mmd_result(cfg.out, result);
    io::write_report(cfg.out, result.trace, separation_stats(in, cfg.h), cfg);
}

void run_diagnose(const io::RunConfig& cfg) {
    if (cfg.phases.empty() && cfg.residual.empty())
        throw Error(ErrorCode::InvalidArgument, "diagnose needs --phases or --residual");
    make_dir(cfg.out);
    json report;
    if (!cfg.phases.empty()) {
        const auto table = io::read_phases_csv(cfg.phases);
        const auto counts = partition_counts(table.priors, table.times, cfg.h);
        const double m = phase_bound(table.priors, table.times);
        const auto s = well_diff_stats(counts, m);
        report["h"] = s.h;
        report["phase_bound"] = m;
        report["gamma"] = s.gamma;
        report["beta"] = s.beta;
        report["beta_per_pair"] = s.beta_per_pair;
        report["contraction_bound"] = s.contraction_bound;
        report["well_differentiated"] = s.well_differentiated;
        report["marginal_counts"] = counts.single;
    }
    if (!cfg.residual.empty()) {
        const auto r = io::read_signal_csv(cfg.residual);
        const auto rho = autocorrelation(r.values(), cfg.max_lag);
        io::fs::path path = io::fs::path(cfg.out) / "autocorrelation.csv";
        std::string text = "lag,rho\n";
        for (std::size_t i = 0; i < rho.size(); ++i) text += std::to_string(i) + "," + io::format_double(rho[i]) + "\n";
        io::write_text(path, text);
        double peak = 0.0;
        for (std::size_t i = 1; i < rho.size(); ++i) peak = std::max(peak, std::abs(rho[i]));
        report["max_abs_autocorrelation"] = peak;
        report["white_noise_bound"] = 4.0 / std::sqrt(static_cast<double>(r.size()));
    }
    report["config"] = json::parse(io::config_to_json(cfg));
    io::write_text(fs::path(cfg.out) / "diagnostics.json", report.dump(2) + "\n");
}

void apply_thread_env() {
    const char* env = std::getenv("MMD_THREADS");
    if (env == nullptr || *env == '\0') return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) throw Error(ErrorCode::InvalidArgument, "MMD_THREADS must be a positive integer");
    kernels::set_thread_limit(static_cast<int>(n));
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mode decomposition of oscillatory signals with known phases"};
    app.require_subcommand(1);
    // `--h` is the step side, so help is long-form only
    app.set_help_flag("--help", "Print this help message and exit");
    io::RunConfig cfg;
    std::uint64_t seed = 0;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic signal with ground truth");
    synth->add_option("--example", cfg.example, "Built-in example (ex4_1)");
    synth->add_option("--spec", cfg.spec, "Component spec JSON");
    synth->add_option("--samples", cfg.samples, "Number of samples")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 26));
    synth->add_option("--noise-var", cfg.noise_var, "Gaussian noise variance")->check(CLI::NonNegativeNumber);
    auto* seed_opt = synth->add_option("--seed", seed, "Random seed");
    synth->add_option("--grid", cfg.grid, "uniform or iid")->check(CLI::IsMember({"uniform", "iid"}));
    synth->add_option("--out", cfg.out, "Output directory")->required();

    auto* gmd = app.add_subcommand("gmd", "Generalized mode decomposition");
    auto* mmd = app.add_subcommand("mmd", "Multiresolution mode decomposition");
    for (auto* sub : {gmd, mmd}) {
        sub->add_option("--signal", cfg.signal, "Signal CSV (t,value)")->required();
        sub->add_option("--phases", cfg.phases, "Phase CSV (t,p_1..p_K[,q_1..q_K])")->required();
        sub->add_option("--bins", cfg.bins, "Shape table bins")->check(CLI::Range(2, 1 << 20));
        sub->add_option("--scheme", cfg.scheme, "gauss_seidel or jacobi")->check(CLI::IsMember({"gauss_seidel", "jacobi"}));
        sub->add_option("--h", cfg.h, "Step for the separation statistics in the report");
        sub->add_option("--out", cfg.out, "Output directory")->required();
    }
    gmd->add_option("--eps", cfg.eps, "Relative accuracy");
    gmd->add_option("--max-iter", cfg.max_iter, "Maximum sweeps");
    mmd->add_option("--m0", cfg.m0, "Bandwidth");
    mmd->add_option("--eps1", cfg.eps1, "Outer relative accuracy");
    mmd->add_option("--eps2", cfg.eps2, "Inner relative accuracy");
    mmd->add_option("--j1", cfg.j1, "Maximum outer iterations");
    mmd->add_option("--j2", cfg.j2, "Maximum inner sweeps");

    auto* diagnose = app.add_subcommand("diagnose", "Phase separation and residual whiteness");
    diagnose->add_option("--phases", cfg.phases, "Phase CSV");
    diagnose->add_option("--h", cfg.h, "Step side (1/h integer)");
    diagnose->add_option("--residual", cfg.residual, "Residual CSV (t,value)");
    diagnose->add_option("--max-lag", cfg.max_lag, "Largest autocorrelation lag");
    diagnose->add_option("--out", cfg.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }
    if (seed_opt->count() > 0) cfg.seed = seed;

    try {
        apply_thread_env();
        if (*synth) {
            cfg.command = "synth";
            run_synth(cfg);
        } else if (*gmd) {
            cfg.command = "gmd";
            run_gmd(cfg);
        } else if (*mmd) {
            cfg.command = "mmd";
            run_mmd(cfg);
        } else {
            cfg.command = "diagnose";
            run_diagnose(cfg);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::IoError ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace mmd
