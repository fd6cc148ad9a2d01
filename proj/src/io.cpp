#include "mmd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mmd/error.hpp"

namespace mmd::io {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

[[noreturn]] void parse_fail(const fs::path& path, std::size_t line, const std::string& what) {
    throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line) + ": " + what);
}

Csv read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    Csv csv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto fields = split(body);
        if (csv.header.empty()) {
            for (auto f : fields) csv.header.emplace_back(f);
            csv.columns.resize(fields.size());
            continue;
        }
        if (fields.size() != csv.header.size())
            parse_fail(path, lineno, "expected " + std::to_string(csv.header.size()) + " fields, found " +
                                         std::to_string(fields.size()));
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double v = 0.0;
            const auto f = fields[c];
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || ptr != f.data() + f.size())
                parse_fail(path, lineno, "bad number '" + std::string(f) + "'");
            csv.columns[c].push_back(v);
        }
    }
    if (in.bad()) throw Error(ErrorCode::IoError, "read failed for " + path.string());
    if (csv.header.empty()) parse_fail(path, 1, "missing header");
    return csv;
}

void expect_header(const fs::path& path, const Csv& csv, std::span<const std::string_view> names) {
    bool ok = csv.header.size() == names.size();
    for (std::size_t i = 0; ok && i < names.size(); ++i) ok = csv.header[i] == names[i];
    if (!ok) {
        std::string want;
        for (auto n : names) want += (want.empty() ? "" : ",") + std::string(n);
        parse_fail(path, 1, "header must be '" + want + "'");
    }
}

class Writer {
public:
    explicit Writer(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    std::ofstream& stream() { return out_; }
    void close() {
        out_.close();
        if (!out_) throw Error(ErrorCode::IoError, "write failed for " + path_.string());
    }

private:
    fs::path path_;
    std::ofstream out_;
};

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create directory " + dir.string());
}

void write_xy(const fs::path& path, std::string_view header, std::span<const double> xs, std::span<const double> ys) {
    Writer w(path);
    auto& out = w.stream();
    out << header << '\n';
    for (std::size_t i = 0; i < xs.size(); ++i) out << format_double(xs[i]) << ',' << format_double(ys[i]) << '\n';
    w.close();
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
    Writer w(path);
    w.stream() << text;
    w.close();
}

SampledSignal read_signal_csv(const fs::path& path) {
    auto csv = read_csv(path);
    constexpr std::string_view names[] = {"t", "value"};
    expect_header(path, csv, names);
    return make_signal(std::move(csv.columns[0]), std::move(csv.columns[1]));
}

void write_signal_csv(const fs::path& path, const SampledSignal& signal) {
    write_xy(path, "t,value", signal.times(), signal.values());
}

PhaseTable read_phases_csv(const fs::path& path) {
    auto csv = read_csv(path);
    const auto& h = csv.header;
    if (h.size() < 2 || h[0] != "t") parse_fail(path, 1, "header must start with 't,p_1'");
    std::size_t K = 0;
    while (1 + K < h.size() && h[1 + K] == "p_" + std::to_string(K + 1)) ++K;
    if (K == 0) parse_fail(path, 1, "no phase columns p_1..p_K");
    const std::size_t rest = h.size() - 1 - K;
    if (rest != 0 && rest != K) parse_fail(path, 1, "amplitude columns must be q_1..q_K or absent");
    for (std::size_t k = 0; k < rest; ++k)
        if (h[1 + K + k] != "q_" + std::to_string(k + 1)) parse_fail(path, 1, "expected column q_" + std::to_string(k + 1));

    // canonical time order, matching make_signal
    const auto& t = csv.columns[0];
    std::vector<std::size_t> order(t.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
    auto permuted = [&](const std::vector<double>& col) {
        std::vector<double> out(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) out[i] = col[order[i]];
        return out;
    };

    PhaseTable table;
    table.times = permuted(t);
    for (std::size_t i = 1; i < table.times.size(); ++i)
        if (table.times[i] == table.times[i - 1])
            throw Error(ErrorCode::DuplicateTime, "duplicate time " + format_double(table.times[i]) + " in " + path.string());
    table.has_amplitude = rest == K;
    for (std::size_t k = 0; k < K; ++k) {
        std::optional<std::vector<double>> q;
        if (table.has_amplitude) q = permuted(csv.columns[1 + K + k]);
        table.priors.push_back(make_prior(permuted(csv.columns[1 + k]), std::move(q), table.times));
    }
    return table;
}

void write_phases_csv(const fs::path& path, std::span<const double> times, std::span<const PhasePrior> priors,
                      bool with_amplitude) {
    for (const auto& p : priors)
        if (p.size() != times.size()) throw Error(ErrorCode::GridMismatch, "prior and grid lengths differ");
    Writer w(path);
    auto& out = w.stream();
    out << 't';
    for (std::size_t k = 0; k < priors.size(); ++k) out << ",p_" << k + 1;
    if (with_amplitude)
        for (std::size_t k = 0; k < priors.size(); ++k) out << ",q_" << k + 1;
    out << '\n';
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << format_double(times[i]);
        for (const auto& p : priors) out << ',' << format_double(p.phase()[i]);
        if (with_amplitude)
            for (const auto& p : priors) out << ',' << format_double(p.amplitude()[i]);
        out << '\n';
    }
    w.close();
}

ShapeTable read_shape_csv(const fs::path& path) {
    auto csv = read_csv(path);
    constexpr std::string_view names[] = {"x", "value"};
    expect_header(path, csv, names);
    return ShapeTable(std::move(csv.columns[1]));
}

void write_shape_csv(const fs::path& path, const ShapeTable& shape) {
    const auto xs = bin_centers(shape.size());
    write_xy(path, "x,value", xs, shape.bins());
}

std::string config_to_json(const RunConfig& c) {
    json j = {
        {"command", c.command},   {"example", c.example}, {"spec", c.spec},         {"samples", c.samples},
        {"noise_var", c.noise_var}, {"grid", c.grid},     {"signal", c.signal},     {"phases", c.phases},
        {"residual", c.residual}, {"out", c.out},         {"eps", c.eps},           {"max_iter", c.max_iter},
        {"m0", c.m0},             {"eps1", c.eps1},       {"eps2", c.eps2},         {"j1", c.j1},
        {"j2", c.j2},             {"bins", c.bins},       {"scheme", c.scheme},     {"h", c.h},
        {"max_lag", c.max_lag},
    };
    j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    return j.dump(2);
}

RunConfig config_from_json(std::string_view text) {
    RunConfig c;
    try {
        const auto j = json::parse(text);
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) j.at(key).get_to(field);
        };
        get("command", c.command);
        get("example", c.example);
        get("spec", c.spec);
        get("samples", c.samples);
        get("noise_var", c.noise_var);
        get("grid", c.grid);
        get("signal", c.signal);
        get("phases", c.phases);
        get("residual", c.residual);
        get("out", c.out);
        get("eps", c.eps);
        get("max_iter", c.max_iter);
        get("m0", c.m0);
        get("eps1", c.eps1);
        get("eps2", c.eps2);
        get("j1", c.j1);
        get("j2", c.j2);
        get("bins", c.bins);
        get("scheme", c.scheme);
        get("h", c.h);
        get("max_lag", c.max_lag);
        if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
    }
    return c;
}

void write_gmd_result(const fs::path& dir, const GmdResult& result) {
    ensure_dir(dir);
    for (std::size_t k = 0; k < result.modes.size(); ++k) {
        const auto tag = std::to_string(k + 1);
        write_signal_csv(dir / ("mode_" + tag + ".csv"), result.modes[k]);
        write_shape_csv(dir / ("shape_" + tag + ".csv"), result.shapes[k]);
    }
    write_signal_csv(dir / "residual.csv", result.residual);
}

void write_mmd_result(const fs::path& dir, const MmdResult& result) {
    ensure_dir(dir);
    Writer coeffs(dir / "coefficients.csv");
    coeffs.stream() << "k,n,a_n,b_n\n";
    for (std::size_t k = 0; k < result.estimates.size(); ++k) {
        const auto& est = result.estimates[k];
        const auto tag = std::to_string(k + 1);
        write_signal_csv(dir / ("mode_" + tag + ".csv"), est.mode);
        for (int n = -est.bandwidth; n <= est.bandwidth; ++n) {
            const auto slot = est.slot(n);
            const auto band = "_" + std::to_string(n) + ".csv";
            write_shape_csv(dir / ("shape_" + tag + "_cos" + band), est.cos_shapes[slot]);
            write_shape_csv(dir / ("product_" + tag + "_cos" + band), est.cos_products[slot]);
            if (n != 0) {
                write_shape_csv(dir / ("shape_" + tag + "_sin" + band), est.sin_shapes[slot]);
                write_shape_csv(dir / ("product_" + tag + "_sin" + band), est.sin_products[slot]);
            }
            coeffs.stream() << k + 1 << ',' << n << ',' << format_double(est.cos_coeffs[slot]) << ','
                            << format_double(est.sin_coeffs[slot]) << '\n';
        }
    }
    coeffs.close();
    write_signal_csv(dir / "residual.csv", result.residual);
}

void write_report(const fs::path& dir, const DecompositionReport& trace, const std::optional<WellDiffStats>& stats,
                  const RunConfig& cfg) {
    ensure_dir(dir);
    json j;
    j["residual_norms"] = trace.residual_norms;
    j["shape_increment_norms"] = trace.shape_increment_norms;
    j["stop_reason"] = std::string(to_string(trace.stop_reason));
    j["iterations"] = trace.iterations;
    j["gamma"] = stats ? json(stats->gamma) : json(nullptr);
    j["beta"] = stats ? json(stats->beta) : json(nullptr);
    j["contraction_bound"] = stats ? json(stats->contraction_bound) : json(nullptr);
    j["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
    j["config"] = json::parse(config_to_json(cfg));
    write_text(dir / "report.json", j.dump(2) + "\n");
}

}  // namespace mmd::io
