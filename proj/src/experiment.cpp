#include "nclab/experiment.hpp"

#include <charconv>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "nclab/fredholm.hpp"
#include "nclab/kernels.hpp"
#include "nclab/montecarlo.hpp"
#include "nclab/quadrature.hpp"
#include "nclab/stochastic.hpp"
#include "nclab/verify.hpp"
#include "nclab/version.hpp"

namespace nclab::experiment {

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal representation, for byte-stable output files.
std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct GridSpec {
    double min = -3.0;
    double max = 3.0;
    int count = 61;

    std::vector<double> points() const {
        std::vector<double> p(count);
        for (int i = 0; i < count; ++i)
            p[i] = count == 1 ? min : min + (max - min) * i / (count - 1);
        return p;
    }
};

GridSpec parse_grid(const json& j, const std::string& where) {
    GridSpec g;
    g.min = j.at("min").get<double>();
    g.max = j.at("max").get<double>();
    g.count = j.at("count").get<int>();
    if (!(g.min < g.max) || g.count < 1)
        throw ConfigError(where + ": grid needs min < max and count >= 1");
    return g;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header,
              std::uint64_t config_hash) {
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot open output file " + path.string());
        char hash[32];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(config_hash));
        out_ << "# nclab " << kVersion << "\n";
        out_ << "# config-hash: " << hash << "\n";
        out_ << header << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

struct LoadedConfig {
    json j;
    std::uint64_t hash = 0;
    int n = 2;
    double horizon = 1.0;
    std::vector<double> times;
    std::uint64_t seed = 20260810;
    quadrature::QuadratureSpec quad;
};

LoadedConfig load(const RunRequest& req) {
    std::ifstream in(req.config_path);
    if (!in) throw ConfigError("cannot read config file " + req.config_path);
    LoadedConfig cfg;
    try {
        cfg.j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    cfg.hash = fnv1a(cfg.j.dump());

    try {
        if (cfg.j.contains("mode")) {
            const auto mode = cfg.j.at("mode").get<std::string>();
            if (mode != req.mode)
                throw ConfigError("config mode '" + mode + "' does not match requested mode '" +
                                  req.mode + "'");
        }
        cfg.n = cfg.j.value("n", 2);
        cfg.horizon = cfg.j.value("horizon", 1.0);
        cfg.times = cfg.j.value("times", std::vector<double>{cfg.horizon});
        cfg.seed = cfg.j.value("seed", std::uint64_t{20260810});
        if (req.seed) cfg.seed = *req.seed;
        if (cfg.j.contains("quadrature")) {
            const auto& q = cfg.j.at("quadrature");
            cfg.quad.abs_tol = q.value("abs_tol", 1e-10);
            cfg.quad.nodes = q.value("nodes", 64);
            cfg.quad.validate();
        }
        if (cfg.n < 2 || cfg.n % 2 != 0) throw ConfigError("config: n must be positive even");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config schema error: ") + e.what());
    }
    return cfg;
}

stochastic::TimePartition partition_of(const LoadedConfig& cfg) {
    try {
        return stochastic::TimePartition(cfg.horizon, cfg.times);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config times: ") + e.what());
    }
}

int run_density(const LoadedConfig& cfg, const std::filesystem::path& out) {
    const auto& sec = cfg.j.at("density");
    const int slice = sec.value("slice", 1);
    const GridSpec grid = parse_grid(sec.at("grid"), "density.grid");
    auto partition = partition_of(cfg);
    if (slice < 1 || slice > partition.slice_count())
        throw ConfigError("density.slice out of range");
    kernels::CorrelationKernel kernel(cfg.n, partition);

    CsvWriter csv(out / "density.csv", "t,x,rho1", cfg.hash);
    const double t = partition.time(slice);
    for (double x : grid.points())
        csv.row({fmt(t), fmt(x), fmt(kernel.one_point_density(slice, x))});
    return kExitOk;
}

int run_correlate(const LoadedConfig& cfg, const std::filesystem::path& out) {
    const auto& sec = cfg.j.at("correlate");
    const int slice_a = sec.value("slice_a", 1);
    const int slice_b = sec.value("slice_b", 2);
    const GridSpec grid_a = parse_grid(sec.at("grid_a"), "correlate.grid_a");
    const GridSpec grid_b = parse_grid(sec.at("grid_b"), "correlate.grid_b");
    auto partition = partition_of(cfg);
    if (slice_a < 1 || slice_b < 1 || slice_a > partition.slice_count() ||
        slice_b > partition.slice_count())
        throw ConfigError("correlate slices out of range");
    kernels::CorrelationKernel kernel(cfg.n, partition);

    CsvWriter csv(out / "correlate.csv", "t_a,x,t_b,y,rho2", cfg.hash);
    const double ta = partition.time(slice_a), tb = partition.time(slice_b);
    for (double x : grid_a.points()) {
        for (double y : grid_b.points()) {
            if (slice_a == slice_b && x == y) {
                csv.row({fmt(ta), fmt(x), fmt(tb), fmt(y), fmt(0.0)});
                continue;
            }
            const double rho =
                kernel
                    .correlation(kernels::CorrelationQuery{{{slice_a, x}, {slice_b, y}}})
                    .value;
            csv.row({fmt(ta), fmt(x), fmt(tb), fmt(y), fmt(rho)});
        }
    }
    return kExitOk;
}

int run_characteristic(const LoadedConfig& cfg, const std::filesystem::path& out) {
    const auto& sec = cfg.j.at("characteristic");
    const int nodes = sec.value("nodes", 48);
    const auto thetas = sec.at("thetas").get<std::vector<double>>();
    auto partition = partition_of(cfg);
    kernels::CorrelationKernel kernel(cfg.n, partition);

    std::vector<fredholm::Bump> bumps(partition.slice_count());
    std::vector<double> weight(bumps.size(), 0.0);
    for (const auto& b : sec.at("bumps")) {
        const int slice = b.at("slice").get<int>();
        if (slice < 1 || slice > partition.slice_count())
            throw ConfigError("characteristic bump slice out of range");
        bumps[slice - 1] = fredholm::Bump{b.value("center", 0.0), b.value("halfwidth", 1.0),
                                          b.value("amplitude", 1.0)};
        weight[slice - 1] = b.value("angle_weight", 1.0);
    }

    CsvWriter csv(out / "characteristic.csv", "theta,re,im,abs_diff", cfg.hash);
    for (double theta : thetas) {
        fredholm::TestFunctionSpec spec;
        spec.f = bumps;
        spec.theta.resize(bumps.size());
        for (std::size_t i = 0; i < bumps.size(); ++i) spec.theta[i] = theta * weight[i];
        const auto psi = fredholm::characteristic_pf(spec, kernel, nodes);
        double diff = std::numeric_limits<double>::quiet_NaN();
        if (cfg.n == 2 && partition.slice_count() <= 2) {
            const auto direct = fredholm::characteristic_direct(spec, kernel, cfg.quad);
            diff = std::abs(direct - psi);
        }
        csv.row({fmt(theta), fmt(psi.real()), fmt(psi.imag()), fmt(diff)});
    }
    return kExitOk;
}

int run_simulate(const LoadedConfig& cfg, const std::filesystem::path& out) {
    const auto& sec = cfg.j.at("simulate");
    montecarlo::SimulationConfig mc;
    mc.n = cfg.n;
    mc.horizon = cfg.horizon;
    mc.warmup = sec.value("warmup", 0.05);
    mc.dt = sec.value("dt", mc.warmup / 10.0);
    mc.paths = sec.value("paths", 10000L);
    mc.seed = cfg.seed;
    mc.metropolis_steps = sec.value("metropolis_steps", 1500);
    const double t = sec.value("time", cfg.horizon);
    const GridSpec grid = parse_grid(sec.at("bins"), "simulate.bins");
    try {
        mc.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("simulate: ") + e.what());
    }

    montecarlo::HistogramSpec hist{grid.min, grid.max, grid.count};
    auto est = montecarlo::estimate_onepoint(mc, t, hist);

    CsvWriter csv(out / "simulate.csv", "bin_lo,bin_hi,density,stderr", cfg.hash);
    for (int b = 0; b < est.bins(); ++b)
        csv.row({fmt(est.edges[b]), fmt(est.edges[b + 1]), fmt(est.density(b)),
                 fmt(est.standard_error(b))});
    return kExitOk;
}

int run_verify(const LoadedConfig& cfg, const std::filesystem::path& out) {
    verify::VerifyOptions opt;
    opt.seed = cfg.seed;
    if (cfg.j.contains("verify")) {
        const auto& sec = cfg.j.at("verify");
        opt.quick = sec.value("level", std::string("full")) == "quick";
        opt.mc_paths = sec.value("mc_paths", 100000L);
    }
    auto results = verify::run_verification(opt, &std::cout);

    CsvWriter csv(out / "verify.csv", "check,measured_error,tolerance,status", cfg.hash);
    for (const auto& r : results)
        csv.row({"\"" + r.name + "\"", fmt(r.measured), fmt(r.tolerance),
                 r.pass ? "pass" : "fail"});
    if (!verify::all_passed(results)) {
        for (const auto& r : results)
            if (!r.pass)
                std::cerr << "verification failed: " << r.name << " (measured " << r.measured
                          << ", tolerance " << r.tolerance << ")\n";
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace

int run(const RunRequest& req) {
    try {
        if (req.threads > 0) montecarlo::set_max_threads(req.threads);
        const LoadedConfig cfg = load(req);
        std::filesystem::path out(req.out_dir);
        std::error_code ec;
        std::filesystem::create_directories(out, ec);

        if (req.mode == "density") return run_density(cfg, out);
        if (req.mode == "correlate") return run_correlate(cfg, out);
        if (req.mode == "characteristic") return run_characteristic(cfg, out);
        if (req.mode == "simulate") return run_simulate(cfg, out);
        if (req.mode == "verify") return run_verify(cfg, out);
        throw ConfigError("unknown mode '" + req.mode + "'");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace nclab::experiment
