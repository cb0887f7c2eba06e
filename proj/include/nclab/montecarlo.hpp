#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nclab/rng.hpp"
#include "nclab/stochastic.hpp"

namespace nclab::montecarlo {

// Sampler settings. The process starts glued at the origin, so paths begin
// at a small warm-up time delta where the entrance law is available in
// closed form; from there free increments are filtered by rejection.
struct SimulationConfig {
    int n = 2;                       // particle count (even; 1 allowed for checks)
    double horizon = 1.0;            // T
    double warmup = 0.05;            // delta
    double dt = 0.005;               // step, at most warmup / 10
    long paths = 10000;
    std::uint64_t seed = 1;
    int metropolis_steps = 1500;     // burn-in per chain (>= 1000)
    double proposal_scale = 0.0;     // 0 = auto (0.7 sqrt(warmup))

    void validate() const;
    int step_count() const;          // uniform steps covering [warmup, horizon]
    double step() const;             // actual step size used
};

struct MetropolisDiagnostics {
    double acceptance_rate = 0.0;
    bool warned = false;  // acceptance outside [0.1, 0.7]
};

// One draw from the warm-up marginal (the entrance law at time delta) by
// random-walk Metropolis with proposals reflected into the chamber by
// sorting. Deterministic given the stream.
std::vector<double> sample_initial(const SimulationConfig& config, rng::Stream& stream,
                                   MetropolisDiagnostics* diag = nullptr);

// Convenience overload: fresh stream from the config seed.
stochastic::OrderedConfiguration sample_initial(const SimulationConfig& config,
                                                MetropolisDiagnostics* diag = nullptr);

// Free Euler increments on [warmup, horizon] from a fixed start; a path is
// rejected and redrawn from the same start whenever the ordering breaks at a
// grid point or the pairwise bridge-crossing test fires in between. The
// returned matrix holds the configuration at every grid time (step_count()+1
// rows including the start).
std::vector<std::vector<double>> propagate_conditioned(const std::vector<double>& start,
                                                       const SimulationConfig& config,
                                                       rng::Stream& stream,
                                                       long* rejections = nullptr);

// Acceptance frequency of the rejection filter from a fixed start; estimates
// the survival probability over [warmup, horizon].
double acceptance_probability(const std::vector<double>& start, const SimulationConfig& config,
                              long trials);

struct EnsembleEstimate {
    std::vector<double> edges;            // bin edges, size bins+1
    std::vector<std::uint64_t> count;     // summed per-path counts
    std::vector<std::uint64_t> count_sq;  // summed squared per-path counts
    long paths = 0;

    int bins() const { return static_cast<int>(count.size()); }
    double width(int b) const { return edges[b + 1] - edges[b]; }
    // normalized so the integral over the line equals the particle number
    double density(int b) const;
    double standard_error(int b) const;
};

struct HistogramSpec {
    double lo = -3.0;
    double hi = 3.0;
    int bins = 60;
};

// Histogram of all particle positions at time t across paths.
EnsembleEstimate estimate_onepoint(const SimulationConfig& config, double t,
                                   const HistogramSpec& hist);

struct BoxPair {
    double a_lo, a_hi;  // box at the earlier time
    double b_lo, b_hi;  // box at the later time
};

struct TwoTimeEstimate {
    std::vector<BoxPair> boxes;
    std::vector<std::uint64_t> product;     // sum over paths of n_A * n_B
    std::vector<std::uint64_t> product_sq;
    long paths = 0;

    double mean(int i) const;
    double standard_error(int i) const;
};

// Empirical pair intensity over boxes at two observation times.
TwoTimeEstimate estimate_twotime(const SimulationConfig& config, double t_a, double t_b,
                                 const std::vector<BoxPair>& boxes);

// Parallelism cap shared by the path loops (and grid evaluations elsewhere).
void set_max_threads(int threads);
int max_threads();

}  // namespace nclab::montecarlo
