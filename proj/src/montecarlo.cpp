#include "nclab/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace nclab::montecarlo {

namespace {

std::atomic<int> g_max_threads{0};

int effective_threads() {
    const int cap = g_max_threads.load();
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int base = hw > 0 ? hw : 1;
    return cap > 0 ? std::min(cap, base) : base;
}

// log of the unnormalized warm-up marginal h_N(y) prod p_delta(0, y_i) * N(T-delta; y)
double log_target(const std::vector<double>& y, const SimulationConfig& c) {
    double lg = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        for (std::size_t j = i + 1; j < y.size(); ++j) {
            const double gap = y[j] - y[i];
            if (!(gap > 0.0)) return -std::numeric_limits<double>::infinity();
            lg += std::log(gap);
        }
        lg += -y[i] * y[i] / (2.0 * c.warmup);
    }
    if (c.n > 1) {
        stochastic::OrderedConfiguration cfg{std::vector<double>(y)};
        const double surv = stochastic::survival_probability(c.horizon - c.warmup, cfg);
        if (!(surv > 0.0)) return -std::numeric_limits<double>::infinity();
        lg += std::log(surv);
    }
    return lg;
}

// Per-path work shared by the estimators: draw a start, propagate, and hand
// the grid to the accumulator. Workers own disjoint path residues and the
// per-path streams depend only on (seed, path), so results do not depend on
// the worker count.
template <typename Consume>
void run_paths(const SimulationConfig& config, int workers, Consume&& consume) {
    config.validate();
    auto worker = [&](int w) {
        for (long p = w; p < config.paths; p += workers) {
            rng::Stream stream(rng::stream_seed(config.seed, static_cast<std::uint64_t>(p)));
            const std::vector<double> start = sample_initial(config, stream, nullptr);
            const auto path = propagate_conditioned(start, config, stream, nullptr);
            consume(p, path);
        }
    };

    if (workers <= 1) {
        worker(0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
}

}  // namespace

void set_max_threads(int threads) { g_max_threads.store(threads); }
int max_threads() { return effective_threads(); }

void SimulationConfig::validate() const {
    if (n < 1 || (n > 1 && n % 2 != 0))
        throw std::invalid_argument("SimulationConfig: particle count must be even (or 1)");
    if (!(horizon > 0.0)) throw std::invalid_argument("SimulationConfig: horizon must be positive");
    if (!(warmup > 0.0 && warmup <= 0.5 * horizon))
        throw std::invalid_argument("SimulationConfig: need 0 < warmup << horizon");
    if (!(dt > 0.0 && dt <= warmup / 10.0))
        throw std::invalid_argument("SimulationConfig: need dt <= warmup / 10");
    if (paths < 1) throw std::invalid_argument("SimulationConfig: need at least one path");
    if (metropolis_steps < 1000)
        throw std::invalid_argument("SimulationConfig: burn-in must be >= 1000 steps");
}

int SimulationConfig::step_count() const {
    return static_cast<int>(std::ceil((horizon - warmup) / dt - 1e-12));
}

double SimulationConfig::step() const { return (horizon - warmup) / step_count(); }

std::vector<double> sample_initial(const SimulationConfig& config, rng::Stream& stream,
                                   MetropolisDiagnostics* diag) {
    const int n = config.n;
    const double sigma =
        config.proposal_scale > 0.0 ? config.proposal_scale : 0.7 * std::sqrt(config.warmup);

    // spread start across the chamber at the warm-up scale
    std::vector<double> state(n);
    for (int i = 0; i < n; ++i)
        state[i] = (i - 0.5 * (n - 1)) * 1.5 * std::sqrt(config.warmup);
    double lt = log_target(state, config);

    std::vector<double> proposal(n);
    long accepted = 0;
    for (int step = 0; step < config.metropolis_steps; ++step) {
        for (int i = 0; i < n; ++i) proposal[i] = state[i] + sigma * stream.normal();
        std::sort(proposal.begin(), proposal.end());
        const double lp = log_target(proposal, config);
        if (lp - lt >= 0.0 || stream.uniform() < std::exp(lp - lt)) {
            state = proposal;
            lt = lp;
            ++accepted;
        }
    }
    if (diag) {
        diag->acceptance_rate = static_cast<double>(accepted) / config.metropolis_steps;
        diag->warned = diag->acceptance_rate < 0.1 || diag->acceptance_rate > 0.7;
    }
    return state;
}

stochastic::OrderedConfiguration sample_initial(const SimulationConfig& config,
                                                MetropolisDiagnostics* diag) {
    config.validate();
    rng::Stream stream(rng::stream_seed(config.seed, 0));
    return stochastic::OrderedConfiguration(sample_initial(config, stream, diag));
}

namespace {

// One propagation attempt; fills `path` and reports whether the ordering
// survived every step and every in-between bridge test.
bool attempt_path(const std::vector<double>& start, const SimulationConfig& config,
                  rng::Stream& stream, std::vector<std::vector<double>>& path) {
    const int n = config.n;
    const int steps = config.step_count();
    const double h = config.step();
    const double sqrt_h = std::sqrt(h);
    path[0] = start;
    for (int k = 1; k <= steps; ++k) {
        auto& prev = path[k - 1];
        auto& cur = path[k];
        for (int i = 0; i < n; ++i) cur[i] = prev[i] + sqrt_h * stream.normal();
        for (int i = 0; i + 1 < n; ++i) {
            if (!(cur[i] < cur[i + 1])) return false;
            // The gap of an adjacent pair diffuses with coefficient 2, so the
            // bridge from gap a to gap b crosses zero in between with
            // probability exp(-2ab / (2h)) = exp(-ab/h).
            const double a = prev[i + 1] - prev[i];
            const double b = cur[i + 1] - cur[i];
            if (stream.uniform() < std::exp(-a * b / h)) return false;
        }
    }
    return true;
}

}  // namespace

std::vector<std::vector<double>> propagate_conditioned(const std::vector<double>& start,
                                                       const SimulationConfig& config,
                                                       rng::Stream& stream, long* rejections) {
    const int n = config.n;
    if (static_cast<int>(start.size()) != n)
        throw std::invalid_argument("propagate_conditioned: start size mismatch");
    for (int i = 0; i + 1 < n; ++i)
        if (!(start[i] < start[i + 1]))
            throw std::invalid_argument("propagate_conditioned: start must be ordered");

    std::vector<std::vector<double>> path(static_cast<std::size_t>(config.step_count()) + 1,
                                          std::vector<double>(n));
    long rejected = 0;
    while (!attempt_path(start, config, stream, path)) {
        if (++rejected > 1000000)
            throw std::runtime_error(
                "propagate_conditioned: more than 1e6 rejections from one start; "
                "conditioning too severe, consider a larger warmup");
    }
    if (rejections) *rejections = rejected;
    return path;
}

double acceptance_probability(const std::vector<double>& start, const SimulationConfig& config,
                              long trials) {
    if (trials < 1) throw std::invalid_argument("acceptance_probability: need trials >= 1");
    rng::Stream stream(rng::stream_seed(config.seed, 0x9e3779b9ULL));
    std::vector<std::vector<double>> path(static_cast<std::size_t>(config.step_count()) + 1,
                                          std::vector<double>(config.n));
    long accepted = 0;
    for (long t = 0; t < trials; ++t)
        if (attempt_path(start, config, stream, path)) ++accepted;
    return static_cast<double>(accepted) / static_cast<double>(trials);
}

double EnsembleEstimate::density(int b) const {
    return static_cast<double>(count[b]) / (static_cast<double>(paths) * width(b));
}

double EnsembleEstimate::standard_error(int b) const {
    // standard error of the per-path mean count, scaled to density units
    const double np = static_cast<double>(paths);
    const double mean = static_cast<double>(count[b]) / np;
    const double se_mean_sq =
        (static_cast<double>(count_sq[b]) / np - mean * mean) / (np - 1.0);
    return std::sqrt(std::max(se_mean_sq, 0.0)) / width(b);
}

namespace {

int snapshot_index(const SimulationConfig& config, double t) {
    const double h = config.step();
    const double pos = (t - config.warmup) / h;
    const int idx = static_cast<int>(std::lround(pos));
    if (idx < 0 || idx > config.step_count() || std::abs(pos - idx) > 1e-9)
        throw std::invalid_argument("observation time must sit on the simulation grid");
    return idx;
}

}  // namespace

EnsembleEstimate estimate_onepoint(const SimulationConfig& config, double t,
                                   const HistogramSpec& hist) {
    if (hist.bins < 1 || !(hist.lo < hist.hi))
        throw std::invalid_argument("estimate_onepoint: malformed histogram");
    const int idx = snapshot_index(config, t);

    EnsembleEstimate est;
    est.paths = config.paths;
    est.edges.resize(hist.bins + 1);
    for (int b = 0; b <= hist.bins; ++b)
        est.edges[b] = hist.lo + (hist.hi - hist.lo) * b / hist.bins;
    est.count.assign(hist.bins, 0);
    est.count_sq.assign(hist.bins, 0);

    const int workers = std::min<long>(effective_threads(), config.paths);
    std::vector<std::vector<std::uint64_t>> cnt(workers), sq(workers);
    for (int w = 0; w < workers; ++w) {
        cnt[w].assign(hist.bins, 0);
        sq[w].assign(hist.bins, 0);
    }

    run_paths(config, workers, [&](long p, const auto& path) {
        const int w = static_cast<int>(p % workers);
        std::vector<int> local(hist.bins, 0);
        for (double x : path[idx]) {
            const double pos = (x - hist.lo) / (hist.hi - hist.lo) * hist.bins;
            if (pos >= 0.0 && pos < hist.bins) ++local[static_cast<int>(pos)];
        }
        for (int b = 0; b < hist.bins; ++b) {
            cnt[w][b] += local[b];
            sq[w][b] += static_cast<std::uint64_t>(local[b]) * local[b];
        }
    });
    for (int w = 0; w < workers; ++w)
        for (int b = 0; b < hist.bins; ++b) {
            est.count[b] += cnt[w][b];
            est.count_sq[b] += sq[w][b];
        }
    return est;
}

double TwoTimeEstimate::mean(int i) const {
    return static_cast<double>(product[i]) / static_cast<double>(paths);
}

double TwoTimeEstimate::standard_error(int i) const {
    const double np = static_cast<double>(paths);
    const double m = mean(i);
    const double se_mean_sq =
        (static_cast<double>(product_sq[i]) / np - m * m) / (np - 1.0);
    return std::sqrt(std::max(se_mean_sq, 0.0));
}

TwoTimeEstimate estimate_twotime(const SimulationConfig& config, double t_a, double t_b,
                                 const std::vector<BoxPair>& boxes) {
    if (!(t_a < t_b)) throw std::invalid_argument("estimate_twotime: need t_a < t_b");
    const int ia = snapshot_index(config, t_a);
    const int ib = snapshot_index(config, t_b);
    const int nb = static_cast<int>(boxes.size());

    TwoTimeEstimate est;
    est.boxes = boxes;
    est.paths = config.paths;
    est.product.assign(nb, 0);
    est.product_sq.assign(nb, 0);

    const int workers = std::min<long>(effective_threads(), config.paths);
    std::vector<std::vector<std::uint64_t>> prod(workers), sq(workers);
    for (int w = 0; w < workers; ++w) {
        prod[w].assign(nb, 0);
        sq[w].assign(nb, 0);
    }

    run_paths(config, workers, [&](long p, const auto& path) {
        const int w = static_cast<int>(p % workers);
        for (int i = 0; i < nb; ++i) {
            int na = 0, nbk = 0;
            for (double x : path[ia])
                if (x >= boxes[i].a_lo && x < boxes[i].a_hi) ++na;
            for (double x : path[ib])
                if (x >= boxes[i].b_lo && x < boxes[i].b_hi) ++nbk;
            const std::uint64_t v = static_cast<std::uint64_t>(na) * nbk;
            prod[w][i] += v;
            sq[w][i] += v * v;
        }
    });
    for (int w = 0; w < workers; ++w)
        for (int i = 0; i < nb; ++i) {
            est.product[i] += prod[w][i];
            est.product_sq[i] += sq[w][i];
        }
    return est;
}

}  // namespace nclab::montecarlo
