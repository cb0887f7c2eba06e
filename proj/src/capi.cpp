#include "nclab.h"

#include <exception>
#include <string>

#include "nclab/experiment.hpp"
#include "nclab/kernels.hpp"
#include "nclab/montecarlo.hpp"
#include "nclab/skewlin.hpp"
#include "nclab/stochastic.hpp"
#include "nclab/version.hpp"

namespace {

thread_local std::string g_last_error;

nclab_status fail(nclab_status code, const char* what) {
    g_last_error = what;
    return code;
}

template <typename F>
nclab_status guarded(F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        return fail(NCLAB_ERR_INVALID, e.what());
    } catch (const std::domain_error& e) {
        return fail(NCLAB_ERR_INVALID, e.what());
    } catch (const std::exception& e) {
        return fail(NCLAB_ERR_NUMERICAL, e.what());
    }
}

}  // namespace

struct nclab_process {
    nclab::stochastic::TimePartition partition;
    nclab::kernels::CorrelationKernel kernel;
};

extern "C" {

const char* nclab_version(void) { return nclab::kVersion; }

const char* nclab_last_error(void) { return g_last_error.c_str(); }

void nclab_set_max_threads(int threads) { nclab::montecarlo::set_max_threads(threads); }

nclab_status nclab_heat_kernel(double t, double x, double y, double* out) {
    if (!out) return fail(NCLAB_ERR_INVALID, "null output pointer");
    return guarded([&] {
        *out = nclab::stochastic::heat_kernel(t, x, y);
        return NCLAB_OK;
    });
}

nclab_status nclab_survival_probability(double t, const double* xs, int n, double* out) {
    if (!out || !xs || n < 1) return fail(NCLAB_ERR_INVALID, "null or empty input");
    return guarded([&] {
        nclab::stochastic::OrderedConfiguration cfg(std::vector<double>(xs, xs + n));
        *out = nclab::stochastic::survival_probability(t, cfg);
        return NCLAB_OK;
    });
}

nclab_status nclab_pfaffian(const double* row_major, int n, double* out) {
    if (!out || !row_major || n < 1) return fail(NCLAB_ERR_INVALID, "null or empty input");
    return guarded([&] {
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = row_major[static_cast<std::size_t>(i) * n + j];
        *out = nclab::skewlin::pfaffian(nclab::skewlin::SkewMatrix(a));
        return NCLAB_OK;
    });
}

nclab_status nclab_process_create(int n_particles, double horizon, const double* times,
                                  int n_times, nclab_process** out) {
    if (!out || !times || n_times < 1) return fail(NCLAB_ERR_INVALID, "null or empty input");
    *out = nullptr;
    return guarded([&] {
        nclab::stochastic::TimePartition partition(horizon,
                                                   std::vector<double>(times, times + n_times));
        auto kernel = nclab::kernels::CorrelationKernel(n_particles, partition);
        *out = new nclab_process{std::move(partition), std::move(kernel)};
        return NCLAB_OK;
    });
}

void nclab_process_destroy(nclab_process* process) { delete process; }

nclab_status nclab_process_onepoint(const nclab_process* process, int slice, double x,
                                    double* out) {
    if (!process || !out) return fail(NCLAB_ERR_INVALID, "null handle or output");
    return guarded([&] {
        if (slice < 1 || slice > process->partition.slice_count())
            throw std::invalid_argument("slice index out of range");
        *out = process->kernel.one_point_density(slice, x);
        return NCLAB_OK;
    });
}

nclab_status nclab_process_correlation(const nclab_process* process, int n_points,
                                       const int* slices, const double* positions, double* out) {
    if (!process || !out || !slices || !positions || n_points < 1)
        return fail(NCLAB_ERR_INVALID, "null handle or empty query");
    return guarded([&] {
        nclab::kernels::CorrelationQuery query;
        query.points.reserve(static_cast<std::size_t>(n_points));
        for (int i = 0; i < n_points; ++i) query.points.push_back({slices[i], positions[i]});
        *out = process->kernel.correlation(query).value;
        return NCLAB_OK;
    });
}

int nclab_run(const char* mode, const char* config_path, const char* out_dir, int threads,
              uint64_t seed, int has_seed) {
    if (!mode || !config_path) {
        g_last_error = "null mode or config path";
        return NCLAB_ERR_INVALID;
    }
    nclab::experiment::RunRequest req;
    req.mode = mode;
    req.config_path = config_path;
    req.out_dir = out_dir ? out_dir : ".";
    req.threads = threads;
    if (has_seed) req.seed = seed;
    return nclab::experiment::run(req);
}

}  // extern "C"
