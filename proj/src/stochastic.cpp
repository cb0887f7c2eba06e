#include "nclab/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nclab/skewlin.hpp"

namespace nclab::stochastic {

namespace {

constexpr double kUnderflowFloor = 1e-300;

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

double report(double value, bool* underflow) {
    if (std::abs(value) < kUnderflowFloor) {
        if (underflow) *underflow = true;
        return 0.0;
    }
    return value;
}

}  // namespace

TimePartition::TimePartition(double horizon_in, std::vector<double> times_in)
    : horizon(horizon_in), times(std::move(times_in)) {
    if (!(horizon > 0.0)) throw std::invalid_argument("TimePartition: horizon must be positive");
    if (times.empty()) throw std::invalid_argument("TimePartition: need at least one time");
    double prev = 0.0;
    for (double t : times) {
        if (!(t > prev)) throw std::invalid_argument("TimePartition: times must be increasing and positive");
        prev = t;
    }
    if (times.back() != horizon)
        throw std::invalid_argument("TimePartition: final time must equal the horizon exactly");
}

OrderedConfiguration::OrderedConfiguration(std::vector<double> positions) : x(std::move(positions)) {
    if (x.empty()) throw std::invalid_argument("OrderedConfiguration: empty configuration");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1]))
            throw std::invalid_argument("OrderedConfiguration: positions must be strictly increasing");
}

double heat_kernel(double t, double x, double y) {
    if (!(t > 0.0)) throw std::domain_error("heat_kernel: time must be positive");
    const double d = x - y;
    return std::exp(-d * d / (2.0 * t)) / std::sqrt(2.0 * M_PI * t);
}

double km_determinant(double t, const OrderedConfiguration& x, const OrderedConfiguration& y) {
    if (x.size() != y.size()) throw std::invalid_argument("km_determinant: size mismatch");
    if (!(t > 0.0)) throw std::domain_error("km_determinant: time must be positive");
    const int n = x.size();
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = heat_kernel(t, x.x[i], y.x[j]);
    if (n == 1) return m(0, 0);
    return m.partialPivLu().determinant();
}

double survival_probability(double t, const OrderedConfiguration& x) {
    if (!(t > 0.0)) throw std::domain_error("survival_probability: time must be positive");
    const int n = x.size();
    if (n % 2 != 0)
        throw std::invalid_argument("survival_probability: odd particle numbers unsupported");
    const double inv = 0.5 / std::sqrt(t);
    if (n == 2) return std::erf((x.x[1] - x.x[0]) * inv);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            a(i, j) = std::erf((x.x[j] - x.x[i]) * inv);
            a(j, i) = -a(i, j);
        }
    }
    return skewlin::pfaffian(skewlin::SkewMatrix(a));
}

double vandermonde(const std::vector<double>& x) {
    double h = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) h *= x[j] - x[i];
    return h;
}

double transition_density(double s, const OrderedConfiguration& x, double t,
                          const OrderedConfiguration& y, double horizon, bool* underflow) {
    if (x.size() != y.size()) throw std::invalid_argument("transition_density: size mismatch");
    if (!(0.0 < s && s < t && t <= horizon))
        throw std::invalid_argument("transition_density: need 0 < s < t <= T");
    const double denom = survival_probability(horizon - s, x);
    if (denom < kUnderflowFloor)
        throw std::runtime_error("transition_density: ill-conditioned conditioning (survival underflow)");
    const double tail = (t == horizon) ? 1.0 : survival_probability(horizon - t, y);
    return report(km_determinant(t - s, x, y) * tail / denom, underflow);
}

double log_normalization_constant(int n, double horizon, double t) {
    if (!(t > 0.0)) throw std::domain_error("log_normalization_constant: time must be positive");
    double lg = 0.0;
    for (int j = 1; j <= n; ++j) lg += std::lgamma(0.5 * j);
    return 0.5 * n * std::log(M_PI) - lg + 0.25 * n * (n - 1) * std::log(horizon) -
           0.5 * n * (n - 1) * std::log(t);
}

double initial_transition_density(double t, const OrderedConfiguration& y, double horizon,
                                  bool* underflow) {
    if (!(0.0 < t && t <= horizon))
        throw std::invalid_argument("initial_transition_density: need 0 < t <= T");
    const int n = y.size();
    if (n % 2 != 0)
        throw std::invalid_argument("initial_transition_density: odd particle numbers unsupported");
    double v = std::exp(log_normalization_constant(n, horizon, t)) * vandermonde(y.x);
    for (double yi : y.x) v *= heat_kernel(t, 0.0, yi);
    if (t < horizon) v *= survival_probability(horizon - t, y);
    return report(v, underflow);
}

namespace {

double multitime_density_core(const TimePartition& partition,
                              const std::vector<std::vector<double>>& slices, double constant) {
    const int m_plus_1 = partition.slice_count();
    const int n = static_cast<int>(slices.front().size());
    const double t1 = partition.time(1);

    double v = constant * vandermonde(slices.front());
    v *= static_cast<double>(sgn(vandermonde(slices.back())));
    if (v == 0.0) return 0.0;
    for (double xi : slices.front()) v *= heat_kernel(t1, 0.0, xi);

    Eigen::MatrixXd m(n, n);
    for (int mu = 1; mu < m_plus_1; ++mu) {
        const double dt = partition.time(mu + 1) - partition.time(mu);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = heat_kernel(dt, slices[mu - 1][i], slices[mu][j]);
        v *= (n == 2) ? m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) : m.partialPivLu().determinant();
    }
    return v;
}

void check_multitime_args(const TimePartition& partition,
                          const std::vector<std::vector<double>>& slices) {
    if (static_cast<int>(slices.size()) != partition.slice_count())
        throw std::invalid_argument("multitime_density: one configuration per observation time");
    const int n = static_cast<int>(slices.front().size());
    if (n % 2 != 0)
        throw std::invalid_argument("multitime_density: odd particle numbers unsupported");
    for (const auto& s : slices)
        if (static_cast<int>(s.size()) != n)
            throw std::invalid_argument("multitime_density: slice size mismatch");
}

}  // namespace

double multitime_density_sym(const TimePartition& partition,
                             const std::vector<std::vector<double>>& slices) {
    check_multitime_args(partition, slices);
    const int n = static_cast<int>(slices.front().size());
    const double constant =
        std::exp(log_normalization_constant(n, partition.horizon, partition.time(1)));
    return multitime_density_core(partition, slices, constant);
}

double multitime_density(const TimePartition& partition,
                         const std::vector<OrderedConfiguration>& configs) {
    std::vector<std::vector<double>> slices;
    slices.reserve(configs.size());
    for (const auto& c : configs) slices.push_back(c.x);
    return multitime_density_sym(partition, slices);
}

namespace {

struct FreeVar {
    int slice;     // 0-based slice index
    bool ordered;  // integrate over a strictly decreasing chain at its slice
};

// Nested adaptive integration over the free coordinates.
// Final-slice variables sit innermost. When the final slice has no queried
// points, its free coordinates run over the ordered region (which absorbs the
// 1/k! symmetry factor and removes the sgn kink); otherwise they get
// breakpoints at the coordinates already placed in that slice.
double integrate_free(const TimePartition& partition, std::vector<std::vector<double>>& slices,
                      const std::vector<FreeVar>& vars, std::size_t level, double constant,
                      double tol) {
    if (level == vars.size()) return multitime_density_core(partition, slices, constant);

    const int s = vars[level].slice;
    auto f = [&](double u) {
        slices[s].push_back(u);
        const double v =
            integrate_free(partition, slices, vars, level + 1, constant, tol / 3.0);
        slices[s].pop_back();
        return v;
    };

    const double inf = std::numeric_limits<double>::infinity();
    if (vars[level].ordered) {
        const double upper = slices[s].empty() ? inf : slices[s].back();
        return quadrature::integrate(f, -inf, upper, tol);
    }
    if (s == partition.slice_count() - 1 && !slices[s].empty()) {
        std::vector<double> breaks = slices[s];
        return quadrature::integrate_with_breakpoints(f, std::move(breaks), tol);
    }
    return quadrature::integrate_line(f, tol);
}

}  // namespace

double correlation_bruteforce(const TimePartition& partition, int n_particles,
                              const std::vector<std::vector<double>>& fixed_per_slice,
                              const quadrature::QuadratureSpec& quad) {
    quad.validate();
    const int m_plus_1 = partition.slice_count();
    if (static_cast<int>(fixed_per_slice.size()) != m_plus_1)
        throw std::invalid_argument("correlation_bruteforce: one (possibly empty) point list per slice");
    if (n_particles > 4)
        throw std::invalid_argument("correlation_bruteforce: refusing N > 4 (desk-scale oracle)");

    int free_dims = 0;
    std::vector<FreeVar> vars;
    double symmetry_factor = 1.0;
    for (int s = 0; s < m_plus_1; ++s) {
        const int fixed = static_cast<int>(fixed_per_slice[s].size());
        if (fixed > n_particles)
            throw std::invalid_argument("correlation_bruteforce: more query points than particles");
        const int free_here = n_particles - fixed;
        free_dims += free_here;
        // Ascending slice order leaves the final-slice variables innermost.
        const bool ordered = (s == m_plus_1 - 1) && (fixed == 0) && (free_here >= 2);
        for (int k = 0; k < free_here; ++k) vars.push_back({s, ordered});
        if (!ordered) symmetry_factor /= std::tgamma(static_cast<double>(free_here) + 1.0);
    }
    if (free_dims > 4)
        throw std::invalid_argument(
            "correlation_bruteforce: refusing integration dimension > 4 (desk-scale oracle)");

    std::vector<std::vector<double>> slices = fixed_per_slice;
    const double constant = std::exp(
        log_normalization_constant(n_particles, partition.horizon, partition.time(1)));
    const double value = integrate_free(partition, slices, vars, 0, constant, quad.abs_tol);
    return symmetry_factor * value;
}

}  // namespace nclab::stochastic
