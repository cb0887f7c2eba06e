#pragma once

#include <vector>

#include "nclab/quadrature.hpp"

namespace nclab::stochastic {

// Observation times 0 < t_1 < ... < t_{M+1} = T. A single time equal to the
// horizon is the smallest valid partition.
struct TimePartition {
    double horizon;
    std::vector<double> times;

    TimePartition(double horizon, std::vector<double> times);

    int intermediate_count() const { return static_cast<int>(times.size()) - 1; }  // M
    int slice_count() const { return static_cast<int>(times.size()); }             // M + 1
    double time(int mu) const { return times.at(static_cast<std::size_t>(mu) - 1); }  // 1-based
};

// A point of the Weyl chamber: strictly increasing positions.
struct OrderedConfiguration {
    std::vector<double> x;

    explicit OrderedConfiguration(std::vector<double> positions);

    int size() const { return static_cast<int>(x.size()); }
};

// p_t(x, y) = exp(-(x-y)^2 / 2t) / sqrt(2 pi t); t must be positive (the t=0
// delta is always resolved analytically by callers).
double heat_kernel(double t, double x, double y);

// Karlin-McGregor determinant det[p_t(x_i, y_j)].
double km_determinant(double t, const OrderedConfiguration& x, const OrderedConfiguration& y);

// Probability that N ordered Brownian particles started at x keep their order
// up to time t: the de Bruijn reduction gives Pf[e(x_j - x_i, t)] with the
// pairwise entry e(d, t) = erf(d / (2 sqrt(t))). Even N only.
double survival_probability(double t, const OrderedConfiguration& x);

// Vandermonde product h_N(x) = prod_{i<j} (x_j - x_i).
double vandermonde(const std::vector<double>& x);

// Transition density of the non-colliding system on [0, T]:
//   f_N(t-s; x, y) * N(T-t; y) / N(T-s; x),  with N(0; .) = 1.
// Requires 0 < s < t <= T. Reports underflow of the result through the
// optional flag; a vanishing conditioning denominator is an error.
double transition_density(double s, const OrderedConfiguration& x, double t,
                          const OrderedConfiguration& y, double horizon,
                          bool* underflow = nullptr);

// Entrance law from the origin: C(N,T,t) h_N(y) prod_i p_t(0, y_i) N(T-t; y),
// C(N,T,t) = pi^{N/2} (prod_j Gamma(j/2))^{-1} T^{N(N-1)/4} t^{-N(N-1)/2}.
double initial_transition_density(double t, const OrderedConfiguration& y, double horizon,
                                  bool* underflow = nullptr);

double log_normalization_constant(int n, double horizon, double t);

// Joint density of the observations at all partition times, started at the
// origin. `configs` holds one configuration per slice.
double multitime_density(const TimePartition& partition,
                         const std::vector<OrderedConfiguration>& configs);

// Symmetric extension of the joint density to arbitrary (unordered) slice
// coordinates; the sgn factor at the final slice makes it permutation
// invariant slice by slice.
double multitime_density_sym(const TimePartition& partition,
                             const std::vector<std::vector<double>>& slices);

// Correlation function straight from its defining integral: fix the queried
// points, integrate the remaining N - N_mu coordinates of each slice over the
// full line with 1/(N - N_mu)! symmetry factors. Desk-scale oracle: refuses
// N > 4 or more than 4 integration dimensions.
double correlation_bruteforce(const TimePartition& partition, int n_particles,
                              const std::vector<std::vector<double>>& fixed_per_slice,
                              const quadrature::QuadratureSpec& quad);

}  // namespace nclab::stochastic
