#pragma once

#include <vector>

#include "nclab/basis.hpp"
#include "nclab/skewlin.hpp"
#include "nclab/stochastic.hpp"

namespace nclab::kernels {

// One queried point: 1-based slice index into the partition plus a position.
// Points within one slice must be distinct; they need not be ordered (the
// pfaffian picks up compensating signs from rows and columns).
struct CorrelationQuery {
    struct Point {
        int slice;
        double x;
    };
    std::vector<Point> points;
};

struct CorrelationResult {
    double value = 0.0;
    bool clamped = false;  // true when a tiny negative pfaffian was snapped to 0
};

// R_k and Phi_k values of a single (slice, position), k = 0 .. count-1.
// Computed once per point and reused across kernel entries.
struct PointBasis {
    std::vector<double> r;
    std::vector<double> phi;
};

// The 2x2 matrix kernel of the non-colliding system:
//
//   A(mu,x; nu,y) = [  D(mu,x; nu,y)     St(nu,y; mu,x) ]
//                   [ -St(mu,x; nu,y)   -It(mu,x; nu,y) ]
//
// with D, S, I the N/2-term sums over R/Phi pairs weighted by 1/r_i, and the
// finite corrections St = S - p 1_{mu<nu}, It = I + W.
class CorrelationKernel {
public:
    CorrelationKernel(int n_particles, stochastic::TimePartition partition, int spare = 40);

    const basis::BasisContext& context() const { return ctx_; }
    const stochastic::TimePartition& partition() const { return partition_; }
    int n_particles() const { return ctx_.n_particles; }

    PointBasis point_basis(int mu, double x, int count) const;

    double kernel_d(int mu, double x, int nu, double y) const;
    double kernel_s(int mu, double x, int nu, double y) const;
    double kernel_i(int mu, double x, int nu, double y) const;

    // W(mu,x; nu,y) = <mu,x| p J p |nu,y>; closed form
    // erf((y - x) / sqrt(2 (2T - t_mu - t_nu))), degenerating to sgn(y - x)
    // when both slices sit at the horizon.
    double kernel_w(int mu, double x, int nu, double y) const;

    double kernel_s_tilde(int mu, double x, int nu, double y) const;
    double kernel_i_tilde(int mu, double x, int nu, double y) const;
    // It without the sgn jump of the (final, final) block; used by the
    // Fredholm discretization, which integrates the jump exactly.
    double kernel_i_tilde_smooth(int mu, double x, int nu, double y) const;

    // Tail-series routes (the infinite-sum representation truncated after
    // `terms` terms); `tail_bound` reports a measured geometric tail estimate.
    double kernel_s_tilde_series(int mu, double x, int nu, double y, int terms,
                                 double* tail_bound = nullptr) const;
    double kernel_i_tilde_series(int mu, double x, int nu, double y, int terms,
                                 double* tail_bound = nullptr) const;

    // Block matrix of A over the queried points; asserts global
    // skew-symmetry (tolerance 1e-9 relative to the largest entry).
    skewlin::SkewMatrix assemble_a(const CorrelationQuery& query) const;

    // rho = Pf(A(query)); values in (-1e-12, 0) clamp to 0 with a flag.
    CorrelationResult correlation(const CorrelationQuery& query) const;

    // One-point density rho_1(t_mu, x) = St(mu,x; mu,x).
    double one_point_density(int mu, double x) const;

private:
    basis::BasisContext ctx_;
    stochastic::TimePartition partition_;

    double pair_sum(const std::vector<double>& fx, const std::vector<double>& gy, int from,
                    int terms, double* tail_bound) const;
};

}  // namespace nclab::kernels
