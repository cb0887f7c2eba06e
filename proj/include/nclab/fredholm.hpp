#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "nclab/kernels.hpp"
#include "nclab/quadrature.hpp"

namespace nclab::fredholm {

using Complex = std::complex<double>;

// Smooth compactly supported test function a * exp(1 - 1/(1 - u^2)) on
// |u| < 1, u = (x - center)/halfwidth.
struct Bump {
    double center = 0.0;
    double halfwidth = 1.0;
    double amplitude = 1.0;

    double operator()(double x) const {
        const double u = (x - center) / halfwidth;
        const double uu = u * u;
        if (uu >= 1.0) return 0.0;
        return amplitude * std::exp(1.0 - 1.0 / (1.0 - uu));
    }
};

// One bounded test function and one angle per time slice;
// chi_mu(x) = exp(i theta_mu f_mu(x)) - 1.
struct TestFunctionSpec {
    std::vector<double> theta;
    std::vector<Bump> f;

    Complex chi(int mu, double x) const;  // 1-based slice index
    bool active(int mu) const;
    void validate(int slice_count) const;
};

// Per-slice Gauss-Legendre grids plus a weighted kernel matrix in the
// symmetric folding K(p,q) = s_p A(z_p, z_q) s_q with s = sqrt(w * chi).
// The reference operator is the block-diagonal J_2 over the nodes.
struct DiscretizedKernel {
    std::vector<int> slice;                            // 1-based, per grid
    std::vector<quadrature::GaussLegendre> grids;
    std::vector<double> nodes;                         // flattened
    std::vector<int> node_slice;                       // slice per node
    Eigen::MatrixXcd k;

    int point_count() const { return static_cast<int>(nodes.size()); }
    int dim() const { return static_cast<int>(k.rows()); }

    Eigen::MatrixXcd j_block() const;  // block-diagonal J_2, dim x dim
};

// Quadrature discretization of the characteristic-function kernel
// J_2 delta + A(x,y) chi; exactly skew. The sgn jump of the final-slice
// I-tilde entry is folded in through exact product-integration weights,
// everything else is plain symmetric weight folding.
DiscretizedKernel discretize(const kernels::CorrelationKernel& kernel,
                             const TestFunctionSpec& spec, int nodes_per_slice);

// Wrap an explicit weighted matrix (already in the folded convention).
DiscretizedKernel from_matrix(Eigen::MatrixXcd k);

// Replace K by J^{-1} K (the determinant-side kernel of the pfaffian one).
DiscretizedKernel jinv(const DiscretizedKernel& disc);

// Det(I + K) of the discretized operator.
Complex fredholm_det(const DiscretizedKernel& disc);

// Pf(J + K); K must be skew. The pfaffian of a skew matrix is a polynomial
// in its entries, so the branch is fixed and PF(J) = 1 holds automatically.
Complex fredholm_pf(const DiscretizedKernel& disc);

// Multi-time characteristic function via the Fredholm pfaffian.
Complex characteristic_pf(const TestFunctionSpec& spec, const kernels::CorrelationKernel& kernel,
                          int nodes_per_slice);

// Desk-scale oracle: the ratio Z[chi]/Z[0] of the defining integrals,
// evaluated by quadrature. Requires N = 2 and at most two observation times.
Complex characteristic_direct(const TestFunctionSpec& spec,
                              const kernels::CorrelationKernel& kernel,
                              const quadrature::QuadratureSpec& quad);

}  // namespace nclab::fredholm
