#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nclab/quadrature.hpp"
#include "nclab/stochastic.hpp"

namespace nclab::basis {

// Physicists' Hermite polynomial H_i(x) by the three-term recurrence.
double hermite(int i, double x);

// Scaled Hermite value lambda^n H_n(xi / lambda) computed through the
// recurrence h_{n+1} = 2 xi h_n - 2 n lambda_sq h_{n-1}, which stays real for
// either sign of lambda_sq. This is exactly the Gaussian average
// E[H_n(Z)] for Z ~ N(xi, s^2) when lambda_sq = 1 - 2 s^2.
double hermite_scaled(int n, double xi, double lambda_sq);

// Coupling coefficients: alpha_ij = 2^{-i} c1^i delta_ij for even i and
// 2^{-i} c1^i (delta_ij - 2(i-1) delta_{i-2,j}) for odd i.
double alpha_coeff(int i, int j, double c1);

// Everything derived from (N, T, t1): the scale constants, the
// skew-normalizations r_i and b_i, the polynomial family M_i, and the
// antiderivative tables behind the Phi evaluators. Immutable after `make`.
struct BasisContext {
    int n_particles = 0;
    double horizon = 0.0;
    double t1 = 0.0;
    double c1 = 0.0;        // sqrt(t1 (2T - t1) / T)
    double z1 = 0.0;        // sqrt((2T - t1) / t1)
    int fn_count = 0;       // basis functions available: k = 0 .. fn_count-1

    std::vector<double> r;  // r_i = Gamma(i+1/2) Gamma(i+1) (t1^2/T)^{2i+1/2} / pi
    std::vector<double> b;  // b_k = r_{floor(k/2)}^{-1/2}

    // Monomial coefficients of M_i (degree i, leading coefficient b_i).
    std::vector<std::vector<double>> m_monomial;

    // Final-slice antiderivative tables: with beta = t1 / (T c1), the
    // cumulative integral of p_T(0,.) H_n(beta .) is
    //   A_n(z) = moment[n] * Phi0(z) + p_T(0,z) * sum_m bcoef[n][m] H_m(beta z).
    double beta = 0.0;
    std::vector<double> moment;
    std::vector<std::vector<double>> bcoef;

    // Per basis function k: total mass s_total[k] = integral of R_k over the
    // line at the final slice, and gamma[k] (same Hermite basis as bcoef)
    // with  F_k(z) = s_total[k] Phi0(z) + p_T(0,z) gamma_k(z).
    std::vector<double> s_total;
    std::vector<std::vector<double>> gamma;

    static BasisContext make(int n_particles, double horizon, double t1, int spare = 40);

    // The triangular coupling table at this context's scale.
    double alpha(int i, int j) const;
};

// Monomial coefficients of M_i.
const std::vector<double>& m_polynomial(int i, const BasisContext& ctx);

// R_k^{(mu)}(x): the M_k-weighted heat propagation from the origin,
//   b_k^{-1} * integral of M_k(y) p_{t1}(0,y) p_{t_mu - t1}(y, x) dy,
// in closed form: the Gaussian product rule leaves p_{t_mu}(0,x) times a
// Gaussian moment of M_k, which the scaled-Hermite recurrence evaluates
// exactly. 0-based k; 1-based slice index mu.
double r_function(int k, int mu, double x, const stochastic::TimePartition& partition,
                  const BasisContext& ctx);

// Same integral done numerically (test oracle for the closed form).
double r_function_quadrature(int k, int mu, double x, const stochastic::TimePartition& partition,
                             const BasisContext& ctx, const quadrature::QuadratureSpec& quad);

// G_k(z) = integral of sgn(w - z) R_k^{(M+1)}(w) dw, in closed form.
double g_sgn_integral(int k, double z, const BasisContext& ctx);

// Phi_k^{(mu)}(x) = - integral of p_{T - t_mu}(x, z) G_k(z) dz. The erf part
// of G_k convolves to another erf; the Gaussian-times-polynomial part is again
// a Gaussian moment. At mu = M+1 the convolution is the identity.
double phi_function(int k, int mu, double x, const stochastic::TimePartition& partition,
                    const BasisContext& ctx);

// Adaptive-quadrature route for Phi (outer convolution on a +-10 sigma
// window); used as a cross-check of the closed form.
double phi_function_quadrature(int k, int mu, double x, const stochastic::TimePartition& partition,
                               const BasisContext& ctx, const quadrature::QuadratureSpec& quad);

// The N x N skew Gram matrix <i| J |j> of the sgn pairing at the final slice,
// evaluated by quadrature. The whole construction is arranged so this equals
// the block-diagonal symplectic J_N.
Eigen::MatrixXd skew_gram(const BasisContext& ctx, const stochastic::TimePartition& partition,
                          const quadrature::QuadratureSpec& quad);

}  // namespace nclab::basis
