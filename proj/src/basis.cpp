#include "nclab/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace nclab::basis {

namespace {

bool is_odd(int k) { return (k & 1) != 0; }

// Gaussian density with variance v at displacement x.
double gauss(double v, double x) { return std::exp(-x * x / (2.0 * v)) / std::sqrt(2.0 * M_PI * v); }

void check_slice(int mu, const stochastic::TimePartition& partition, const BasisContext& ctx) {
    if (mu < 1 || mu > partition.slice_count())
        throw std::invalid_argument("basis: slice index out of range");
    if (partition.horizon != ctx.horizon || partition.time(1) != ctx.t1)
        throw std::invalid_argument("basis: partition does not match the context");
}

// E[Mtilde_k(Y)] for Y ~ N(mean, var), where Mtilde_k = M_k / b_k. Only the
// diagonal and (for odd k) the i-2 Hermite component of M_k are nonzero.
double monic_gaussian_moment(int k, double mean, double var, const BasisContext& ctx) {
    const double xi = mean / ctx.c1;
    const double lambda_sq = 1.0 - 2.0 * var / (ctx.c1 * ctx.c1);
    const double dk = std::pow(0.5 * ctx.c1, k);
    double v = hermite_scaled(k, xi, lambda_sq);
    if (is_odd(k) && k >= 2)
        v -= 2.0 * (k - 1) / (ctx.z1 * ctx.z1) * hermite_scaled(k - 2, xi, lambda_sq);
    return dk * v;
}

}  // namespace

double hermite(int i, double x) {
    if (i < 0) throw std::invalid_argument("hermite: negative index");
    double h0 = 1.0;
    if (i == 0) return h0;
    double h1 = 2.0 * x;
    for (int k = 1; k < i; ++k) {
        const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double hermite_scaled(int n, double xi, double lambda_sq) {
    if (n < 0) throw std::invalid_argument("hermite_scaled: negative index");
    double h0 = 1.0;
    if (n == 0) return h0;
    double h1 = 2.0 * xi;
    for (int k = 1; k < n; ++k) {
        const double h2 = 2.0 * xi * h1 - 2.0 * k * lambda_sq * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double alpha_coeff(int i, int j, double c1) {
    if (i < 0 || j < 0 || j > i) throw std::invalid_argument("alpha_coeff: need 0 <= j <= i");
    const double scale = std::pow(0.5 * c1, i);
    if (!is_odd(i)) return (i == j) ? scale : 0.0;
    if (j == i) return scale;
    if (j == i - 2) return -2.0 * (i - 1) * scale;
    return 0.0;
}

BasisContext BasisContext::make(int n_particles, double horizon, double t1, int spare) {
    if (n_particles <= 0 || n_particles % 2 != 0)
        throw std::invalid_argument("BasisContext: particle number must be positive even");
    if (!(horizon > 0.0)) throw std::invalid_argument("BasisContext: horizon must be positive");
    if (!(t1 > 0.0 && t1 <= horizon))
        throw std::invalid_argument("BasisContext: need 0 < t1 <= T");
    if (t1 < 1e-8 * horizon)
        throw std::invalid_argument("BasisContext: t1 too close to 0 (z1 diverges)");
    if (spare < 0) throw std::invalid_argument("BasisContext: spare must be >= 0");

    BasisContext ctx;
    ctx.n_particles = n_particles;
    ctx.horizon = horizon;
    ctx.t1 = t1;
    ctx.c1 = std::sqrt(t1 * (2.0 * horizon - t1) / horizon);
    ctx.z1 = std::sqrt((2.0 * horizon - t1) / t1);
    ctx.fn_count = n_particles + spare;

    const int pair_count = (ctx.fn_count + 1) / 2;
    ctx.r.resize(pair_count);
    const double q = t1 * t1 / horizon;
    for (int i = 0; i < pair_count; ++i) {
        ctx.r[i] = std::tgamma(i + 0.5) * std::tgamma(i + 1.0) * std::pow(q, 2 * i + 0.5) / M_PI;
        if (!(ctx.r[i] > 0.0) || !std::isfinite(ctx.r[i]))
            throw std::runtime_error("BasisContext: r_i not positive finite at this scale");
    }
    ctx.b.resize(ctx.fn_count);
    for (int k = 0; k < ctx.fn_count; ++k) {
        ctx.b[k] = 1.0 / std::sqrt(ctx.r[k / 2]);
        if (!std::isfinite(ctx.b[k]))
            throw std::runtime_error("BasisContext: b_k overflows at this scale");
    }

    // Monomial tables: H_j coefficients, then M_i = b_i z1^{-i} sum_j alpha_ij
    // H_j(x / c1) z1^j collapsed to the two nonzero alpha terms.
    const int deg = ctx.fn_count;  // need H_j for j < fn_count
    std::vector<std::vector<double>> h(deg);
    h[0] = {1.0};
    if (deg > 1) h[1] = {0.0, 2.0};
    for (int j = 2; j < deg; ++j) {
        h[j].assign(j + 1, 0.0);
        for (int m = 0; m <= j - 1; ++m) h[j][m + 1] += 2.0 * h[j - 1][m];
        for (int m = 0; m <= j - 2; ++m) h[j][m] -= 2.0 * (j - 1) * h[j - 2][m];
    }
    ctx.m_monomial.resize(ctx.fn_count);
    for (int i = 0; i < ctx.fn_count; ++i) {
        std::vector<double> c(i + 1, 0.0);
        const double dk = std::pow(0.5 * ctx.c1, i);
        for (int m = 0; m <= i; ++m) c[m] += dk * h[i][m] * std::pow(ctx.c1, -m);
        if (is_odd(i) && i >= 2) {
            const double f = -2.0 * (i - 1) / (ctx.z1 * ctx.z1) * dk;
            for (int m = 0; m <= i - 2; ++m) c[m] += f * h[i - 2][m] * std::pow(ctx.c1, -m);
        }
        for (double& cm : c) cm *= ctx.b[i];
        ctx.m_monomial[i] = std::move(c);
    }

    // Antiderivative tables at the final slice. With beta = t1 / (T c1),
    //   A_n(z) = -2 beta T p_T(0,z) H_{n-1}(beta z) + 2(n-1)(2 beta^2 T - 1) A_{n-2}(z).
    ctx.beta = t1 / (horizon * ctx.c1);
    const double kappa = 2.0 * ctx.beta * ctx.beta * horizon - 1.0;
    ctx.moment.assign(ctx.fn_count + 1, 0.0);
    ctx.bcoef.assign(ctx.fn_count + 1, std::vector<double>(ctx.fn_count + 1, 0.0));
    ctx.moment[0] = 1.0;
    if (ctx.fn_count >= 1) ctx.bcoef[1][0] = -2.0 * ctx.beta * horizon;
    for (int n = 2; n <= ctx.fn_count; ++n) {
        const double carry = 2.0 * (n - 1) * kappa;
        ctx.moment[n] = carry * ctx.moment[n - 2];
        ctx.bcoef[n][n - 1] = -2.0 * ctx.beta * horizon;
        for (int m = 0; m <= n - 2; ++m) ctx.bcoef[n][m] += carry * ctx.bcoef[n - 2][m];
    }

    // R_k at the final slice is p_T(0,w) q_k(w) where q_k carries the scaled
    // Hermite h_k(beta w; lamT) of the Gaussian moment. Expand those in plain
    // Hermite polynomials H_m(beta w) so the A_n tables above apply: with
    // 2 xi H_m = H_{m+1} + 2m H_{m-1}, the recurrence
    // h_{k+1} = 2 xi h_k - 2 k lamT h_{k-1} acts directly on coefficients.
    const double tau_final = t1 * (horizon - t1) / horizon;
    const double lam_final = 1.0 - 2.0 * tau_final / (ctx.c1 * ctx.c1);
    const int nfun = ctx.fn_count;
    std::vector<std::vector<double>> hcoef(nfun, std::vector<double>(nfun, 0.0));
    hcoef[0][0] = 1.0;
    if (nfun > 1) hcoef[1][1] = 1.0;
    for (int k = 1; k + 1 < nfun; ++k) {
        for (int m = 0; m <= k; ++m) {
            const double v = hcoef[k][m];
            if (v == 0.0) continue;
            hcoef[k + 1][m + 1] += v;
            if (m >= 1) hcoef[k + 1][m - 1] += 2.0 * m * v;
        }
        for (int m = 0; m <= k - 1; ++m)
            hcoef[k + 1][m] -= 2.0 * k * lam_final * hcoef[k - 1][m];
    }

    ctx.s_total.assign(nfun, 0.0);
    ctx.gamma.assign(nfun, std::vector<double>(nfun + 1, 0.0));
    for (int k = 0; k < nfun; ++k) {
        std::vector<double> q(nfun, 0.0);
        const double dk = std::pow(0.5 * ctx.c1, k);
        for (int m = 0; m <= k; ++m) q[m] = dk * hcoef[k][m];
        if (is_odd(k) && k >= 2) {
            const double f = -2.0 * (k - 1) / (ctx.z1 * ctx.z1) * dk;
            for (int m = 0; m <= k - 2; ++m) q[m] += f * hcoef[k - 2][m];
        }
        for (int m = 0; m <= k; ++m) {
            if (q[m] == 0.0) continue;
            ctx.s_total[k] += q[m] * ctx.moment[m];
            for (int j = 0; j < m; ++j) ctx.gamma[k][j] += q[m] * ctx.bcoef[m][j];
        }
    }
    return ctx;
}

double BasisContext::alpha(int i, int j) const { return alpha_coeff(i, j, c1); }

const std::vector<double>& m_polynomial(int i, const BasisContext& ctx) {
    if (i < 0 || i >= ctx.fn_count)
        throw std::invalid_argument("m_polynomial: index outside the context table");
    return ctx.m_monomial[static_cast<std::size_t>(i)];
}

double r_function(int k, int mu, double x, const stochastic::TimePartition& partition,
                  const BasisContext& ctx) {
    check_slice(mu, partition, ctx);
    if (k < 0 || k >= ctx.fn_count) throw std::invalid_argument("r_function: index out of range");
    const double t_mu = partition.time(mu);
    const double mean = x * ctx.t1 / t_mu;
    const double var = ctx.t1 * (t_mu - ctx.t1) / t_mu;
    return gauss(t_mu, x) * monic_gaussian_moment(k, mean, var, ctx);
}

double r_function_quadrature(int k, int mu, double x, const stochastic::TimePartition& partition,
                             const BasisContext& ctx, const quadrature::QuadratureSpec& quad) {
    check_slice(mu, partition, ctx);
    const double t_mu = partition.time(mu);
    const auto& m = m_polynomial(k, ctx);
    auto poly = [&](double y) {
        double v = 0.0;
        for (std::size_t j = m.size(); j-- > 0;) v = v * y + m[j];
        return v / ctx.b[k];
    };
    if (t_mu == ctx.t1) return poly(x) * gauss(ctx.t1, x);
    auto f = [&](double y) {
        return poly(y) * gauss(ctx.t1, y) * gauss(t_mu - ctx.t1, x - y);
    };
    return quadrature::integrate_line(f, quad.abs_tol);
}

double g_sgn_integral(int k, double z, const BasisContext& ctx) {
    if (k < 0 || k >= ctx.fn_count)
        throw std::invalid_argument("g_sgn_integral: index out of range");
    const double T = ctx.horizon;
    double poly = 0.0;
    for (int m = 0; m <= k; ++m)
        if (ctx.gamma[k][m] != 0.0) poly += ctx.gamma[k][m] * hermite(m, ctx.beta * z);
    return -ctx.s_total[k] * std::erf(z / std::sqrt(2.0 * T)) - 2.0 * gauss(T, z) * poly;
}

double phi_function(int k, int mu, double x, const stochastic::TimePartition& partition,
                    const BasisContext& ctx) {
    check_slice(mu, partition, ctx);
    if (k < 0 || k >= ctx.fn_count) throw std::invalid_argument("phi_function: index out of range");
    const double T = ctx.horizon;
    const double v = 2.0 * T - partition.time(mu);  // T + (T - t_mu)
    const double mean = x * T / v;
    const double var = (T - partition.time(mu)) * T / v;
    const double lambda_sq = 1.0 - 2.0 * ctx.beta * ctx.beta * var;
    double poly = 0.0;
    for (int m = 0; m <= k; ++m)
        if (ctx.gamma[k][m] != 0.0)
            poly += ctx.gamma[k][m] * hermite_scaled(m, ctx.beta * mean, lambda_sq);
    return ctx.s_total[k] * std::erf(x / std::sqrt(2.0 * v)) + 2.0 * gauss(v, x) * poly;
}

double phi_function_quadrature(int k, int mu, double x, const stochastic::TimePartition& partition,
                               const BasisContext& ctx, const quadrature::QuadratureSpec& quad) {
    check_slice(mu, partition, ctx);
    const double s = ctx.horizon - partition.time(mu);
    if (s == 0.0) return -g_sgn_integral(k, x, ctx);
    const double wing = 10.0 * std::sqrt(s);
    auto f = [&](double z) { return gauss(s, x - z) * g_sgn_integral(k, z, ctx); };
    return -quadrature::integrate(f, x - wing, x + wing, quad.abs_tol);
}

Eigen::MatrixXd skew_gram(const BasisContext& ctx, const stochastic::TimePartition& partition,
                          const quadrature::QuadratureSpec& quad) {
    quad.validate();
    const int n = ctx.n_particles;
    const int final_slice = partition.slice_count();
    // Every off-diagonal entry is evaluated independently (no antisymmetry
    // shortcut): the point of this matrix is to check that it comes out as
    // J_N. The diagonal vanishes identically for the antisymmetric pairing.
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            auto f = [&](double x) {
                return r_function(i, final_slice, x, partition, ctx) * g_sgn_integral(j, x, ctx);
            };
            g(i, j) = ctx.b[i] * ctx.b[j] * quadrature::integrate_line(f, quad.abs_tol);
        }
    }
    return g;
}

}  // namespace nclab::basis
