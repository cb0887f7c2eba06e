#include "nclab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nclab::kernels {

namespace {

double sgn(double v) { return (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

CorrelationKernel::CorrelationKernel(int n_particles, stochastic::TimePartition partition,
                                     int spare)
    : ctx_(basis::BasisContext::make(n_particles, partition.horizon, partition.time(1), spare)),
      partition_(std::move(partition)) {}

PointBasis CorrelationKernel::point_basis(int mu, double x, int count) const {
    if (count > ctx_.fn_count)
        throw std::invalid_argument("point_basis: more functions requested than the context holds");
    PointBasis pb;
    pb.r.resize(count);
    pb.phi.resize(count);
    for (int k = 0; k < count; ++k) {
        pb.r[k] = basis::r_function(k, mu, x, partition_, ctx_);
        pb.phi[k] = basis::phi_function(k, mu, x, partition_, ctx_);
    }
    return pb;
}

double CorrelationKernel::pair_sum(const std::vector<double>& fx, const std::vector<double>& gy,
                                   int from, int terms, double* tail_bound) const {
    double sum = 0.0;
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;  // magnitudes of the last three terms
    for (int i = from; i < from + terms; ++i) {
        const double term = (fx[2 * i] * gy[2 * i + 1] - fx[2 * i + 1] * gy[2 * i]) / ctx_.r[i];
        sum += term;
        m0 = m1;
        m1 = m2;
        m2 = std::abs(term);
    }
    if (tail_bound) {
        // Geometric extrapolation of the measured decay. The ratio is taken
        // at stride two (successive terms alternate in structure) and kept
        // away from 0 and 1; a x10 safety factor absorbs the crudeness.
        double rho = (m0 > 0.0) ? std::sqrt(m2 / m0) : 0.5;
        rho = std::clamp(rho, 0.1, 0.95);
        *tail_bound = 10.0 * std::max(m1, m2) * rho / (1.0 - rho) + 1e-14;
    }
    return sum;
}

double CorrelationKernel::kernel_d(int mu, double x, int nu, double y) const {
    const int n = ctx_.n_particles;
    const PointBasis px = point_basis(mu, x, n), py = point_basis(nu, y, n);
    return pair_sum(px.r, py.r, 0, n / 2, nullptr);
}

double CorrelationKernel::kernel_s(int mu, double x, int nu, double y) const {
    const int n = ctx_.n_particles;
    const PointBasis px = point_basis(mu, x, n), py = point_basis(nu, y, n);
    return pair_sum(px.phi, py.r, 0, n / 2, nullptr);
}

double CorrelationKernel::kernel_i(int mu, double x, int nu, double y) const {
    const int n = ctx_.n_particles;
    const PointBasis px = point_basis(mu, x, n), py = point_basis(nu, y, n);
    return -pair_sum(px.phi, py.phi, 0, n / 2, nullptr);
}

double CorrelationKernel::kernel_w(int mu, double x, int nu, double y) const {
    const double s = 2.0 * ctx_.horizon - partition_.time(mu) - partition_.time(nu);
    if (s <= 0.0) return sgn(y - x);
    return std::erf((y - x) / std::sqrt(2.0 * s));
}

double CorrelationKernel::kernel_s_tilde(int mu, double x, int nu, double y) const {
    double v = kernel_s(mu, x, nu, y);
    if (mu < nu) v -= stochastic::heat_kernel(partition_.time(nu) - partition_.time(mu), x, y);
    return v;
}

double CorrelationKernel::kernel_i_tilde(int mu, double x, int nu, double y) const {
    return kernel_i(mu, x, nu, y) + kernel_w(mu, x, nu, y);
}

double CorrelationKernel::kernel_i_tilde_smooth(int mu, double x, int nu, double y) const {
    const double s = 2.0 * ctx_.horizon - partition_.time(mu) - partition_.time(nu);
    if (s <= 0.0) return kernel_i(mu, x, nu, y);
    return kernel_i_tilde(mu, x, nu, y);
}

double CorrelationKernel::kernel_s_tilde_series(int mu, double x, int nu, double y, int terms,
                                                double* tail_bound) const {
    if (!(mu < nu))
        throw std::invalid_argument("kernel_s_tilde_series: series branch requires mu < nu");
    const int n = ctx_.n_particles;
    const int need = 2 * (n / 2 + terms);
    const PointBasis px = point_basis(mu, x, need), py = point_basis(nu, y, need);
    return -pair_sum(px.phi, py.r, n / 2, terms, tail_bound);
}

double CorrelationKernel::kernel_i_tilde_series(int mu, double x, int nu, double y, int terms,
                                                double* tail_bound) const {
    const int n = ctx_.n_particles;
    const int need = 2 * (n / 2 + terms);
    const PointBasis px = point_basis(mu, x, need), py = point_basis(nu, y, need);
    return pair_sum(px.phi, py.phi, n / 2, terms, tail_bound);
}

skewlin::SkewMatrix CorrelationKernel::assemble_a(const CorrelationQuery& query) const {
    const int p = static_cast<int>(query.points.size());
    if (p == 0) throw std::invalid_argument("assemble_a: empty query");
    const int n = ctx_.n_particles;
    for (const auto& pt : query.points) {
        if (pt.slice < 1 || pt.slice > partition_.slice_count())
            throw std::invalid_argument("assemble_a: slice index outside the partition");
    }
    // A repeated point within a slice duplicates a block row pair, which is
    // fine: the pfaffian vanishes, matching the correlation in that limit.

    std::vector<PointBasis> bases(p);
    for (int a = 0; a < p; ++a)
        bases[a] = point_basis(query.points[a].slice, query.points[a].x, n);

    auto d_entry = [&](int a, int c) { return pair_sum(bases[a].r, bases[c].r, 0, n / 2, nullptr); };
    auto s_entry = [&](int a, int c) {
        double v = pair_sum(bases[a].phi, bases[c].r, 0, n / 2, nullptr);
        if (query.points[a].slice < query.points[c].slice)
            v -= stochastic::heat_kernel(
                partition_.time(query.points[c].slice) - partition_.time(query.points[a].slice),
                query.points[a].x, query.points[c].x);
        return v;
    };
    auto i_entry = [&](int a, int c) {
        return -pair_sum(bases[a].phi, bases[c].phi, 0, n / 2, nullptr) +
               kernel_w(query.points[a].slice, query.points[a].x, query.points[c].slice,
                        query.points[c].x);
    };

    Eigen::MatrixXd m(2 * p, 2 * p);
    for (int a = 0; a < p; ++a) {
        for (int c = 0; c < p; ++c) {
            m(2 * a, 2 * c) = d_entry(a, c);
            m(2 * a, 2 * c + 1) = s_entry(c, a);
            m(2 * a + 1, 2 * c) = -s_entry(a, c);
            m(2 * a + 1, 2 * c + 1) = -i_entry(a, c);
        }
    }
    return skewlin::SkewMatrix(m, 1e-9);
}

CorrelationResult CorrelationKernel::correlation(const CorrelationQuery& query) const {
    CorrelationResult res;
    res.value = skewlin::pfaffian(assemble_a(query));
    if (res.value < 0.0 && res.value > -1e-12) {
        res.value = 0.0;
        res.clamped = true;
    }
    return res;
}

double CorrelationKernel::one_point_density(int mu, double x) const {
    return kernel_s_tilde(mu, x, mu, x);
}

}  // namespace nclab::kernels
