#include "nclab/fredholm.hpp"

#include <cmath>
#include <stdexcept>

#include "nclab/skewlin.hpp"

namespace nclab::fredholm {

namespace {

constexpr Complex kI{0.0, 1.0};

double gauss(double v, double x) { return std::exp(-x * x / (2.0 * v)) / std::sqrt(2.0 * M_PI * v); }

std::pair<double, double> support(const Bump& b) {
    return {b.center - b.halfwidth, b.center + b.halfwidth};
}

Complex integrate_complex(const std::function<Complex(double)>& f, double a, double b,
                          double abs_tol) {
    const double re = quadrature::integrate([&](double x) { return f(x).real(); }, a, b, abs_tol);
    const double im = quadrature::integrate([&](double x) { return f(x).imag(); }, a, b, abs_tol);
    return {re, im};
}

// Integral over (-inf, upper] split at the points where the test-function
// support starts or ends; adaptive rules otherwise spend their depth
// hunting for the bump inside an infinite window.
Complex integrate_upto_complex(const std::function<Complex(double)>& f, double upper,
                               std::vector<double> breaks, double abs_tol) {
    std::sort(breaks.begin(), breaks.end());
    Complex total{0.0, 0.0};
    double lo = -std::numeric_limits<double>::infinity();
    for (double p : breaks) {
        if (p >= upper) break;
        total += integrate_complex(f, lo, p, abs_tol);
        lo = p;
    }
    return total + integrate_complex(f, lo, upper, abs_tol);
}

}  // namespace

Complex TestFunctionSpec::chi(int mu, double x) const {
    const std::size_t i = static_cast<std::size_t>(mu) - 1;
    if (i >= theta.size()) throw std::invalid_argument("TestFunctionSpec: slice out of range");
    const double phase = theta[i] * f[i](x);
    return std::exp(kI * phase) - 1.0;
}

bool TestFunctionSpec::active(int mu) const {
    const std::size_t i = static_cast<std::size_t>(mu) - 1;
    return theta[i] != 0.0 && f[i].amplitude != 0.0;
}

void TestFunctionSpec::validate(int slice_count) const {
    if (static_cast<int>(theta.size()) != slice_count ||
        static_cast<int>(f.size()) != slice_count)
        throw std::invalid_argument("TestFunctionSpec: need one angle and one function per slice");
    for (const auto& b : f)
        if (!(b.halfwidth > 0.0)) throw std::invalid_argument("TestFunctionSpec: empty support");
}

Eigen::MatrixXcd DiscretizedKernel::j_block() const {
    Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(dim(), dim());
    for (int p = 0; p < point_count(); ++p) {
        j(2 * p, 2 * p + 1) = 1.0;
        j(2 * p + 1, 2 * p) = -1.0;
    }
    return j;
}

DiscretizedKernel discretize(const kernels::CorrelationKernel& kernel,
                             const TestFunctionSpec& spec, int nodes_per_slice) {
    const auto& partition = kernel.partition();
    spec.validate(partition.slice_count());
    if (nodes_per_slice < 2) throw std::invalid_argument("discretize: need at least two nodes");

    DiscretizedKernel disc;
    for (int mu = 1; mu <= partition.slice_count(); ++mu) {
        if (!spec.active(mu)) continue;
        const auto [lo, hi] = support(spec.f[static_cast<std::size_t>(mu) - 1]);
        disc.slice.push_back(mu);
        disc.grids.push_back(quadrature::GaussLegendre::on(lo, hi, nodes_per_slice));
    }

    std::vector<double> weights;
    for (std::size_t g = 0; g < disc.grids.size(); ++g) {
        for (int a = 0; a < nodes_per_slice; ++a) {
            disc.nodes.push_back(disc.grids[g].nodes[a]);
            disc.node_slice.push_back(disc.slice[g]);
            weights.push_back(disc.grids[g].weights[a]);
        }
    }

    const int m = disc.point_count();
    const int n = kernel.n_particles();
    const int final_slice = partition.slice_count();

    std::vector<kernels::PointBasis> bases(m);
    std::vector<Complex> s(m);
    for (int p = 0; p < m; ++p) {
        bases[p] = kernel.point_basis(disc.node_slice[p], disc.nodes[p], n);
        s[p] = std::sqrt(weights[p] * spec.chi(disc.node_slice[p], disc.nodes[p]));
    }

    // Exact sgn weights on the final-slice grid (if that slice is active):
    // effective kernel values sgn_eff(p,q) ~ sgn(x_q - x_p) such that
    // sum_q w_q sgn_eff(p,q) g(x_q) integrates sgn against the interpolant.
    Eigen::MatrixXd sgn_eff;
    int final_grid = -1;
    for (std::size_t g = 0; g < disc.grids.size(); ++g)
        if (disc.slice[g] == final_slice) final_grid = static_cast<int>(g);
    if (final_grid >= 0) {
        const auto& grid = disc.grids[static_cast<std::size_t>(final_grid)];
        Eigen::MatrixXd omega = quadrature::signum_product_weights(grid);
        const int k = nodes_per_slice;
        sgn_eff.resize(k, k);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) sgn_eff(a, b) = omega(a, b) / grid.weights[b];
        sgn_eff = 0.5 * (sgn_eff - sgn_eff.transpose()).eval();
    }
    const int final_offset = final_grid * nodes_per_slice;

    auto pair_sum = [&](const std::vector<double>& fx, const std::vector<double>& gy) {
        double v = 0.0;
        for (int i = 0; i < n / 2; ++i)
            v += (fx[2 * i] * gy[2 * i + 1] - fx[2 * i + 1] * gy[2 * i]) /
                 kernel.context().r[i];
        return v;
    };

    disc.k = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
    for (int p = 0; p < m; ++p) {
        const int mu = disc.node_slice[p];
        const double x = disc.nodes[p];
        for (int q = 0; q < m; ++q) {
            const int nu = disc.node_slice[q];
            const double y = disc.nodes[q];

            const double d = pair_sum(bases[p].r, bases[q].r);
            double st_pq = pair_sum(bases[p].phi, bases[q].r);
            if (mu < nu) st_pq -= stochastic::heat_kernel(partition.time(nu) - partition.time(mu), x, y);
            double st_qp = pair_sum(bases[q].phi, bases[p].r);
            if (nu < mu) st_qp -= stochastic::heat_kernel(partition.time(mu) - partition.time(nu), x, y);

            double it = -pair_sum(bases[p].phi, bases[q].phi);
            if (mu == final_slice && nu == final_slice) {
                it += sgn_eff(p - final_offset, q - final_offset);
            } else {
                it += kernel.kernel_w(mu, x, nu, y);
            }

            const Complex f = s[p] * s[q];
            disc.k(2 * p, 2 * q) = f * d;
            disc.k(2 * p, 2 * q + 1) = f * st_qp;
            disc.k(2 * p + 1, 2 * q) = -f * st_pq;
            disc.k(2 * p + 1, 2 * q + 1) = -f * it;
        }
    }
    // Rounding symmetrization; the construction is skew by design.
    disc.k = 0.5 * (disc.k - disc.k.transpose().eval());
    return disc;
}

DiscretizedKernel from_matrix(Eigen::MatrixXcd k) {
    if (k.rows() != k.cols() || k.rows() % 2 != 0)
        throw std::invalid_argument("from_matrix: need an even-dimensional square matrix");
    DiscretizedKernel disc;
    const int m = static_cast<int>(k.rows()) / 2;
    disc.nodes.assign(static_cast<std::size_t>(m), 0.0);
    disc.node_slice.assign(static_cast<std::size_t>(m), 1);
    disc.k = std::move(k);
    return disc;
}

DiscretizedKernel jinv(const DiscretizedKernel& disc) {
    DiscretizedKernel out = disc;
    // J^{-1} = -J for the block-diagonal J_2.
    out.k = -disc.j_block() * disc.k;
    return out;
}

Complex fredholm_det(const DiscretizedKernel& disc) {
    const int d = disc.dim();
    if (d == 0) return 1.0;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(d, d) + disc.k;
    return a.partialPivLu().determinant();
}

Complex fredholm_pf(const DiscretizedKernel& disc) {
    if (disc.dim() == 0) return 1.0;
    Eigen::MatrixXcd m = disc.j_block() + disc.k;
    return skewlin::pfaffian(m);
}

Complex characteristic_pf(const TestFunctionSpec& spec, const kernels::CorrelationKernel& kernel,
                          int nodes_per_slice) {
    return fredholm_pf(discretize(kernel, spec, nodes_per_slice));
}

Complex characteristic_direct(const TestFunctionSpec& spec,
                              const kernels::CorrelationKernel& kernel,
                              const quadrature::QuadratureSpec& quad) {
    quad.validate();
    const auto& partition = kernel.partition();
    const auto& ctx = kernel.context();
    spec.validate(partition.slice_count());
    if (kernel.n_particles() != 2 || partition.slice_count() > 2)
        throw std::invalid_argument(
            "characteristic_direct: desk-scale oracle handles N = 2 with at most two times");

    const double t1 = partition.time(1);
    const double horizon = partition.horizon;
    auto m_poly = [&](int i, double u) {
        double v = 0.0;
        const auto& c = basis::m_polynomial(i, ctx);
        for (std::size_t j = c.size(); j-- > 0;) v = v * u + c[j];
        return v;
    };

    if (partition.slice_count() == 1) {
        // single observation time at the horizon
        const auto [slo, shi] = support(spec.f[0]);
        auto z_value = [&](bool with_chi) {
            auto phi = [&](int i, double u) -> Complex {
                Complex v = m_poly(i, u) * gauss(t1, u);
                if (with_chi) v *= 1.0 + spec.chi(1, u);
                return v;
            };
            const std::vector<double> breaks = with_chi ? std::vector<double>{slo, shi}
                                                        : std::vector<double>{};
            auto inner = [&](double x2) {
                return integrate_upto_complex(
                    [&](double x1) -> Complex {
                        return phi(0, x1) * phi(1, x2) - phi(0, x2) * phi(1, x1);
                    },
                    x2, breaks, 0.1 * quad.abs_tol);
            };
            auto outer = [&](const std::function<double(double)>& part) {
                return quadrature::integrate_with_breakpoints(part, breaks, quad.abs_tol);
            };
            const double re = outer([&](double x2) { return inner(x2).real(); });
            const double im = outer([&](double x2) { return inner(x2).imag(); });
            return Complex{re, im};
        };
        return z_value(true) / z_value(false);
    }

    // two observation times (t1, T): the first-slice coordinates integrate
    // out into G_i(y); tabulate those on a fine grid and spline-evaluate
    // inside the ordered 2d quadrature over the final slice.
    const double span = 8.0 * std::sqrt(horizon) +
                        std::abs(spec.f[1].center) + spec.f[1].halfwidth;
    const int table_n = 1601;
    const double h = 2.0 * span / (table_n - 1);

    auto build_tables = [&](bool with_chi, int i) {
        std::vector<double> re(table_n), im(table_n);
        for (int k = 0; k < table_n; ++k) {
            const double y = -span + k * h;
            const Complex v = integrate_complex(
                [&](double u) -> Complex {
                    Complex w = m_poly(i, u) * gauss(t1, u) * gauss(horizon - t1, y - u);
                    if (with_chi) w *= 1.0 + spec.chi(1, u);
                    return w;
                },
                -std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(), 0.02 * quad.abs_tol);
            re[k] = v.real();
            im[k] = v.imag();
        }
        return std::pair{quadrature::UniformSpline(-span, h, std::move(re)),
                         quadrature::UniformSpline(-span, h, std::move(im))};
    };

    const auto [flo, fhi] = support(spec.f[1]);
    auto z_value = [&](bool with_chi) {
        auto [g0re, g0im] = build_tables(with_chi, 0);
        auto [g1re, g1im] = build_tables(with_chi, 1);
        auto g = [&](int i, double y) -> Complex {
            Complex v = (i == 0) ? Complex{g0re(y), g0im(y)} : Complex{g1re(y), g1im(y)};
            if (with_chi) v *= 1.0 + spec.chi(2, y);
            return v;
        };
        std::vector<double> breaks = {-span};
        if (with_chi) {
            breaks.push_back(flo);
            breaks.push_back(fhi);
        }
        auto inner = [&](double y2) {
            return integrate_upto_complex(
                [&](double y1) -> Complex {
                    return g(0, y1) * g(1, y2) - g(0, y2) * g(1, y1);
                },
                y2, breaks, 0.1 * quad.abs_tol);
        };
        auto outer = [&](const std::function<double(double)>& part) {
            double total = 0.0;
            std::vector<double> edges = breaks;
            edges.push_back(span);
            std::sort(edges.begin(), edges.end());
            for (std::size_t i = 0; i + 1 < edges.size(); ++i)
                total += quadrature::integrate(part, edges[i], edges[i + 1], quad.abs_tol);
            return total;
        };
        const double re = outer([&](double y2) { return inner(y2).real(); });
        const double im = outer([&](double y2) { return inner(y2).imag(); });
        return Complex{re, im};
    };

    return z_value(true) / z_value(false);
}

}  // namespace nclab::fredholm
