#include "nclab/quadrature.hpp"

#include <algorithm>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace nclab::quadrature {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

double legendre_p(int n, double x) {
    double p0 = 1.0, p1 = x;
    if (n == 0) return p0;
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 int max_depth) {
    // The driver tolerance is relative; start proportional to the requested
    // absolute tolerance and tighten if the error estimate misses the target.
    // Integrands whose mass cancels can never beat roundoff relative to their
    // L1 norm, so that is the floor of what we demand.
    double err = 0.0, l1 = 0.0, value = 0.0;
    double drive = std::max(1e-13, 0.05 * abs_tol);
    for (;;) {
        value = GK::integrate(f, a, b, max_depth, drive, &err, &l1);
        if (err <= abs_tol || err <= 1e-10 * std::abs(value) || err <= 1e-12 * l1) return value;
        if (drive <= 1e-13) break;
        drive = std::max(1e-13, drive * 1e-3);
    }
    std::ostringstream msg;
    msg << "quadrature did not converge: achieved " << err << ", requested " << abs_tol;
    throw std::runtime_error(msg.str());
}

double integrate_with_breakpoints(const std::function<double(double)>& f,
                                  std::vector<double> breakpoints, double abs_tol,
                                  int max_depth) {
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    if (breakpoints.empty()) return integrate_line(f, abs_tol);

    const double inf = std::numeric_limits<double>::infinity();
    const double tol = abs_tol / static_cast<double>(breakpoints.size() + 1);
    double total = integrate(f, -inf, breakpoints.front(), tol, max_depth);
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        total += integrate(f, breakpoints[i], breakpoints[i + 1], tol, max_depth);
    total += integrate(f, breakpoints.back(), inf, tol, max_depth);
    return total;
}

GaussLegendre GaussLegendre::on(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: need at least one node");
    if (!(lo < hi)) throw std::invalid_argument("GaussLegendre: empty interval");

    GaussLegendre g;
    g.lo = lo;
    g.hi = hi;
    g.nodes.resize(n);
    g.weights.resize(n);

    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess;
        // roots come out in decreasing x, i.e. increasing mapped node.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        g.nodes[i] = mid - half * x;
        g.weights[i] = 2.0 * half / ((1.0 - x * x) * dp * dp);
    }
    return g;
}

Eigen::MatrixXd signum_product_weights(const GaussLegendre& grid) {
    const int n = static_cast<int>(grid.nodes.size());
    const double mid = 0.5 * (grid.lo + grid.hi);
    const double half = 0.5 * (grid.hi - grid.lo);

    // Reference coordinates on [-1, 1] and reference weights.
    std::vector<double> xi(n), w(n);
    for (int i = 0; i < n; ++i) {
        xi[i] = (grid.nodes[i] - mid) / half;
        w[i] = grid.weights[i] / half;
    }

    // P_j at every node, plus the antiderivatives Q_j(x) = int_{-1}^{x} P_j.
    Eigen::MatrixXd P(n + 1, n);
    for (int j = 0; j <= n; ++j)
        for (int b = 0; b < n; ++b) P(j, b) = legendre_p(j, xi[b]);

    auto Q = [&](int j, int a) {
        if (j == 0) return xi[a] + 1.0;
        return (P(j + 1, a) - P(j - 1, a)) / (2.0 * j + 1.0);
    };

    // C(a, b) = int_{-1}^{xi_a} l_b with l_b expanded in Legendre polynomials;
    // the expansion coefficients collapse because the grid is Gauss-Legendre.
    Eigen::MatrixXd omega(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            double c = 0.0;
            for (int j = 0; j < n; ++j) c += 0.5 * (2.0 * j + 1.0) * w[b] * P(j, b) * Q(j, a);
            omega(a, b) = (w[b] - 2.0 * c) * half;
        }
    }
    return omega;
}

UniformSpline::UniformSpline(double x0, double h, std::vector<double> values)
    : x0_(x0), h_(h), y_(std::move(values)) {
    const std::size_t n = y_.size();
    if (n < 4) throw std::invalid_argument("UniformSpline: need at least 4 points");
    if (!(h > 0.0)) throw std::invalid_argument("UniformSpline: step must be > 0");

    // Natural spline: tridiagonal (1, 4, 1) system for second derivatives.
    m_.assign(n, 0.0);
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double rhs = 6.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (h * h);
        const double denom = 4.0 - (i == 1 ? 0.0 : c[i - 1]);
        c[i] = 1.0 / denom;
        d[i] = (rhs - (i == 1 ? 0.0 : d[i - 1])) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m_[i] = d[i] - c[i] * m_[i + 1];
        if (i == 1) break;
    }
}

double UniformSpline::operator()(double x) const {
    const std::size_t n = y_.size();
    const double t = (x - x0_) / h_;
    if (t < 0.0 || t > static_cast<double>(n - 1)) return 0.0;
    std::size_t i = static_cast<std::size_t>(t);
    if (i >= n - 1) i = n - 2;
    const double a = (x0_ + (i + 1) * h_ - x) / h_;
    const double b = 1.0 - a;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h_ * h_ / 6.0;
}

}  // namespace nclab::quadrature
