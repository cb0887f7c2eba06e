#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nclab::quadrature {

// Settings shared by every integration-backed routine in the library.
// `nodes` is the per-panel node count for fixed rules (Gauss-Legendre grids),
// `abs_tol` the absolute tolerance for adaptive rules.
struct QuadratureSpec {
    std::string scheme = "gauss-kronrod";
    int nodes = 64;
    double abs_tol = 1e-10;

    void validate() const {
        if (nodes < 16) throw std::invalid_argument("QuadratureSpec: node count must be >= 16");
        if (!(abs_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: tolerance must be > 0");
    }
};

// Adaptive Gauss-Kronrod on [a, b]; either endpoint may be infinite.
// Throws if the error estimate does not reach `abs_tol`.
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 int max_depth = 15);

// Same, but the integrand is only piecewise smooth: the rule is applied
// separately between consecutive breakpoints (and on the two tails).
double integrate_with_breakpoints(const std::function<double(double)>& f,
                                  std::vector<double> breakpoints, double abs_tol,
                                  int max_depth = 15);

// Adaptive integral over the whole real line.
inline double integrate_line(const std::function<double(double)>& f, double abs_tol) {
    return integrate(f, -std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity(), abs_tol);
}

// Gauss-Legendre nodes/weights mapped to [lo, hi].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    double lo = -1.0;
    double hi = 1.0;

    static GaussLegendre on(double lo, double hi, int n);

    template <typename F>
    double apply(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

// Product-integration weights for the sgn kernel on a Gauss-Legendre grid:
//   W(a, b) = integral over [lo, hi] of sgn(y - x_a) * l_b(y) dy,
// where l_b is the Lagrange basis of the grid. Exact for the degree n-1
// interpolant, so smooth integrands keep spectral accuracy despite the jump.
Eigen::MatrixXd signum_product_weights(const GaussLegendre& grid);

// Natural cubic spline on a uniform grid; evaluates 0 outside [x0, x0+(n-1)h].
class UniformSpline {
public:
    UniformSpline() = default;
    UniformSpline(double x0, double h, std::vector<double> values);

    double operator()(double x) const;

private:
    double x0_ = 0.0;
    double h_ = 1.0;
    std::vector<double> y_;
    std::vector<double> m_;  // second derivatives at the grid points
};

}  // namespace nclab::quadrature
