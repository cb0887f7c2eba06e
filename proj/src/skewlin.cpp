#include "nclab/skewlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nclab::skewlin {

SkewMatrix::SkewMatrix(const Eigen::MatrixXd& a, double tol) {
    if (a.rows() != a.cols()) throw std::invalid_argument("SkewMatrix: matrix must be square");
    if (a.rows() % 2 != 0) throw std::invalid_argument("SkewMatrix: dimension must be even");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    const double dev = (a + a.transpose()).cwiseAbs().maxCoeff();
    if (dev > tol * scale)
        throw std::invalid_argument("SkewMatrix: input asymmetry " + std::to_string(dev) +
                                    " exceeds tolerance");
    a_ = 0.5 * (a - a.transpose());
}

template <typename Scalar>
Scalar pfaffian_inplace(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a) {
    const int n = static_cast<int>(a.rows());
    if (n == 0) return Scalar(1);
    if (n % 2 != 0) throw std::invalid_argument("pfaffian: dimension must be even");

    double amax = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) amax = std::max(amax, std::abs(a(i, j)));
    const double zero_cut = 1e-14 * amax;

    Scalar result(1);
    for (int k = 0; k + 1 < n; k += 2) {
        // Pivot: bring the largest |a(i, k)|, i > k, into row k+1.
        int kp = k + 1;
        for (int i = k + 2; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(kp, k))) kp = i;
        if (kp != k + 1) {
            a.row(k + 1).swap(a.row(kp));
            a.col(k + 1).swap(a.col(kp));
            result = -result;
        }

        const Scalar pivot = a(k, k + 1);
        if (std::abs(pivot) <= zero_cut) return Scalar(0);
        result *= pivot;

        if (k + 2 < n) {
            // Eliminate column k (and by skewness row k) below the pivot pair.
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tau =
                a.col(k).segment(k + 2, n - k - 2) / pivot;
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1> col_k1 =
                a.col(k + 1).segment(k + 2, n - k - 2);
            auto block = a.block(k + 2, k + 2, n - k - 2, n - k - 2);
            block -= tau * col_k1.transpose();
            block += col_k1 * tau.transpose();
        }
    }
    return result;
}

template double pfaffian_inplace<double>(Eigen::MatrixXd&);
template std::complex<double> pfaffian_inplace<std::complex<double>>(Eigen::MatrixXcd&);

double pfaffian(const SkewMatrix& a) {
    Eigen::MatrixXd work = a.matrix();
    return pfaffian_inplace(work);
}

std::complex<double> pfaffian(const Eigen::MatrixXcd& a, double skew_tol) {
    if (a.rows() != a.cols() || a.rows() % 2 != 0)
        throw std::invalid_argument("pfaffian: need an even-dimensional square matrix");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a + a.transpose()).cwiseAbs().maxCoeff() > skew_tol * scale)
        throw std::invalid_argument("pfaffian: complex matrix is not skew-symmetric");
    Eigen::MatrixXcd work = 0.5 * (a - a.transpose().eval());
    return pfaffian_inplace(work);
}

namespace {

double pfaffian_recursive(const Eigen::MatrixXd& a, std::vector<int>& idx) {
    const std::size_t m = idx.size();
    if (m == 0) return 1.0;
    const int first = idx[0];
    double sum = 0.0;
    double sign = 1.0;
    for (std::size_t j = 1; j < m; ++j) {
        std::vector<int> rest;
        rest.reserve(m - 2);
        for (std::size_t k = 1; k < m; ++k)
            if (k != j) rest.push_back(idx[k]);
        sum += sign * a(first, idx[j]) * pfaffian_recursive(a, rest);
        sign = -sign;
    }
    return sum;
}

}  // namespace

double pfaffian_direct(const SkewMatrix& a) {
    if (a.dim() > 8)
        throw std::invalid_argument("pfaffian_direct: definition sum restricted to dim <= 8");
    std::vector<int> idx(a.dim());
    for (int i = 0; i < a.dim(); ++i) idx[i] = i;
    return pfaffian_recursive(a.matrix(), idx);
}

SkewMatrix symplectic_j(int n) {
    if (n <= 0 || n % 2 != 0) throw std::invalid_argument("symplectic_j: N must be positive even");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; k += 2) {
        j(k, k + 1) = 1.0;
        j(k + 1, k) = -1.0;
    }
    return SkewMatrix(j);
}

SkewMatrix debruijn_matrix(const std::vector<std::function<double(double)>>& phi,
                           const quadrature::QuadratureSpec& quad) {
    quad.validate();
    const int n = static_cast<int>(phi.size());
    if (n == 0 || n % 2 != 0)
        throw std::invalid_argument("debruijn_matrix: need an even number of functions");

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> totals(n);
    for (int i = 0; i < n; ++i) totals[i] = quadrature::integrate(phi[i], -inf, inf, quad.abs_tol);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            // Inner pass: F_i(y) cumulative, outer pass against phi_j.
            auto integrand = [&](double y) {
                const double cumulative =
                    quadrature::integrate(phi[i], -inf, y, 0.1 * quad.abs_tol);
                return phi[j](y) * (2.0 * cumulative - totals[i]);
            };
            const double v = quadrature::integrate(integrand, -inf, inf, quad.abs_tol);
            a(i, j) = v;
            a(j, i) = -v;
        }
    }
    return SkewMatrix(a, 1e-9);
}

Eigen::MatrixXd andreief_matrix(const std::vector<std::function<double(double)>>& phi,
                                const std::vector<std::function<double(double)>>& phibar,
                                const quadrature::QuadratureSpec& quad) {
    quad.validate();
    if (phi.size() != phibar.size())
        throw std::invalid_argument("andreief_matrix: function lists differ in length");
    const int n = static_cast<int>(phi.size());
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = quadrature::integrate(
                [&](double x) { return phi[i](x) * phibar[j](x); }, -inf, inf, quad.abs_tol);
    return g;
}

}  // namespace nclab::skewlin
