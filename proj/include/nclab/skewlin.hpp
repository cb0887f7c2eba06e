#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nclab/quadrature.hpp"

namespace nclab::skewlin {

// Dense real skew-symmetric matrix of even dimension. Construction mirrors
// the lower triangle so a_ij = -a_ji and a_ii = 0 hold exactly; inputs whose
// asymmetry exceeds `tol * max(1, |A|_max)` are rejected.
class SkewMatrix {
public:
    explicit SkewMatrix(const Eigen::MatrixXd& a, double tol = 1e-12);

    int dim() const { return static_cast<int>(a_.rows()); }
    double operator()(int i, int j) const { return a_(i, j); }
    const Eigen::MatrixXd& matrix() const { return a_; }

private:
    Eigen::MatrixXd a_;
};

// Skew-symmetric Gaussian elimination with partial pivoting; every pivot swap
// flips the sign, pivots accumulate into the result. O(n^3). Near-singular
// pivots (< 1e-14 * |A|_max) short-circuit to exactly 0. Works for real and
// complex scalars; the matrix is destroyed.
template <typename Scalar>
Scalar pfaffian_inplace(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a);

double pfaffian(const SkewMatrix& a);
std::complex<double> pfaffian(const Eigen::MatrixXcd& a, double skew_tol = 1e-9);

// Signed pair-partition sum, straight from the definition. Exponential cost;
// restricted to dim <= 8 and kept as the oracle for the elimination routine.
double pfaffian_direct(const SkewMatrix& a);

// J_N = I_{N/2} (x) [[0,1],[-1,0]]; satisfies J^2 = -I.
SkewMatrix symplectic_j(int n);

// Entry (i,j) = integral of sgn(y2 - y1) phi_i(y1) phi_j(y2) over the plane,
// evaluated as a nested 1D pass through the cumulative integrals of phi_i.
SkewMatrix debruijn_matrix(const std::vector<std::function<double(double)>>& phi,
                           const quadrature::QuadratureSpec& quad);

// Entry (i,j) = integral of phi_i(x) * phibar_j(x) over the line.
Eigen::MatrixXd andreief_matrix(const std::vector<std::function<double(double)>>& phi,
                                const std::vector<std::function<double(double)>>& phibar,
                                const quadrature::QuadratureSpec& quad);

}  // namespace nclab::skewlin
