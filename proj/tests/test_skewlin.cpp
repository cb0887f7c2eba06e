#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nclab/quadrature.hpp"
#include "nclab/skewlin.hpp"

using namespace nclab;
using skewlin::SkewMatrix;

namespace {

SkewMatrix random_skew(int n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            a(i, j) = u(gen);
            a(j, i) = -a(i, j);
        }
    return SkewMatrix(a);
}

double gaussian(double x, double m, double s) {
    return std::exp(-(x - m) * (x - m) / (2.0 * s * s)) / (s * std::sqrt(2.0 * M_PI));
}

}  // namespace

TEST_CASE("2x2 pfaffian is the off-diagonal entry") {
    Eigen::MatrixXd a(2, 2);
    a << 0.0, 1.75, -1.75, 0.0;
    CHECK(skewlin::pfaffian(SkewMatrix(a)) == doctest::Approx(1.75).epsilon(1e-15));
}

TEST_CASE("Pf(J_N) = 1 and J^2 = -I") {
    for (int n : {2, 4, 6}) {
        auto j = skewlin::symplectic_j(n);
        CHECK(skewlin::pfaffian(j) == doctest::Approx(1.0).epsilon(1e-14));
        Eigen::MatrixXd sq = j.matrix() * j.matrix();
        CHECK((sq + Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-15);
    }
    CHECK_THROWS_AS(skewlin::symplectic_j(3), std::invalid_argument);
}

TEST_CASE("symplectic J entries: N=2 block and N=4 zero fill") {
    auto j2 = skewlin::symplectic_j(2);
    CHECK(j2(0, 1) == 1.0);
    CHECK(j2(1, 0) == -1.0);
    auto j4 = skewlin::symplectic_j(4);
    CHECK(j4(0, 1) == 1.0);
    CHECK(j4(2, 3) == 1.0);
    CHECK(j4(0, 2) == 0.0);
    CHECK(j4(1, 3) == 0.0);
}

TEST_CASE("Pf(A)^2 = det(A) for random skew matrices") {
    std::mt19937_64 gen(7);
    for (int n = 2; n <= 20; n += 2) {
        for (int rep = 0; rep < 25; ++rep) {
            auto a = random_skew(n, gen);
            const double pf = skewlin::pfaffian(a);
            const double det = a.matrix().partialPivLu().determinant();
            const double scale = std::max(std::abs(det), 1e-30);
            CHECK(std::abs(pf * pf - det) / scale < 1e-10);
        }
    }
}

TEST_CASE("elimination pfaffian equals the definition sum for dim <= 8") {
    std::mt19937_64 gen(11);
    for (int n : {2, 4, 6, 8}) {
        for (int rep = 0; rep < 20; ++rep) {
            auto a = random_skew(n, gen);
            const double p1 = skewlin::pfaffian(a);
            const double p2 = skewlin::pfaffian_direct(a);
            CHECK(p1 == doctest::Approx(p2).epsilon(1e-12));
        }
    }
}

TEST_CASE("identical paired rows and columns give a zero pfaffian") {
    std::mt19937_64 gen(3);
    auto a = random_skew(6, gen).matrix();
    a.row(4) = a.row(2);
    a.col(4) = a.col(2);
    a(2, 4) = 0.0;
    a(4, 2) = 0.0;
    a(4, 4) = 0.0;
    CHECK(std::abs(skewlin::pfaffian(SkewMatrix(a))) < 1e-14);
}

TEST_CASE("congruence: Pf(B A B^T) = det(B) Pf(A)") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        auto a = random_skew(6, gen);
        Eigen::MatrixXd b(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) b(i, j) = u(gen);
        Eigen::MatrixXd c = b * a.matrix() * b.transpose();
        const double lhs = skewlin::pfaffian(SkewMatrix(c, 1e-9));
        const double rhs = b.partialPivLu().determinant() * skewlin::pfaffian(a);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("construction rejects odd dimension and gross asymmetry") {
    Eigen::MatrixXd odd = Eigen::MatrixXd::Zero(3, 3);
    CHECK_THROWS_AS(SkewMatrix{odd}, std::invalid_argument);
    Eigen::MatrixXd bad(2, 2);
    bad << 0.0, 1.0, -0.5, 0.0;
    CHECK_THROWS_AS(SkewMatrix{bad}, std::invalid_argument);
}

TEST_CASE("complex pfaffian matches sqrt of determinant up to sign") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            a(i, j) = std::complex<double>(u(gen), u(gen));
            a(j, i) = -a(i, j);
        }
    const std::complex<double> pf = skewlin::pfaffian(a);
    const std::complex<double> det = a.partialPivLu().determinant();
    CHECK(std::abs(pf * pf - det) < 1e-12 * std::max(1.0, std::abs(det)));
}

TEST_CASE("de bruijn matrix: survival of two gaussian densities") {
    // phi_i = heat kernels at positions 0 and 1 with t = 1; the pfaffian of the
    // pairwise sgn integrals equals the ordered-region integral of det[phi_i(y_j)].
    quadrature::QuadratureSpec quad;
    quad.abs_tol = 1e-10;
    std::vector<std::function<double(double)>> phi = {
        [](double y) { return gaussian(y, 0.0, 1.0); },
        [](double y) { return gaussian(y, 1.0, 1.0); },
    };
    auto a = skewlin::debruijn_matrix(phi, quad);
    const double pf = skewlin::pfaffian(a);

    // ordered-region quadrature oracle
    auto det_f = [&](double y1, double y2) {
        return phi[0](y1) * phi[1](y2) - phi[0](y2) * phi[1](y1);
    };
    auto outer = [&](double y2) {
        return quadrature::integrate([&](double y1) { return det_f(y1, y2); },
                                     -std::numeric_limits<double>::infinity(), y2, 1e-10);
    };
    const double oracle = quadrature::integrate_line(outer, 1e-9);
    CHECK(pf == doctest::Approx(oracle).epsilon(1e-7));
    // erf closed form for two unit gaussians one apart: erf(1/2)
    CHECK(pf == doctest::Approx(std::erf(0.5)).epsilon(1e-8));
}

TEST_CASE("de bruijn with identical functions has zero pfaffian") {
    quadrature::QuadratureSpec quad;
    std::function<double(double)> g = [](double y) { return gaussian(y, 0.3, 0.8); };
    auto a = skewlin::debruijn_matrix({g, g}, quad);
    CHECK(std::abs(skewlin::pfaffian(a)) < 1e-10);
}

TEST_CASE("andreief matrix of an orthonormal pair is the identity") {
    quadrature::QuadratureSpec quad;
    // Hermite functions 0 and 1 (orthonormal under the plain L2 inner product).
    auto h0 = [](double x) { return std::pow(M_PI, -0.25) * std::exp(-x * x / 2.0); };
    auto h1 = [h0](double x) { return std::sqrt(2.0) * x * h0(x); };
    std::vector<std::function<double(double)>> phi = {h0, h1};
    auto g = skewlin::andreief_matrix(phi, phi, quad);
    CHECK((g - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("andreief identity at N=2 against the ordered-region oracle") {
    quadrature::QuadratureSpec quad;
    std::vector<std::function<double(double)>> phi = {
        [](double y) { return gaussian(y, -0.2, 0.9); },
        [](double y) { return gaussian(y, 0.7, 1.1); },
    };
    std::vector<std::function<double(double)>> phibar = {
        [](double y) { return gaussian(y, 0.1, 1.3); },
        [](double y) { return gaussian(y, -0.5, 0.7); },
    };
    auto g = skewlin::andreief_matrix(phi, phibar, quad);
    const double det = g.determinant();

    auto integrand = [&](double y1, double y2) {
        const double d1 = phi[0](y1) * phi[1](y2) - phi[0](y2) * phi[1](y1);
        const double d2 = phibar[0](y1) * phibar[1](y2) - phibar[0](y2) * phibar[1](y1);
        return d1 * d2;
    };
    auto outer = [&](double y2) {
        return quadrature::integrate([&](double y1) { return integrand(y1, y2); },
                                     -std::numeric_limits<double>::infinity(), y2, 1e-10);
    };
    const double oracle = quadrature::integrate_line(outer, 1e-9);
    CHECK(det == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("andreief with a vanishing function gives zero determinant") {
    quadrature::QuadratureSpec quad;
    std::vector<std::function<double(double)>> phi = {
        [](double) { return 0.0; },
        [](double y) { return gaussian(y, 0.0, 1.0); },
    };
    auto g = skewlin::andreief_matrix(phi, phi, quad);
    CHECK(std::abs(g.determinant()) < 1e-12);
}
