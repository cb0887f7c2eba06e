#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nclab/fredholm.hpp"
#include "nclab/kernels.hpp"
#include "nclab/quadrature.hpp"
#include "nclab/stochastic.hpp"

using namespace nclab;
using fredholm::Bump;
using fredholm::Complex;
using fredholm::TestFunctionSpec;
using kernels::CorrelationKernel;
using stochastic::TimePartition;

namespace {

Eigen::MatrixXcd random_skew_cplx(int dim, double scale, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            a(i, j) = scale * Complex(u(gen), u(gen));
            a(j, i) = -a(i, j);
        }
    return a;
}

TestFunctionSpec single_bump(int slices, int which, double theta, Bump b) {
    TestFunctionSpec spec;
    spec.theta.assign(slices, 0.0);
    spec.f.assign(slices, Bump{0.0, 1.0, 0.0});
    spec.theta[which - 1] = theta;
    spec.f[which - 1] = b;
    return spec;
}

}  // namespace

TEST_CASE("chi vanishes at zero angle and bumps have compact support") {
    TestFunctionSpec spec = single_bump(1, 1, 0.7, Bump{0.2, 0.8, 1.0});
    CHECK(std::abs(spec.chi(1, 5.0)) == 0.0);      // outside the support
    CHECK(std::abs(spec.chi(1, 0.2)) > 0.0);       // at the center
    TestFunctionSpec off = single_bump(1, 1, 0.0, Bump{0.0, 1.0, 1.0});
    CHECK(std::abs(off.chi(1, 0.0)) == 0.0);
    CHECK(!off.active(1));
}

TEST_CASE("zero kernel gives unit determinant and unit pfaffian") {
    auto disc = fredholm::from_matrix(Eigen::MatrixXcd::Zero(8, 8));
    CHECK(std::abs(fredholm::fredholm_det(disc) - 1.0) < 1e-15);
    CHECK(std::abs(fredholm::fredholm_pf(disc) - 1.0) < 1e-15);
}

TEST_CASE("rank-1 kernel determinant is one plus the trace") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXcd a(6), b(6);
    for (int i = 0; i < 6; ++i) {
        a(i) = Complex(u(gen), u(gen));
        b(i) = Complex(u(gen), u(gen));
    }
    Eigen::MatrixXcd k = a * b.transpose();
    const Complex det = fredholm::fredholm_det(fredholm::from_matrix(k));
    const Complex expect = 1.0 + k.trace();
    CHECK(std::abs(det - expect) < 1e-12);
}

TEST_CASE("rains identity on random skew kernels at several sizes") {
    std::mt19937_64 gen(7);
    for (int nodes : {10, 20, 40}) {
        auto k = random_skew_cplx(2 * nodes, 0.3, gen);
        auto disc = fredholm::from_matrix(k);
        const Complex pf = fredholm::fredholm_pf(disc);
        const Complex det = fredholm::fredholm_det(fredholm::jinv(disc));
        CHECK(std::abs(pf * pf - det) < 1e-8 * std::max(1.0, std::abs(det)));
    }
}

TEST_CASE("pfaffian branch is continuous along the homotopy from zero") {
    std::mt19937_64 gen(11);
    auto k = random_skew_cplx(12, 0.5, gen);
    Complex prev = 1.0;
    for (int step = 0; step <= 20; ++step) {
        const double s = step / 20.0;
        auto disc = fredholm::from_matrix((s * k).eval());
        const Complex pf = fredholm::fredholm_pf(disc);
        if (step == 0) CHECK(std::abs(pf - 1.0) < 1e-14);
        CHECK(std::abs(pf - prev) < 0.35);  // no branch jump
        const Complex det = fredholm::fredholm_det(fredholm::jinv(disc));
        CHECK(std::abs(pf * pf - det) < 1e-10 * std::max(1.0, std::abs(det)));
        prev = pf;
    }
}

TEST_CASE("characteristic function: theta = 0 gives exactly 1") {
    CorrelationKernel kernel(2, TimePartition(1.0, {1.0}));
    TestFunctionSpec spec = single_bump(1, 1, 0.0, Bump{0.0, 1.0, 1.0});
    CHECK(fredholm::characteristic_pf(spec, kernel, 24) == Complex{1.0, 0.0});
}

TEST_CASE("characteristic function basics: modulus bound and conjugation") {
    CorrelationKernel kernel(2, TimePartition(1.0, {1.0}));
    for (double theta : {0.4, 1.1, 2.5}) {
        TestFunctionSpec spec = single_bump(1, 1, theta, Bump{0.1, 1.2, 1.0});
        const Complex psi = fredholm::characteristic_pf(spec, kernel, 32);
        CHECK(std::abs(psi) <= 1.0 + 1e-9);
        TestFunctionSpec neg = single_bump(1, 1, -theta, Bump{0.1, 1.2, 1.0});
        const Complex psi_neg = fredholm::characteristic_pf(neg, kernel, 32);
        CHECK(std::abs(psi_neg - std::conj(psi)) < 1e-10);
    }
}

TEST_CASE("characteristic function: squared pfaffian equals the determinant route") {
    CorrelationKernel kernel(2, TimePartition(1.0, {0.5, 1.0}));
    TestFunctionSpec spec;
    spec.theta = {0.8, 0.5};
    spec.f = {Bump{-0.2, 0.9, 1.0}, Bump{0.3, 0.7, 1.0}};
    auto disc = fredholm::discretize(kernel, spec, 40);
    const Complex pf = fredholm::fredholm_pf(disc);
    const Complex det = fredholm::fredholm_det(fredholm::jinv(disc));
    CHECK(std::abs(pf * pf - det) < 1e-8 * std::max(1.0, std::abs(det)));
}

TEST_CASE("node refinement converges for the smooth discretized kernel") {
    CorrelationKernel kernel(2, TimePartition(1.0, {1.0}));
    TestFunctionSpec spec = single_bump(1, 1, 0.9, Bump{0.0, 1.0, 1.0});
    const Complex a = fredholm::characteristic_pf(spec, kernel, 40);
    const Complex b = fredholm::characteristic_pf(spec, kernel, 80);
    CHECK(std::abs(a - b) < 1e-8);
}

TEST_CASE("characteristic function: direct oracle equals the pfaffian, one time") {
    CorrelationKernel kernel(2, TimePartition(1.0, {1.0}));
    quadrature::QuadratureSpec quad;
    quad.abs_tol = 1e-9;
    for (double theta : {0.5, 1.3}) {
        TestFunctionSpec spec = single_bump(1, 1, theta, Bump{0.15, 1.0, 1.0});
        const Complex direct = fredholm::characteristic_direct(spec, kernel, quad);
        const Complex pf = fredholm::characteristic_pf(spec, kernel, 48);
        CHECK(std::abs(direct - pf) < 1e-5);
    }
}

TEST_CASE("characteristic function: direct oracle equals the pfaffian, two times") {
    CorrelationKernel kernel(2, TimePartition(1.0, {0.5, 1.0}));
    quadrature::QuadratureSpec quad;
    quad.abs_tol = 1e-8;
    TestFunctionSpec spec;
    spec.theta = {0.7, 0.4};
    spec.f = {Bump{-0.1, 0.8, 1.0}, Bump{0.25, 0.9, 1.0}};
    const Complex direct = fredholm::characteristic_direct(spec, kernel, quad);
    const Complex pf = fredholm::characteristic_pf(spec, kernel, 48);
    CHECK(std::abs(direct - pf) < 1e-5);
}

TEST_CASE("small-theta expansion recovers the one-point density integral") {
    CorrelationKernel kernel(2, TimePartition(1.0, {1.0}));
    const Bump f{0.1, 1.1, 1.0};
    const double integral = quadrature::integrate(
        [&](double x) { return f(x) * kernel.one_point_density(1, x); }, f.center - f.halfwidth,
        f.center + f.halfwidth, 1e-11);

    const double h = 1e-3;
    const Complex plus = fredholm::characteristic_pf(single_bump(1, 1, h, f), kernel, 48);
    const Complex minus = fredholm::characteristic_pf(single_bump(1, 1, -h, f), kernel, 48);
    const Complex deriv = (plus - minus) / (2.0 * h);
    CHECK(std::abs(deriv - Complex(0.0, integral)) < 1e-4);
}

TEST_CASE("desk-scale guard on the direct oracle") {
    CorrelationKernel kernel(4, TimePartition(1.0, {1.0}));
    TestFunctionSpec spec = single_bump(1, 1, 0.5, Bump{0.0, 1.0, 1.0});
    quadrature::QuadratureSpec quad;
    CHECK_THROWS_AS((void)fredholm::characteristic_direct(spec, kernel, quad),
                    std::invalid_argument);
}
