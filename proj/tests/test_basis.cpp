#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nclab/basis.hpp"
#include "nclab/quadrature.hpp"
#include "nclab/skewlin.hpp"
#include "nclab/stochastic.hpp"

using namespace nclab;
using basis::BasisContext;
using stochastic::TimePartition;

namespace {

double gauss(double v, double x) {
    return std::exp(-x * x / (2.0 * v)) / std::sqrt(2.0 * M_PI * v);
}

double eval_poly(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) v = v * x + c[j];
    return v;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST_CASE("hermite polynomials: base cases and orthogonality") {
    CHECK(basis::hermite(0, 0.37) == 1.0);
    CHECK(basis::hermite(1, 0.37) == doctest::Approx(0.74));
    CHECK(basis::hermite(2, 1.0) == doctest::Approx(2.0));

    // Orthogonality, checked on the orthonormalized scale so the 1e-9
    // tolerance is meaningful uniformly in (i, j).
    auto norm = [&](int i) { return std::sqrt(std::pow(2.0, i) * factorial(i) * std::sqrt(M_PI)); };
    for (int i = 0; i <= 6; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double v = quadrature::integrate_line(
                [&](double x) {
                    return std::exp(-x * x) * basis::hermite(i, x) * basis::hermite(j, x) /
                           (norm(i) * norm(j));
                },
                1e-10);
            const double expect = (i == j) ? 1.0 : 0.0;
            CHECK(std::abs(v - expect) < 1e-9);
        }
    }
}

TEST_CASE("scaled hermite recurrence equals the gaussian average of H_n") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int rep = 0; rep < 8; ++rep) {
        const double zeta = u(gen);
        const double s = 0.3 + 0.5 * std::abs(u(gen));
        for (int n : {0, 1, 2, 3, 5, 8}) {
            const double direct = quadrature::integrate_line(
                [&](double z) { return basis::hermite(n, z) * gauss(s * s, z - zeta); }, 1e-11);
            const double closed = basis::hermite_scaled(n, zeta, 1.0 - 2.0 * s * s);
            CHECK(closed == doctest::Approx(direct).epsilon(1e-9));
        }
    }
}

TEST_CASE("alpha coefficients") {
    const double c1 = 0.83;
    CHECK(basis::alpha_coeff(0, 0, c1) == doctest::Approx(1.0));
    CHECK(basis::alpha_coeff(3, 1, c1) == doctest::Approx(-std::pow(c1, 3) / 2.0));
    CHECK(basis::alpha_coeff(2, 1, c1) == doctest::Approx(0.0));
    CHECK(basis::alpha_coeff(2, 2, c1) == doctest::Approx(c1 * c1 / 4.0));
}

TEST_CASE("M polynomials: low cases, degree, and leading coefficient") {
    auto ctx = BasisContext::make(4, 1.0, 0.6, 10);
    const auto& m0 = basis::m_polynomial(0, ctx);
    REQUIRE(m0.size() == 1);
    CHECK(m0[0] == doctest::Approx(ctx.b[0]).epsilon(1e-14));

    const auto& m1 = basis::m_polynomial(1, ctx);
    REQUIRE(m1.size() == 2);
    CHECK(m1[0] == doctest::Approx(0.0));
    CHECK(m1[1] == doctest::Approx(ctx.b[1]).epsilon(1e-14));

    for (int i = 0; i <= 7; ++i) {
        const auto& mi = basis::m_polynomial(i, ctx);
        REQUIRE(static_cast<int>(mi.size()) == i + 1);
        CHECK(mi.back() == doctest::Approx(ctx.b[i]).epsilon(1e-12));
    }
}

TEST_CASE("M polynomials agree with the alpha-Hermite definition") {
    auto ctx = BasisContext::make(2, 1.0, 0.4, 8);
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i <= 7; ++i) {
        for (int rep = 0; rep < 4; ++rep) {
            const double x = u(gen);
            double ref = 0.0;
            for (int j = 0; j <= i; ++j)
                ref += basis::alpha_coeff(i, j, ctx.c1) * basis::hermite(j, x / ctx.c1) *
                       std::pow(ctx.z1, j);
            ref *= ctx.b[i] * std::pow(ctx.z1, -i);
            CHECK(eval_poly(basis::m_polynomial(i, ctx), x) ==
                  doctest::Approx(ref).epsilon(1e-11));
        }
    }
}

TEST_CASE("context invariants and rejection of degenerate scales") {
    auto ctx = BasisContext::make(4, 2.0, 1.3, 20);
    CHECK(ctx.c1 == doctest::Approx(std::sqrt(1.3 * (4.0 - 1.3) / 2.0)));
    CHECK(ctx.z1 == doctest::Approx(std::sqrt((4.0 - 1.3) / 1.3)));
    CHECK(ctx.alpha(3, 1) == doctest::Approx(basis::alpha_coeff(3, 1, ctx.c1)));
    for (std::size_t i = 0; i < ctx.r.size(); ++i) CHECK(ctx.r[i] > 0.0);
    for (int k = 0; k < 2 * ctx.n_particles; ++k) CHECK(std::isfinite(ctx.b[k]));

    CHECK_NOTHROW(BasisContext::make(2, 1.0, 1.0));  // t1 = T allowed (z1 = 1)
    CHECK(BasisContext::make(2, 1.0, 1.0).z1 == doctest::Approx(1.0));
    CHECK_THROWS_AS(BasisContext::make(2, 1.0, 1e-12), std::invalid_argument);
    CHECK_THROWS_AS(BasisContext::make(3, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("R at the first slice is the plain polynomial-times-kernel product") {
    TimePartition part(1.0, {0.35, 1.0});
    auto ctx = BasisContext::make(4, 1.0, 0.35, 8);
    for (int k : {0, 1, 2, 3, 5}) {
        for (double x : {-1.2, 0.0, 0.8}) {
            const double expect =
                eval_poly(basis::m_polynomial(k, ctx), x) / ctx.b[k] * gauss(0.35, x);
            CHECK(basis::r_function(k, 1, x, part, ctx) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    // k = 0 at any slice collapses to the heat kernel from the origin
    for (int mu : {1, 2})
        for (double x : {-0.7, 0.4})
            CHECK(basis::r_function(0, mu, x, part, ctx) ==
                  doctest::Approx(gauss(part.time(mu), x)).epsilon(1e-13));
}

TEST_CASE("R closed form equals the defining integral on a grid") {
    TimePartition part(1.0, {0.35, 0.7, 1.0});
    auto ctx = BasisContext::make(4, 1.0, 0.35, 8);
    quadrature::QuadratureSpec quad;
    quad.abs_tol = 1e-12;
    for (int k = 0; k <= 8; ++k) {
        for (int mu : {2, 3}) {
            for (double x = -5.0; x <= 5.0; x += 1.25) {
                const double closed = basis::r_function(k, mu, x, part, ctx);
                const double oracle = basis::r_function_quadrature(k, mu, x, part, ctx, quad);
                CHECK(std::abs(closed - oracle) < 1e-10 * std::max(1.0, std::abs(oracle)));
            }
        }
    }
}

TEST_CASE("sgn integral of R: closed form, limits, and quadrature oracle") {
    TimePartition part(1.0, {0.5, 1.0});
    auto ctx = BasisContext::make(2, 1.0, 0.5, 10);
    const int final_slice = part.slice_count();

    for (int k : {0, 1, 2, 3, 4}) {
        for (double z : {-1.7, -0.3, 0.0, 0.9, 2.1}) {
            auto f = [&](double w) {
                const double s = (w > z) ? 1.0 : (w < z ? -1.0 : 0.0);
                return s * basis::r_function(k, final_slice, w, part, ctx);
            };
            const double oracle = quadrature::integrate_with_breakpoints(f, {z}, 1e-12);
            CHECK(basis::g_sgn_integral(k, z, ctx) == doctest::Approx(oracle).epsilon(1e-9));
        }
        // finite, opposite-sign limits: +S_k at -inf, -S_k at +inf
        const double far = 60.0;
        CHECK(basis::g_sgn_integral(k, far, ctx) == doctest::Approx(-ctx.s_total[k]).epsilon(1e-12));
        CHECK(basis::g_sgn_integral(k, -far, ctx) == doctest::Approx(ctx.s_total[k]).epsilon(1e-12));
    }
}

TEST_CASE("phi at the final slice: sign fixture from the k = 0 erf reduction") {
    TimePartition part(1.0, {1.0});
    auto ctx = BasisContext::make(2, 1.0, 1.0, 6);
    for (double x : {-1.1, 0.0, 0.7, 2.3}) {
        CHECK(basis::phi_function(0, 1, x, part, ctx) ==
              doctest::Approx(std::erf(x / std::sqrt(2.0))).epsilon(1e-13));
    }
    // frozen value: erf(0.7 / sqrt(2))
    CHECK(basis::phi_function(0, 1, 0.7, part, ctx) ==
          doctest::Approx(0.5160726955538539).epsilon(1e-12));
}

TEST_CASE("phi closed form equals the adaptive convolution route") {
    TimePartition part(1.0, {0.4, 1.0});
    auto ctx = BasisContext::make(4, 1.0, 0.4, 8);
    quadrature::QuadratureSpec quad;
    quad.abs_tol = 1e-12;
    for (int k = 0; k <= 8; ++k) {
        for (int mu : {1, 2}) {
            for (double x : {-2.4, -0.6, 0.0, 1.1, 3.0}) {
                const double closed = basis::phi_function(k, mu, x, part, ctx);
                const double via_quad = basis::phi_function_quadrature(k, mu, x, part, ctx, quad);
                CHECK(std::abs(closed - via_quad) < 1e-10 * std::max(1.0, std::abs(via_quad)));
            }
        }
    }
}

TEST_CASE("phi closed form equals the full nested 2d quadrature") {
    TimePartition part(1.0, {0.4, 1.0});
    auto ctx = BasisContext::make(2, 1.0, 0.4, 6);
    const int final_slice = part.slice_count();
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    for (int rep = 0; rep < 6; ++rep) {
        const int k = rep % 4;
        const int mu = 1 + (rep % 2);
        const double x = ux(gen);
        const double s = 1.0 - part.time(mu);

        double oracle;
        auto inner = [&](double z) {
            auto f = [&](double w) {
                const double sg = (w > z) ? 1.0 : (w < z ? -1.0 : 0.0);
                return sg * basis::r_function(k, final_slice, w, part, ctx);
            };
            return quadrature::integrate_with_breakpoints(f, {z}, 1e-12);
        };
        if (s == 0.0) {
            oracle = -inner(x);
        } else {
            oracle = -quadrature::integrate(
                [&](double z) { return gauss(s, x - z) * inner(z); }, x - 10.0 * std::sqrt(s),
                x + 10.0 * std::sqrt(s), 1e-11);
        }
        CHECK(basis::phi_function(k, mu, x, part, ctx) == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("skew gram comes out as the symplectic J") {
    quadrature::QuadratureSpec quad;
    quad.abs_tol = 1e-11;
    for (double t1 : {0.5, 0.9}) {
        TimePartition part(1.0, {t1, 1.0});
        auto ctx = BasisContext::make(4, 1.0, t1, 4);
        Eigen::MatrixXd g = basis::skew_gram(ctx, part, quad);
        Eigen::MatrixXd j = skewlin::symplectic_j(4).matrix();
        CHECK((g - j).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(g(0, 1) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(g(1, 0) == doctest::Approx(-1.0).epsilon(1e-8));
        CHECK(std::abs(g(0, 2)) < 1e-8);
        CHECK(g(0, 0) == 0.0);
    }
}
