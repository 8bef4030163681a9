#include <doctest.h>

#include <edgegap/oscillator.hpp>
#include <edgegap/quadrature.hpp>

#include <cmath>
#include <numbers>

using namespace edgegap;

namespace {

const double pi = std::numbers::pi;

// Closed form with std::hermite (physicists' polynomials).
double phi_direct(int j, double x)
{
    const unsigned n = static_cast<unsigned>(j - 1);
    const double norm = std::sqrt(std::pow(2.0, n) * std::tgamma(n + 1.0) * std::sqrt(pi));
    return std::hermite(n, x) * std::exp(-0.5 * x * x) / norm;
}

} // namespace

TEST_CASE("Hermite function values at the origin")
{
    CHECK(phi(1, 0.0) == doctest::Approx(std::pow(pi, -0.25)).epsilon(1e-14));
    CHECK(std::abs(phi(2, 0.0)) < 1e-15);
    // H_2(0) = -2, normalization sqrt(4 * 2 * sqrt(pi))
    CHECK(phi(3, 0.0) == doctest::Approx(-2.0 / std::sqrt(8.0 * std::sqrt(pi))).epsilon(1e-14));
    CHECK(phi(3, 0.0) == doctest::Approx(-0.5311259).epsilon(1e-7));
}

TEST_CASE("recurrence matches the closed form")
{
    double worst = 0.0;
    for (int j = 1; j <= 6; ++j)
        for (int i = 0; i <= 200; ++i) {
            const double x = -5.0 + 10.0 * i / 200.0;
            worst = std::max(worst, std::abs(phi(j, x) - phi_direct(j, x)));
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("orthonormality under Gauss-Hermite quadrature")
{
    const HermiteRule g = gauss_hermite(200);
    double worst = 0.0;
    for (int a = 1; a <= 8; ++a)
        for (int c = 1; c <= 8; ++c) {
            double s = 0.0;
            for (std::size_t i = 0; i < g.nodes.size(); ++i)
                s += g.scaled_weights[i] * phi(a, g.nodes[i]) * phi(c, g.nodes[i]);
            worst = std::max(worst, std::abs(s - (a == c ? 1.0 : 0.0)));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("high levels stay finite and normalized")
{
    const HermiteRule g = gauss_hermite(400);
    for (int j : {50, 150, 200}) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.scaled_weights[i] * std::pow(phi(j, g.nodes[i]), 2);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("sign convention: positive past the last turning point")
{
    for (int j = 1; j <= 40; ++j) CHECK(phi(j, std::sqrt(2.0 * j) + 2.0) > 0.0);
}

TEST_CASE("limiting fiber eigenfunctions")
{
    CHECK(psi_inf(1, 0.0, 0.0, 1.0) == doctest::Approx(std::pow(pi, -0.25)).epsilon(1e-14));
    CHECK(psi_inf(1, 0.0, 0.0, 4.0) == doctest::Approx(std::pow(4.0, 0.25) * std::pow(pi, -0.25)).epsilon(1e-14));

    const HermiteRule g = gauss_hermite(160);
    for (int j : {1, 2, 5}) {
        for (double b : {0.5, 1.0, 3.0}) {
            for (double k : {-4.0, 0.0, 2.5}) {
                // substitute x = (u + k / sqrt(b)) / sqrt(b)
                double s = 0.0;
                for (std::size_t i = 0; i < g.nodes.size(); ++i) {
                    const double x = (g.nodes[i] + k / std::sqrt(b)) / std::sqrt(b);
                    s += g.scaled_weights[i] * std::pow(psi_inf(j, k, x, b), 2) / std::sqrt(b);
                }
                CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("p_j coefficients")
{
    CHECK(p_coeff(1, 1.0) == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-14));
    CHECK(p_coeff(2, 1.0) == doctest::Approx(0.5 / std::sqrt(pi)).epsilon(1e-14));
    CHECK(p_coeff(1, 4.0) == doctest::Approx(2.0 / std::sqrt(pi)).epsilon(1e-14));
    for (int j = 1; j <= 6; ++j) CHECK(leading_weight(j, 1.3) == doctest::Approx(std::pow(4.0, j - 1) * p_coeff(j, 1.3)));
}

TEST_CASE("leading weight is the squared top coefficient of psi_inf")
{
    // Top coefficient of phi_j in x is 2^{j-1} / sqrt(2^{j-1} (j-1)! sqrt(pi)); at b = 1 the (-k)^{j-1} term of
    // phi_j(x - k) carries the same magnitude.
    for (int j = 1; j <= 8; ++j) {
        const double top = std::pow(2.0, j - 1) / std::sqrt(std::pow(2.0, j - 1) * std::tgamma(j) * std::sqrt(pi));
        CHECK(leading_weight(j, 1.0) == doctest::Approx(top * top).epsilon(1e-13));
    }
}

TEST_CASE("large-k asymptotic form")
{
    for (double k : {0.0, 3.0, 9.0})
        CHECK(psi_inf_asymptotic(1, k, 0.4, 1.0) == doctest::Approx(psi_inf(1, k, 0.4, 1.0)).epsilon(1e-13));

    const double r2 = psi_inf_asymptotic(2, 8.0, 0.0, 1.0) / psi_inf(2, 8.0, 0.0, 1.0);
    CHECK(std::abs(r2 - 1.0) < 0.05);

    // j = 3 at b = 1: phi_3(u) has polynomial (4u^2 - 2); the asymptotic form keeps 4k^2, so the ratio is
    // k^2 / (u^2 - 1/2) with u = x - k.
    const double k = 12.0, x = 0.3, u = x - k;
    const double r3 = psi_inf_asymptotic(3, k, x, 1.0) / psi_inf(3, k, x, 1.0);
    CHECK(r3 == doctest::Approx(k * k / (u * u - 0.5)).epsilon(1e-12));
}

TEST_CASE("j = 3 asymptotic ratio within 5 percent at k = 12, x = 0.3" * doctest::may_fail())
{
    // The exact ratio is 144 / 136.39 = 1.0558; the 5% target is not met.
    const double r3 = psi_inf_asymptotic(3, 12.0, 0.3, 1.0) / psi_inf(3, 12.0, 0.3, 1.0);
    CHECK(std::abs(r3 - 1.0) < 0.05);
}
