#include <doctest.h>

#include <edgegap/errors.hpp>
#include <edgegap/potentials.hpp>

#include <cmath>
#include <random>

using namespace edgegap;

TEST_CASE("step evaluation follows the left-open convention")
{
    const EdgePotential w = EdgePotential::step(0.0, 1.0, 0.0);
    CHECK(w(-1.0) == 0.0);
    CHECK(w(0.0) == 1.0);
    CHECK(w(-1e-15) == 0.0);
    CHECK(w(3.0) == 1.0);
}

TEST_CASE("two-step upper envelope jumps at x0 - delta")
{
    const EdgePotential w = EdgePotential::two_step_upper(0.0, 1.0, 0.0, 0.2);
    CHECK(w(-0.1) == 1.0);
    CHECK(w(-0.2) == 1.0);
    CHECK(w(-0.25) == 0.0);
}

TEST_CASE("limits and saturation point")
{
    auto lim = potential_limits(EdgePotential::step(0.0, 1.0, 0.0));
    CHECK(lim.w_minus == 0.0);
    CHECK(lim.w_plus == 1.0);
    CHECK(lim.x_plus == 0.0);

    lim = potential_limits(EdgePotential::step(-0.5, 0.5, 2.0));
    CHECK(lim.w_minus == -0.5);
    CHECK(lim.w_plus == 0.5);
    CHECK(lim.x_plus == 2.0);

    lim = potential_limits(EdgePotential::smooth_monotone(0.0, 1.0, 0.0, 0.5));
    CHECK(lim.w_minus == 0.0);
    CHECK(lim.w_plus == 1.0);
    CHECK(std::isinf(lim.x_plus));

    const auto pc = EdgePotential::piecewise_constant({-1.0, 0.5}, {0.0, 0.3, 1.0});
    CHECK(potential_limits(pc).x_plus == 0.5);
}

TEST_CASE("constant potentials are rejected")
{
    CHECK_THROWS_AS(potential_limits(EdgePotential::step(1.0, 1.0, 0.0)), ConstantPotential);
}

TEST_CASE("piecewise constant input validation")
{
    CHECK_THROWS_AS(EdgePotential::piecewise_constant({0.0, 0.0}, {0.0, 0.5, 1.0}), InvalidConfig);
    CHECK_THROWS_AS(EdgePotential::piecewise_constant({0.0}, {0.0, 0.5, 1.0}), InvalidConfig);
    CHECK_THROWS_AS(EdgePotential::piecewise_constant({0.0, 1.0}, {0.0, 1.0, 0.5}), InvalidConfig);
}

TEST_CASE("gap condition")
{
    CHECK(gap_condition(EdgePotential::step(0.0, 1.0, 0.0), 1.0));
    CHECK_FALSE(gap_condition(EdgePotential::step(0.0, 2.0, 0.0), 1.0));
    CHECK_FALSE(gap_condition(EdgePotential::step(0.0, 1.0, 0.0), 0.4));
}

TEST_CASE("finiteness predicate")
{
    const EdgePotential step = EdgePotential::step(0.0, 1.0, 0.0);
    CHECK(finiteness_predicate(Perturbation::indicator(rectangle(-2.0, -1.0, 0.0, 1.0)), step));
    CHECK_FALSE(finiteness_predicate(Perturbation::indicator(rectangle(0.1, 0.5, -0.3, 0.3)), step));
    CHECK(finiteness_predicate(Perturbation::indicator(rectangle(0.1, 0.5, -0.3, 0.3)),
                               EdgePotential::smooth_monotone(0.0, 1.0, 0.0, 1.0)));
}

TEST_CASE("every kind is non-decreasing on a random grid")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-6.0, 6.0);
    std::vector<double> xs(10000);
    for (double& x : xs) x = U(rng);
    std::sort(xs.begin(), xs.end());
    const std::vector<EdgePotential> kinds{
        EdgePotential::step(-0.3, 0.7, 0.4),
        EdgePotential::two_step_upper(0.1, 1.0, 0.0, 0.3),
        EdgePotential::piecewise_constant({-2.0, -0.5, 1.0}, {0.0, 0.2, 0.6, 1.0}),
        EdgePotential::smooth_monotone(0.0, 1.5, 0.2, 0.7),
    };
    for (const auto& w : kinds) {
        long bad = 0;
        for (std::size_t i = 1; i < xs.size(); ++i) bad += w(xs[i]) < w(xs[i - 1]);
        CHECK(bad == 0);
    }
}

TEST_CASE("model envelopes bracket the potential")
{
    const std::vector<EdgePotential> family{
        EdgePotential::step(0.0, 1.0, 0.0),
        EdgePotential::step(-0.4, 0.6, 0.0),
        EdgePotential::piecewise_constant({-1.0, 0.0}, {0.0, 0.5, 1.0}),
    };
    for (const auto& w : family) {
        const EdgePotential lo = lower_envelope(w);
        const EdgePotential hi = upper_envelope(w, 0.2);
        for (int i = 0; i <= 4000; ++i) {
            const double x = -4.0 + 8.0 * i / 4000.0;
            REQUIRE(lo(x) <= w(x));
            REQUIRE(w(x) <= hi(x));
        }
    }
}

TEST_CASE("sandwich data bracket the perturbation pointwise")
{
    Perturbation v = Perturbation::indicator(rectangle(-0.5, 0.5, -1.0, 1.0), 2.0);
    v.omega_minus = rectangle(-0.25, 0.25, -0.5, 0.5);
    v.omega_plus = rectangle(-1.0, 1.0, -2.0, 2.0);
    v.c0_minus = 1.5;
    v.c0_plus = 3.0;
    v.validate();
    for (int i = 0; i <= 200; ++i)
        for (int k = 0; k <= 200; ++k) {
            const double x = -1.5 + 3.0 * i / 200.0, y = -2.5 + 5.0 * k / 200.0;
            const double lo = v.omega_minus.contains({x, y}) ? v.c0_minus : 0.0;
            const double hi = v.omega_plus.contains({x, y}) ? v.c0_plus : 0.0;
            REQUIRE(lo <= v(x, y));
            REQUIRE(v(x, y) <= hi);
        }
}

TEST_CASE("perturbation validation")
{
    Perturbation v = Perturbation::indicator(rectangle(0.0, 1.0, 0.0, 1.0));
    v.c0_minus = 2.0;
    CHECK_THROWS_AS(v.validate(), InvalidConfig);

    v = Perturbation::indicator(rectangle(0.0, 1.0, 0.0, 1.0));
    v.omega_minus = rectangle(0.5, 1.5, 0.0, 1.0);
    CHECK_THROWS_AS(v.validate(), InvalidConfig);

    v = Perturbation::indicator(rectangle(0.0, 1.0, 0.0, 1.0));
    v.omega_plus = rectangle(0.2, 1.0, 0.0, 1.0);
    CHECK_THROWS_AS(v.validate(), InvalidConfig);

    const Polygon bowtie({{0, 0}, {1, 1}, {1, 0}, {0, 1}});
    CHECK_THROWS_AS(Perturbation::indicator(bowtie).validate(), InvalidConfig);
}

TEST_CASE("translation moves the saturation point and the support together")
{
    const EdgePotential w = EdgePotential::step(0.0, 1.0, 0.7).translated(-0.7);
    CHECK(w.x_plus() == doctest::Approx(0.0));
    const Perturbation v = Perturbation::indicator(rectangle(0.2, 1.2, 0.0, 1.0)).translated(-0.7);
    CHECK(v.X_minus() == doctest::Approx(-0.5));
    CHECK(v.X_plus() == doctest::Approx(0.5));
}
