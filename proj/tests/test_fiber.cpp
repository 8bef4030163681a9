#include <doctest.h>

#include <edgegap/errors.hpp>
#include <edgegap/fiber.hpp>
#include <edgegap/oscillator.hpp>

#include <Eigen/Dense>

#include <cmath>

using namespace edgegap;

namespace {

FiberDiscretization step_disc(double b = 1.0)
{
    return FiberDiscretization::standard(b, EdgePotential::step(0.0, 1.0, 0.0));
}

} // namespace

TEST_CASE("Landau levels without an edge")
{
    for (double b : {0.5, 1.0, 2.0}) {
        const auto d = FiberDiscretization::standard(b, EdgePotential::step(0.0, 0.0, 0.0));
        for (double k : {-5.0, 0.0, 5.0}) {
            const auto E = grid_energies(d, k, 3);
            for (int j = 1; j <= 3; ++j) CHECK(std::abs(E[j - 1] - b * (2 * j - 1)) < 1e-6);
        }
    }
}

TEST_CASE("band limits at large |k|")
{
    const auto d = step_disc();
    const double hi = fiber_energies(d, 10.0, 1)[0];
    const double lo = fiber_energies(d, -10.0, 1)[0];
    CHECK(hi > 2.0 - 1e-3);
    CHECK(hi <= 2.0);
    CHECK(lo >= 1.0);
    CHECK(lo < 1.0 + 1e-3);
}

TEST_CASE("eigenpairs are normalized and sign fixed")
{
    const auto d = step_disc();
    for (double k : {-2.0, 0.5, 3.0}) {
        const auto pairs = solve_fiber(d, k, 3);
        REQUIRE(pairs.size() == 3);
        for (const auto& p : pairs) {
            const double h = p.x[1] - p.x[0];
            double s = 0.0;
            for (std::size_t i = 0; i < p.psi.size(); ++i)
                s += (i == 0 || i + 1 == p.psi.size() ? 0.5 : 1.0) * h * p.psi[i] * p.psi[i];
            CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(p.overlap_with_limit >= 0.0);
        }
        CHECK(pairs[0].E < pairs[1].E);
        CHECK(pairs[1].E < pairs[2].E);
    }
}

TEST_CASE("band functions are non-decreasing and interlaced")
{
    const auto d = step_disc();
    std::vector<double> prev;
    double worst = 0.0;
    for (int i = 0; i <= 80; ++i) {
        const double k = -8.0 + 16.0 * i / 80.0;
        const auto E = fiber_energies(d, k, 3);
        CHECK(E[0] < E[1]);
        CHECK(E[1] < E[2]);
        if (!prev.empty())
            for (int j = 0; j < 3; ++j) worst = std::max(worst, prev[j] - E[j]);
        prev = E;
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("grid doubling moves energies by less than 1e-7")
{
    auto d = step_disc();
    auto dd = d;
    dd.N = 2 * d.N - 1;
    for (double k : {0.0, 2.0, 4.0}) {
        const auto a = fiber_energies(d, k, 3);
        const auto c = fiber_energies(dd, k, 3);
        for (int j = 0; j < 3; ++j) CHECK(std::abs(a[j] - c[j]) < 1e-7);
    }
    SolveOptions opt;
    opt.check_convergence = true;
    CHECK_NOTHROW(solve_fiber(d, 1.0, 2, opt));
}

TEST_CASE("identity-based and grid energies agree away from the tail")
{
    const auto d = step_disc();
    for (double k : {-1.0, 0.0, 1.5}) {
        const auto pairs = solve_fiber(d, k, 2);
        for (const auto& p : pairs) CHECK(std::abs(p.E - p.E_grid) < 1e-7);
    }
}

TEST_CASE("gap edges")
{
    const EdgePotential w = EdgePotential::step(0.0, 1.0, 0.0);
    auto g = gap_edges(1.0, w, 1);
    CHECK(g.lower == doctest::Approx(2.0));
    CHECK(g.upper == doctest::Approx(3.0));
    g = gap_edges(1.0, w, 2);
    CHECK(g.lower == doctest::Approx(4.0));
    CHECK(g.upper == doctest::Approx(5.0));
    CHECK_THROWS_AS(gap_edges(1.0, EdgePotential::step(0.0, 2.0, 0.0), 1), NoGap);
}

TEST_CASE("phi squared against the Gaussian tail")
{
    const EdgePotential w = EdgePotential::step(0.0, 1.0, 0.0);
    CHECK(phi_squared(1, 0.0, 1.0, w) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(phi_squared(1, 2.0, 1.0, w) == doctest::Approx(std::erfc(2.0) / 2.0).epsilon(1e-10));
    CHECK(phi_squared(1, 2.0, 1.0, w) == doctest::Approx(0.0023389).epsilon(1e-4));
    for (double k : {0.0, 1.0, 3.0, 5.0, 7.0})
        CHECK(std::abs(phi_squared(1, k, 1.0, w) - std::erfc(k) / 2.0) <= 1e-8 * std::max(1e-30, std::erfc(k)));
    const EdgePotential w2 = EdgePotential::step(0.0, 2.0, 0.0);
    for (int j : {1, 2, 3})
        CHECK(phi_squared(j, 1.3, 1.0, w2) == doctest::Approx(2.0 * phi_squared(j, 1.3, 1.0, w)).epsilon(1e-12));
    // b and x0 enter through sqrt(b) (k / b - x0)
    const EdgePotential w3 = EdgePotential::step(0.0, 1.0, 0.4);
    CHECK(phi_squared(1, 2.0, 2.0, w3) ==
          doctest::Approx(0.5 * std::erfc(std::sqrt(2.0) * (1.0 - 0.4))).epsilon(1e-10));
}

TEST_CASE("projection distance of rank-one pairs")
{
    // 2x2 oracle: trace norm of u u^T - v v^T
    auto oracle = [](double c) {
        Eigen::Vector2d u(1.0, 0.0), v(c, std::sqrt(1.0 - c * c));
        Eigen::Matrix2d D = u * u.transpose() - v * v.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(D);
        return es.eigenvalues().cwiseAbs().sum();
    };
    CHECK(projection_distance(0.6) == doctest::Approx(1.6).epsilon(1e-14));
    CHECK(projection_distance(0.6) == doctest::Approx(oracle(0.6)).epsilon(1e-12));
    CHECK(projection_distance(0.0) == doctest::Approx(2.0));
    CHECK(projection_distance(0.93) == doctest::Approx(oracle(0.93)).epsilon(1e-12));
    // ||u - v||^2 = 2 - 2c
    CHECK(projection_distance_from_gap(2.0 - 2.0 * 0.6) == doctest::Approx(1.6).epsilon(1e-12));

    const auto flat = FiberDiscretization::standard(1.0, EdgePotential::step(0.0, 0.0, 0.0));
    for (double k : {-3.0, 0.0, 4.0}) CHECK(projection_distance(1, k, flat) < 1e-6);
}

TEST_CASE("gap distance asymptotics")
{
    const auto d = step_disc();
    const auto r = verify_tep2(1, d, {4.0, 5.0, 6.0});
    for (double v : r) CHECK(std::abs(v - 1.0) < 0.05);
    CHECK(r[0] > r[1]);
    CHECK(r[1] > r[2]);
    CHECK(std::abs(verify_tep2(2, d, {6.0})[0] - 1.0) < 0.1);
}

TEST_CASE("scaled projection distance decays")
{
    const auto d = step_disc();
    const auto v = verify_teth1(1, d, {4.0, 6.0});
    CHECK(v[1] < v[0]);
    CHECK(v[1] < 0.2);
    const auto flat = FiberDiscretization::standard(1.0, EdgePotential::step(0.0, 0.0, 0.0));
    CHECK(verify_teth1(1, flat, {2.0})[0] == 0.0);
}

TEST_CASE("step asymptote of phi squared")
{
    const EdgePotential w = EdgePotential::step(0.0, 1.0, 0.0);
    CHECK(std::abs(verify_lau25(1, 1.0, w, {5.0})[0] - 1.0) < 0.05);
    CHECK(std::abs(verify_lau25(2, 1.0, w, {6.0})[0] - 1.0) < 0.1);
    const EdgePotential shifted = EdgePotential::step(3.0, 4.0, 0.0);
    CHECK(verify_lau25(1, 1.0, shifted, {5.0})[0] == doctest::Approx(verify_lau25(1, 1.0, w, {5.0})[0]));
    CHECK_THROWS_AS(verify_lau25(1, 1.0, EdgePotential::smooth_monotone(0.0, 1.0, 0.0, 1.0), {5.0}),
                    WrongPotentialKind);
}

TEST_CASE("band table carries gaps")
{
    const auto t = band_table(step_disc(), {-2.0, 0.0, 2.0}, 2);
    REQUIRE(t.E.size() == 2);
    REQUIRE(t.gaps.size() == 2);
    CHECK(t.gaps[0].lower == doctest::Approx(2.0));
    CHECK(t.gaps[0].upper == doctest::Approx(3.0));
}

TEST_CASE("discretization validation")
{
    auto d = step_disc();
    d.N = 150;
    CHECK_THROWS_AS(d.validate(), InvalidConfig);
    d = step_disc();
    d.half_width = 5.0;
    CHECK_THROWS_AS(d.validate(), InvalidConfig);
}
