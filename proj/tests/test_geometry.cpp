#include <doctest.h>

#include <edgegap/errors.hpp>
#include <edgegap/geometry.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace edgegap;

namespace {

const double pi = std::numbers::pi;
const double e = std::numbers::e;

// Root of t ln t = s on [1, inf) by plain bisection.
double kappa_bisect(double s)
{
    double lo = 1.0, hi = 2.0;
    while (hi * std::log(hi) < s) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid * std::log(mid) < s ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Polygon random_star(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int n = 5 + static_cast<int>(U(rng) * 10);
    const double cx = 0.1 + 0.5 * U(rng), cy = U(rng) - 0.5;
    std::vector<double> ang(n);
    for (double& a : ang) a = 2.0 * pi * U(rng);
    std::sort(ang.begin(), ang.end());
    std::vector<Point> v;
    for (double a : ang) {
        const double r = 0.05 + 0.4 * U(rng);
        v.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    return Polygon(v);
}

} // namespace

TEST_CASE("kappa values")
{
    CHECK(std::abs(kappa(0.0) - 1.0) < 1e-10);
    CHECK(std::abs(kappa(e) - e) < 1e-10);
    CHECK(kappa(1.0) == doctest::Approx(1.7632228).epsilon(1e-7));
    CHECK(kappa(1.0) == doctest::Approx(kappa_bisect(1.0)).epsilon(1e-11));
    CHECK_THROWS_AS(kappa(-0.1), DomainError);
}

TEST_CASE("kappa inverts t ln t")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 50.0);
    double prev_s = 0.0, prev_k = 1.0;
    for (int i = 0; i < 100; ++i) {
        const double s = U(rng);
        const double k = kappa(s);
        CHECK(k >= 1.0);
        CHECK(std::abs(k * std::log(k) - s) < 1e-10 * std::max(1.0, s));
        if (s > prev_s) CHECK(k > prev_k);
        prev_s = s;
        prev_k = k;
    }
}

TEST_CASE("longest vertical chord")
{
    CHECK(c_minus(rectangle(0.1, 0.5, -0.3, 0.3)) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(std::abs(c_minus(regular_polygon(0.0, 0.0, 1.0, 720)) - 2.0) < 1e-4);
    CHECK(std::abs(c_minus(Polygon({{0, 0}, {1, 0}, {1, 2}})) - 2.0) < 1e-6);
    // two prongs at the same x do not add up
    const Polygon u({{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}});
    CHECK(c_minus(u) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("clipping to the right half-plane")
{
    const Polygon c = clip_positive_halfplane(rectangle(-1.0, 1.0, 0.0, 1.0));
    CHECK(c.x_min() == doctest::Approx(0.0));
    CHECK(c.x_max() == doctest::Approx(1.0));
    CHECK(c.area() == doctest::Approx(1.0));
    const Polygon r = rectangle(0.1, 0.5, -0.3, 0.3);
    CHECK(clip_positive_halfplane(r).area() == doctest::Approx(r.area()));
    CHECK_THROWS_AS(clip_positive_halfplane(rectangle(-2.0, -1.0, 0.0, 1.0)), EmptyIntersection);
}

TEST_CASE("enclosing-disk functional")
{
    const Polygon left = regular_polygon(-2.0, 0.0, 1.0, 720);
    CHECK(std::abs(c_plus(left).value - 1.0) < 1e-3);

    const Polygon right = regular_polygon(2.0, 0.0, 1.0, 720);
    const double centered = kappa(2.0 / e);
    CHECK(centered == doctest::Approx(1.593).epsilon(5e-3));
    const CPlusResult r = c_plus(right);
    CHECK(r.value <= disk_functional(right, 2.0, 0.0) + 1e-9);
    CHECK(r.value == doctest::Approx(centered).epsilon(2e-3));
}

TEST_CASE("c_plus respects the half-diameter bound and explicit disks")
{
    std::mt19937_64 rng(5);
    for (int t = 0; t < 30; ++t) {
        const Polygon p = random_star(rng);
        const CPlusResult r = c_plus(p);
        CHECK(r.value >= 0.5 * p.diameter() - 1e-6);
        const Point c = p.centroid();
        CHECK(r.value <= disk_functional(p, c.x, c.y) + 1e-9);
    }
}

TEST_CASE("asymptotic constants")
{
    const Polygon r = rectangle(0.1, 0.5, -0.3, 0.3);
    const auto c = asymptotic_constants(r, r, 1.0);
    CHECK(c.C_minus == doctest::Approx(0.6 / (2.0 * pi)).epsilon(1e-10));
    CHECK(c.C_minus == doctest::Approx(0.09549).epsilon(1e-4));
    CHECK(c.C_plus == doctest::Approx(e * c_plus(r).value).epsilon(1e-10));
    CHECK(c.C_minus < c.C_plus);

    const auto c4 = asymptotic_constants(r, r, 4.0);
    CHECK(c4.C_minus == doctest::Approx(2.0 * c.C_minus).epsilon(1e-12));
    CHECK(c4.C_plus == doctest::Approx(2.0 * c.C_plus).epsilon(1e-12));

    CHECK_THROWS_AS(asymptotic_constants(rectangle(-2, -1, 0, 1), r, 1.0), EmptyIntersection);
}

TEST_CASE("lower constant stays below the upper one on random polygons")
{
    std::mt19937_64 rng(6);
    long bad = 0;
    for (int t = 0; t < 50; ++t) {
        const Polygon p = random_star(rng);
        const auto c = asymptotic_constants(p, p, 1.0);
        bad += !(c.C_minus < c.C_plus);
    }
    CHECK(bad == 0);
}

TEST_CASE("clipping never lengthens chords")
{
    std::mt19937_64 rng(8);
    for (int t = 0; t < 40; ++t) {
        const Polygon p = random_star(rng).translated(-0.3, 0.0);
        if (p.x_max() <= 0.0) continue;
        CHECK(c_minus(clip_positive_halfplane(p)) <= c_minus(p) + 1e-9);
    }
}

TEST_CASE("chord length is translation invariant")
{
    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
        const Polygon p = random_star(rng);
        CHECK(c_minus(p.translated(3.7, -1.2)) == doctest::Approx(c_minus(p)).epsilon(1e-9));
    }
}

TEST_CASE("polygon basics")
{
    const Polygon r = rectangle(0.0, 2.0, 0.0, 1.0);
    CHECK(r.area() == doctest::Approx(2.0));
    CHECK(r.diameter() == doctest::Approx(std::sqrt(5.0)));
    CHECK(r.contains({1.0, 0.5}));
    CHECK_FALSE(r.contains({2.5, 0.5}));
    CHECK(r.is_simple());
    CHECK_FALSE(Polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}).is_simple());
    const auto ch = r.vertical_chords(1.0);
    REQUIRE(ch.size() == 1);
    CHECK(ch[0].second - ch[0].first == doctest::Approx(1.0));
    CHECK(regular_polygon(0, 0, 1, 720).area() == doctest::Approx(pi).epsilon(1e-4));
}
