#include <doctest.h>

#include <edgegap/counting.hpp>
#include <edgegap/errors.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace edgegap;

namespace {

Eigen::MatrixXcd random_hermitian(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) a(i, k) = {N(rng), N(rng)};
    return 0.5 * (a + a.adjoint());
}

long eig_count(const Eigen::MatrixXcd& m, double s)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return static_cast<long>((es.eigenvalues().array() > s).count());
}

} // namespace

TEST_CASE("small explicit counts")
{
    Eigen::MatrixXd d = Eigen::Vector2d(2.0, 0.5).asDiagonal();
    CHECK(count_above(d, 1.0).count == 1);
    CHECK(count_above(Eigen::MatrixXd(Eigen::MatrixXd::Identity(5, 5)), 1.0).count == 0);
    Eigen::MatrixXd e = Eigen::Vector2d(-2.0, 0.5).asDiagonal();
    CHECK(count_below(e, 1.0).count == 1);
    CHECK(count_below(Eigen::MatrixXd(Eigen::MatrixXd::Zero(4, 4)), 0.3).count == 0);
    Eigen::MatrixXd t = Eigen::Vector2d(3.0, 1.0).asDiagonal();
    CHECK(n_star(t, 2.0).count == 1);
    CHECK(n_star(Eigen::MatrixXd(Eigen::MatrixXd::Zero(3, 5)), 0.1).count == 0);
}

TEST_CASE("ties are flagged, the strict count is kept")
{
    const auto rep = count_above(Eigen::MatrixXd(Eigen::MatrixXd::Identity(5, 5)), 1.0);
    CHECK(rep.tie);
    CHECK(rep.count == 0);
    CHECK(rep.count_high == 5);
    CHECK_FALSE(rep.warnings.empty());
}

TEST_CASE("counts agree with a dense eigensolver on random Hermitian matrices")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> S(-6.0, 6.0);
    long mismatches = 0;
    for (int t = 0; t < 1000; ++t) {
        const Eigen::MatrixXcd m = random_hermitian(30, rng);
        const double s = S(rng);
        const auto rep = count_above(m, s);
        if (!rep.tie) mismatches += rep.count != eig_count(m, s);
    }
    CHECK(mismatches == 0);
}

TEST_CASE("forced inertia route agrees with the eigen route")
{
    std::mt19937_64 rng(12);
    CountingOptions opt;
    opt.force_inertia = true;
    for (int t = 0; t < 200; ++t) {
        const Eigen::MatrixXcd m = random_hermitian(12, rng);
        const auto a = count_above(m, 0.7);
        const auto b = count_above(m, 0.7, opt);
        CHECK(b.route == CountRoute::hp_inertia);
        CHECK(a.count == b.count);
    }
}

TEST_CASE("count_below is count_above of the negation")
{
    std::mt19937_64 rng(13);
    for (int t = 0; t < 100; ++t) {
        const Eigen::MatrixXcd m = random_hermitian(10, rng);
        CHECK(count_below(m, 0.4).count == count_above(Eigen::MatrixXcd(-m), 0.4).count);
    }
}

TEST_CASE("n_star is invariant under adjoint")
{
    std::mt19937_64 rng(14);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        Eigen::MatrixXcd a(7, 4);
        for (int i = 0; i < 7; ++i)
            for (int k = 0; k < 4; ++k) a(i, k) = {N(rng), N(rng)};
        CHECK(n_star(a, 1.5).count == n_star(Eigen::MatrixXcd(a.adjoint()), 1.5).count);
    }
}

TEST_CASE("counts are non-increasing in the threshold")
{
    std::mt19937_64 rng(15);
    const Eigen::MatrixXcd m = random_hermitian(25, rng);
    long prev = 1000;
    for (int i = 0; i <= 100; ++i) {
        const long c = count_above(m, -8.0 + 0.16 * i).count;
        CHECK(c <= prev);
        prev = c;
    }
}

TEST_CASE("Weyl inequality on random pairs")
{
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> S(0.01, 4.0);
    long bad = 0;
    for (int t = 0; t < 1000; ++t) {
        const Eigen::MatrixXcd a = random_hermitian(20, rng), b = random_hermitian(20, rng);
        const double s1 = S(rng), s2 = S(rng);
        bad += count_above(Eigen::MatrixXcd(a + b), s1 + s2).count > count_above(a, s1).count + count_above(b, s2).count;
    }
    CHECK(bad == 0);
}

TEST_CASE("Ky-Fan inequality on random rectangular pairs")
{
    std::mt19937_64 rng(17);
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> S(0.01, 6.0);
    auto rect = [&] {
        Eigen::MatrixXcd t(20, 14);
        for (int i = 0; i < 20; ++i)
            for (int k = 0; k < 14; ++k) t(i, k) = {N(rng), N(rng)};
        return t;
    };
    long bad = 0;
    for (int t = 0; t < 1000; ++t) {
        const Eigen::MatrixXcd a = rect(), b = rect();
        const double s1 = S(rng), s2 = S(rng);
        bad += n_star(Eigen::MatrixXcd(a + b), s1 + s2).count > n_star(a, s1).count + n_star(b, s2).count;
    }
    CHECK(bad == 0);
}

TEST_CASE("graded matrices: precision ladder against a 512-bit oracle")
{
    std::mt19937_64 rng(18);
    std::uniform_real_distribution<double> G(0.0, 150.0);
    std::normal_distribution<double> N(0.0, 1.0);
    const int n = 16;
    long mismatches = 0, checked = 0;
    for (int t = 0; t < 100; ++t) {
        Eigen::MatrixXd B(n, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) B(i, k) = N(rng);
        const Eigen::MatrixXd K = B * B.transpose() / n + 1e-3 * Eigen::MatrixXd::Identity(n, n);
        std::vector<double> g(n);
        for (double& x : g) x = G(rng);

        const HpAssembler assemble = [&](int bits) {
            HpPrecisionGuard guard(bits);
            HpHermitian h;
            h.n = n;
            h.re.resize(static_cast<std::size_t>(n * n));
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k)
                    h.re[static_cast<std::size_t>(i * n + k)] = exp(HpReal(g[i]) + HpReal(g[k])) * HpReal(K(i, k));
            return h;
        };
        const HpHermitian oracle = assemble(512);
        for (double s : {1e-6, 1e-3, 1.0, 1e3, 1e6}) {
            CountingOptions opt;
            opt.precision_cap = 256;
            const auto rep = count_above(assemble, s, opt);
            HpPrecisionGuard guard(512);
            std::vector<HpReal> a = oracle.re;
            for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i * n + i)] -= HpReal(s);
            const Inertia in = ldlt_inertia(a, n, 512);
            ++checked;
            mismatches += rep.count != in.positive;
        }
    }
    CHECK(checked == 500);
    CHECK(mismatches == 0);
}

TEST_CASE("precision ladder")
{
    CHECK(precision_ladder(512) == std::vector<int>{53, 128, 256, 512});
    CHECK(precision_ladder(256) == std::vector<int>{53, 128, 256});
}

TEST_CASE("log-magnitude form round trip")
{
    std::mt19937_64 rng(19);
    const Eigen::MatrixXcd m = random_hermitian(6, rng);
    const LogMatrix lm = LogMatrix::from(m);
    CHECK((lm.to_complex() - m).norm() < 1e-12 * m.norm());
    CHECK(count_above(lm, 0.5).count == count_above(m, 0.5).count);
}
