#include "edgegap/fiber.hpp"

#include "edgegap/errors.hpp"
#include "edgegap/oscillator.hpp"
#include "edgegap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace edgegap {

namespace {

struct Grid {
    int N = 0;
    double h = 0.0;
    double off = 0.0;   // off-diagonal entry, -1/h^2
    std::vector<double> x;
    std::vector<double> diag;
    std::vector<double> wbar;   // cell-averaged potential
};

Grid make_grid(const FiberDiscretization& d, double k, int N, const double* constant_w = nullptr)
{
    Grid g;
    g.N = N;
    const double c = k / d.b;
    const double L = d.half_width;
    g.h = 2.0 * L / (N - 1);
    g.off = -1.0 / (g.h * g.h);
    g.x.resize(static_cast<std::size_t>(N));
    g.diag.resize(static_cast<std::size_t>(N));
    g.wbar.resize(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        const auto i = static_cast<std::size_t>(n);
        const double x = c - L + n * g.h;
        const double w = constant_w ? *constant_w : d.W.average(x - 0.5 * g.h, x + 0.5 * g.h);
        const double m = d.b * x - k;
        g.x[i] = x;
        g.wbar[i] = w;
        g.diag[i] = 2.0 / (g.h * g.h) + m * m + w;
    }
    return g;
}

// Number of eigenvalues strictly below sigma (Sturm count via LDL^T).
int sturm_count(const Grid& g, double sigma)
{
    const double tiny = std::numeric_limits<double>::min();
    const double e2 = g.off * g.off;
    int count = 0;
    double d = g.diag[0] - sigma;
    if (d < 0) ++count;
    for (std::size_t i = 1; i < g.diag.size(); ++i) {
        if (d == 0.0) d = tiny;
        d = g.diag[i] - sigma - e2 / d;
        if (d < 0) ++count;
    }
    return count;
}

double bisect_eigenvalue(const Grid& g, int j, double lo, double hi)
{
    while (sturm_count(g, hi) < j) hi += (hi - lo) + 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(g, mid) >= j)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> eigenvalues(const Grid& g, int j_max, double lo, double hi_base, double b)
{
    std::vector<double> out;
    for (int j = 1; j <= j_max; ++j) out.push_back(bisect_eigenvalue(g, j, lo, hi_base + 2.0 * b * j));
    return out;
}

// Eigenvector by a twisted factorization at the computed eigenvalue; tails keep relative accuracy.
std::vector<double> twisted_vector(const Grid& g, double sigma)
{
    const std::size_t N = g.diag.size();
    const double tiny = std::numeric_limits<double>::min();
    const double e = g.off, e2 = e * e;
    std::vector<double> dp(N), dm(N);
    dp[0] = g.diag[0] - sigma;
    for (std::size_t i = 1; i < N; ++i) {
        double prev = dp[i - 1] == 0.0 ? tiny : dp[i - 1];
        dp[i] = g.diag[i] - sigma - e2 / prev;
    }
    dm[N - 1] = g.diag[N - 1] - sigma;
    for (std::size_t i = N - 1; i-- > 0;) {
        double next = dm[i + 1] == 0.0 ? tiny : dm[i + 1];
        dm[i] = g.diag[i] - sigma - e2 / next;
    }
    std::size_t r = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
        const double gamma = std::abs(dp[i] + dm[i] - (g.diag[i] - sigma));
        if (gamma < best) {
            best = gamma;
            r = i;
        }
    }
    std::vector<double> z(N, 0.0);
    z[r] = 1.0;
    for (std::size_t i = r; i-- > 0;) z[i] = -e * z[i + 1] / (dp[i] == 0.0 ? tiny : dp[i]);
    for (std::size_t i = r + 1; i < N; ++i) z[i] = -e * z[i - 1] / (dm[i] == 0.0 ? tiny : dm[i]);
    double nrm = 0.0;
    for (double v : z) nrm += v * v;
    nrm = std::sqrt(nrm * g.h);
    for (double& v : z) v /= nrm;
    return z;
}

double dot(const std::vector<double>& a, const std::vector<double>& b, double h)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * h;
}

// Constant-W operator on the moving window: identical in index space for every k.
struct LimitSolution {
    std::vector<double> E;                      // at potential W_+
    std::vector<std::vector<double>> psi;       // sign-aligned with the sampled continuum limit
    std::vector<std::vector<double>> continuum; // sampled psi_{j,inf}
};

std::shared_ptr<const LimitSolution> limit_solution(const FiberDiscretization& d, int N, int j_max)
{
    using Key = std::tuple<double, double, int, double, int>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const LimitSolution>> cache;
    const double whi = d.W.w_plus();
    const Key key{d.b, d.half_width, N, whi, j_max};
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto sol = std::make_shared<LimitSolution>();
    const Grid lim = make_grid(d, 0.0, N, &whi);
    sol->E = eigenvalues(lim, j_max, whi - 1.0, whi + 1.0, d.b);
    for (int j = 1; j <= j_max; ++j) {
        std::vector<double> v = twisted_vector(lim, sol->E[static_cast<std::size_t>(j - 1)]);
        std::vector<double> cont(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) cont[i] = psi_inf(j, 0.0, lim.x[i], d.b);
        if (dot(v, cont, lim.h) < 0)
            for (double& x : v) x = -x;
        sol->psi.push_back(std::move(v));
        sol->continuum.push_back(std::move(cont));
    }
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, sol);
    return sol;
}

struct GridSolution {
    std::vector<double> E;
    std::vector<std::vector<double>> psi;
    std::vector<double> gap;       // E_lim - E on this grid
    std::vector<double> diff_sq;   // ||psi - psi_lim||^2
    std::vector<double> overlap;   // with the sampled continuum limit
    Grid grid;
};

GridSolution solve_grid(const FiberDiscretization& d, double k, int N, int j_max, bool vectors)
{
    GridSolution s;
    s.grid = make_grid(d, k, N);
    const double wlo = d.W.w_minus(), whi = d.W.w_plus();
    s.E = eigenvalues(s.grid, j_max, wlo - 1.0, whi + 1.0, d.b);
    if (!vectors) return s;

    const auto lim = limit_solution(d, N, j_max);
    for (int j = 1; j <= j_max; ++j) {
        const auto jj = static_cast<std::size_t>(j - 1);
        std::vector<double> psi = twisted_vector(s.grid, s.E[jj]);
        const std::vector<double>& plim = lim->psi[jj];
        const std::vector<double>& cont = lim->continuum[jj];
        if (dot(psi, cont, s.grid.h) < 0)
            for (double& v : psi) v = -v;
        // h(k) = h_lim - (W_+ - W), so E_lim - E = <psi_lim, (W_+ - W) psi> / <psi_lim, psi>
        double num = 0.0, den = 0.0, dsq = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            num += plim[i] * (whi - s.grid.wbar[i]) * psi[i];
            den += plim[i] * psi[i];
            const double r = psi[i] - plim[i];
            dsq += r * r;
        }
        s.gap.push_back(den != 0.0 ? num / den : lim->E[jj] - s.E[jj]);
        s.diff_sq.push_back(dsq * s.grid.h);
        s.overlap.push_back(dot(psi, cont, s.grid.h));
        s.psi.push_back(std::move(psi));
    }
    return s;
}

double extrapolate(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

} // namespace

FiberDiscretization FiberDiscretization::standard(double b, const EdgePotential& w, int N)
{
    FiberDiscretization d;
    d.N = N;
    d.b = b;
    d.W = w;
    d.half_width = 12.0 / std::sqrt(b);
    return d;
}

void FiberDiscretization::validate() const
{
    if (!(b > 0.0)) throw InvalidConfig("fiber: b must be positive");
    if (N < 200) throw InvalidConfig("fiber: N must be at least 200");
    if (half_width < 8.0 / std::sqrt(b) - 1e-12) throw InvalidConfig("fiber: half width must be at least 8/sqrt(b)");
}

std::vector<FiberEigenpair> solve_fiber(const FiberDiscretization& disc, double k, int j_max, const SolveOptions& opt)
{
    disc.validate();
    if (j_max < 1 || j_max > disc.N / 10) throw InvalidConfig("fiber: need 1 <= j_max <= N/10");
    GridSolution coarse = solve_grid(disc, k, disc.N, j_max, opt.vectors);
    std::vector<double> E = coarse.E;
    std::vector<double> gap = coarse.gap;
    if (disc.richardson) {
        const GridSolution fine = solve_grid(disc, k, 2 * disc.N - 1, j_max, opt.vectors);
        for (std::size_t i = 0; i < E.size(); ++i) E[i] = extrapolate(coarse.E[i], fine.E[i]);
        for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = extrapolate(coarse.gap[i], fine.gap[i]);
    }
    if (opt.check_convergence) {
        FiberDiscretization dbl = disc;
        dbl.N = 2 * disc.N - 1;
        const std::vector<double> E2 = grid_energies(dbl, k, 1);
        if (std::abs(E2[0] - E[0]) > opt.tolerance)
            throw ConvergenceFailure("fiber: E_1 changed by " + std::to_string(std::abs(E2[0] - E[0])) +
                                     " under grid doubling");
    }
    std::vector<FiberEigenpair> out;
    for (int j = 1; j <= j_max; ++j) {
        const auto jj = static_cast<std::size_t>(j - 1);
        FiberEigenpair p;
        p.j = j;
        p.k = k;
        p.E_grid = E[jj];
        p.E = E[jj];
        if (opt.vectors) {
            // E_j^+ - D or E_j^- + (W_+ - W_- - D), whichever carries the smaller correction
            const double D = std::max(0.0, gap[jj]);
            const double spread = disc.W.w_plus() - disc.W.w_minus();
            p.E = D <= 0.5 * spread ? band_top(disc.b, disc.W, j) - D
                                    : band_bottom(disc.b, disc.W, j) + (spread - D);
            p.x = coarse.grid.x;
            p.psi = coarse.psi[jj];
            p.overlap_with_limit = coarse.overlap[jj];
            p.gap_distance = std::max(0.0, gap[jj]);
            p.projection_distance = projection_distance_from_gap(coarse.diff_sq[jj]);
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<double> fiber_energies(const FiberDiscretization& disc, double k, int j_max)
{
    std::vector<double> out;
    for (const auto& p : solve_fiber(disc, k, j_max)) out.push_back(p.E);
    return out;
}

std::vector<double> grid_energies(const FiberDiscretization& disc, double k, int j_max)
{
    SolveOptions opt;
    opt.vectors = false;
    std::vector<double> out;
    for (const auto& p : solve_fiber(disc, k, j_max, opt)) out.push_back(p.E);
    return out;
}

std::vector<double> gap_distances(const FiberDiscretization& disc, double k, int j_max)
{
    std::vector<double> out;
    for (const auto& p : solve_fiber(disc, k, j_max)) out.push_back(p.gap_distance);
    return out;
}

double band_top(double b, const EdgePotential& w, int j) { return b * (2 * j - 1) + w.w_plus(); }
double band_bottom(double b, const EdgePotential& w, int j) { return b * (2 * j - 1) + w.w_minus(); }

GapEdges gap_edges(double b, const EdgePotential& w, int j)
{
    if (!gap_condition(w, b)) throw NoGap("gap condition W_+ - W_- < 2b fails");
    return {band_top(b, w, j), band_bottom(b, w, j + 1)};
}

namespace {

// Integral of phi_j(u)^2 over (-inf, c].
double lower_mass(int j, double c)
{
    if (c == -std::numeric_limits<double>::infinity()) return 0.0;
    if (c == std::numeric_limits<double>::infinity()) return 1.0;
    auto f = [j](double u) {
        const double v = phi(j, u);
        return v * v;
    };
    if (c <= 0.0) return integrate(f, -std::numeric_limits<double>::infinity(), c);
    return 1.0 - integrate(f, -std::numeric_limits<double>::infinity(), -c);
}

} // namespace

double phi_squared(int j, double k, double b, const EdgePotential& w)
{
    const double sb = std::sqrt(b);
    const double wp = w.w_plus();
    if (w.kind() == PotentialKind::smooth_monotone) {
        auto f = [&](double x) {
            const double v = phi(j, sb * x);
            return (wp - w(x + k / b)) * sb * v * v;
        };
        return integrate(f, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
    }
    // W(x + k/b) is constant on each piece; integrate the Hermite density piecewise in u = sqrt(b) x
    const auto& br = w.breaks();
    const auto& val = w.values();
    double acc = 0.0;
    for (std::size_t i = 0; i < val.size(); ++i) {
        const double jump = wp - val[i];
        if (jump == 0.0) continue;
        const double lo = i == 0 ? -std::numeric_limits<double>::infinity() : sb * (br[i - 1] - k / b);
        const double hi = i == br.size() ? std::numeric_limits<double>::infinity() : sb * (br[i] - k / b);
        acc += jump * (lower_mass(j, hi) - lower_mass(j, lo));
    }
    return std::max(acc, 0.0);
}

double projection_distance(double c)
{
    const double c2 = std::min(1.0, c * c);
    return 2.0 * std::sqrt(1.0 - c2);
}

double projection_distance_from_gap(double diff_sq)
{
    // unit u, v with <u, v> = c >= 0: ||u - v||^2 = 2 - 2c, 1 - c^2 = (1 - c)(1 + c)
    const double one_minus_c = 0.5 * diff_sq;
    const double v = one_minus_c * (2.0 - one_minus_c);
    return 2.0 * std::sqrt(std::max(0.0, v));
}

double projection_distance(int j, double k, const FiberDiscretization& disc)
{
    return solve_fiber(disc, k, j)[static_cast<std::size_t>(j - 1)].projection_distance;
}

BandTable band_table(const FiberDiscretization& disc, const std::vector<double>& k, int j_max)
{
    BandTable t;
    t.k = k;
    t.j_max = j_max;
    t.E.assign(static_cast<std::size_t>(j_max), std::vector<double>(k.size()));
    for (std::size_t i = 0; i < k.size(); ++i) {
        const std::vector<double> e = fiber_energies(disc, k[i], j_max);
        for (int j = 0; j < j_max; ++j) t.E[static_cast<std::size_t>(j)][i] = e[static_cast<std::size_t>(j)];
    }
    if (gap_condition(disc.W, disc.b))
        for (int j = 1; j <= j_max; ++j) t.gaps.push_back(gap_edges(disc.b, disc.W, j));
    return t;
}

std::vector<double> verify_tep2(int j, const FiberDiscretization& disc, const std::vector<double>& k)
{
    std::vector<double> out;
    for (double kk : k) {
        const double d = solve_fiber(disc, kk, j)[static_cast<std::size_t>(j - 1)].gap_distance;
        out.push_back(d / phi_squared(j, kk, disc.b, disc.W));
    }
    return out;
}

std::vector<double> verify_teth1(int j, const FiberDiscretization& disc, const std::vector<double>& k)
{
    std::vector<double> out;
    for (double kk : k) {
        const FiberEigenpair p = solve_fiber(disc, kk, j)[static_cast<std::size_t>(j - 1)];
        if (p.projection_distance == 0.0)
            out.push_back(0.0);
        else
            out.push_back(p.projection_distance / std::sqrt(p.gap_distance));
    }
    return out;
}

double step_asymptote(int j, double k, double b, const EdgePotential& step)
{
    const double x0 = step.step_location();
    const double u = k / std::sqrt(b) - std::sqrt(b) * x0;
    return 0.5 * (step.w_plus() - step.w_minus()) * leading_weight(j, b) * std::pow(k, 2 * j - 3) * std::exp(-u * u);
}

std::vector<double> verify_lau25(int j, double b, const EdgePotential& w, const std::vector<double>& k)
{
    if (w.kind() != PotentialKind::step) throw WrongPotentialKind("step asymptote needs a step potential");
    std::vector<double> out;
    for (double kk : k) out.push_back(phi_squared(j, kk, b, w) / step_asymptote(j, kk, b, w));
    return out;
}

} // namespace edgegap
