#include "edgegap/modelops.hpp"

#include "edgegap/errors.hpp"
#include "edgegap/oscillator.hpp"
#include "edgegap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace edgegap {

namespace {

constexpr double pi = std::numbers::pi;

Rule interval_rule(const Interval& I, int n, int order)
{
    const int panels = std::max(1, (n + order - 1) / order);
    std::vector<double> breaks;
    for (int i = 0; i <= panels; ++i) breaks.push_back(I.lo + I.length() * i / panels);
    return composite_gauss(breaks, order);
}

void check_level_gap(int j, double lambda, const Problem& p)
{
    if (j < 1) throw DomainError("level j must be >= 1");
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
    const GapEdges g = gap_edges(p.b(), p.W(), j);
    if (!(g.lower + lambda < g.upper)) throw DomainError("lambda outside the spectral gap");
}

double max_abs_z(const Polygon& omega, double shift)
{
    double r = 0.0;
    for (const Point& v : omega.vertices()) r = std::max(r, std::hypot(v.x + shift, v.y));
    return r;
}

} // namespace

Interval Interval::minus(double delta)
{
    if (!(delta > 0.0 && delta < 0.5)) throw DomainError("delta must lie in (0, 1/2)");
    return {delta, 1.0 - delta};
}

Interval Interval::plus(double delta)
{
    if (!(delta > 0.0 && delta < 0.5)) throw DomainError("delta must lie in (0, 1/2)");
    return {0.0, 1.0 + delta};
}

Interval Interval::star(double delta)
{
    if (!(delta > 0.0 && delta < 0.5)) throw DomainError("delta must lie in (0, 1/2)");
    return {0.0, 1.0 / (1.0 + delta)};
}

void Interval::validate() const
{
    if (!(lo >= 0.0 && hi > lo && std::isfinite(hi))) throw DomainError("interval must be a bounded subset of (0, inf)");
}

DiscretizedOperator holomorphic_gram(double m, double shift, const Polygon& omega, const Interval& I,
                                     double weight_b, const HoloQuad& q)
{
    if (!(m > 0.0)) throw DomainError("m must be positive");
    I.validate();
    DiscretizedOperator op;
    const int nk = q.k_nodes > 0
                       ? q.k_nodes
                       : 32 + static_cast<int>(std::ceil(2.0 * m * I.length() * max_abs_z(omega, shift) / pi));
    const Rule k = interval_rule(I, nk, q.k_order);
    const double xr = omega.x_max();
    const double rate = 2.0 * m * I.hi + 2.0 * weight_b * std::max(std::abs(omega.x_min()), std::abs(xr));
    const ChordRule cr = chord_rule(omega, std::min(0.1, q.x_rate / rate), q.x_order);

    const auto n = static_cast<Eigen::Index>(k.size());
    op.rows = op.cols = k;
    op.log_scale.resize(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const double ka = k.nodes[static_cast<std::size_t>(a)];
        op.log_scale[a] = 0.5 * std::log(k.weights[static_cast<std::size_t>(a)]) + std::log(m) - 0.5 * std::log(pi) +
                          0.5 * std::log(ka) + m * (xr + shift) * ka;
    }

    const std::size_t nq = cr.x.size();
    std::vector<double> cw(nq);
    for (std::size_t i = 0; i < nq; ++i) cw[i] = cr.w[i] * std::exp(-weight_b * cr.x[i] * cr.x[i]);

    op.core = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index c = a; c < n; ++c) {
            const double ka = k.nodes[static_cast<std::size_t>(a)], kc = k.nodes[static_cast<std::size_t>(c)];
            std::complex<double> s = 0.0;
            for (std::size_t i = 0; i < nq; ++i)
                s += cw[i] * std::exp(m * (cr.x[i] - xr) * (ka + kc)) * chord_fourier(cr.chords[i], m * (ka - kc));
            op.core(a, c) = s;
            op.core(c, a) = std::conj(s);
        }
    for (Eigen::Index a = 0; a < n; ++a) op.core(a, a) = op.core(a, a).real();

    bool same_chords = nq > 0;
    for (std::size_t i = 1; i < nq && same_chords; ++i) same_chords = cr.chords[i] == cr.chords[0];

    op.hp_core = [k, cr, cw, m, xr, same_chords](int) {
        const int nn = static_cast<int>(k.size());
        const auto N = static_cast<std::size_t>(nn);
        const std::size_t nq2 = cr.x.size();
        HpHermitian h;
        h.n = nn;
        h.re.assign(N * N, HpReal(0));
        h.im.assign(N * N, HpReal(0));
        std::vector<HpReal> kk(N);
        for (std::size_t a = 0; a < N; ++a) kk[a] = HpReal(k.nodes[a]);
        const HpReal hm(m);

        // per node: c_q exp(m (x_q - x_r) k_a)
        std::vector<HpReal> amp(nq2 * N);
        for (std::size_t i = 0; i < nq2; ++i) {
            const HpReal cq(cw[i]);
            const HpReal dx = HpReal(cr.x[i]) - HpReal(xr);
            for (std::size_t a = 0; a < N; ++a) amp[i * N + a] = sqrt(cq) * exp(hm * dx * kk[a]);
        }
        // chord end phases m k_a y
        std::vector<std::pair<double, double>> ends;
        std::vector<std::size_t> offset(nq2 + 1, 0);
        for (std::size_t i = 0; i < nq2; ++i) {
            const std::size_t use = same_chords && i > 0 ? 0 : cr.chords[i].size();
            offset[i + 1] = offset[i] + use;
            if (use)
                for (const auto& c : cr.chords[i]) ends.push_back(c);
        }
        const std::size_t ne = ends.size();
        std::vector<HpReal> ca(ne * N), sa(ne * N), cb(ne * N), sb(ne * N);
        for (std::size_t e = 0; e < ne; ++e)
            for (std::size_t a = 0; a < N; ++a) {
                const HpReal ta = hm * kk[a] * HpReal(ends[e].first), tb = hm * kk[a] * HpReal(ends[e].second);
                ca[e * N + a] = cos(ta);
                sa[e * N + a] = sin(ta);
                cb[e * N + a] = cos(tb);
                sb[e * N + a] = sin(tb);
            }
        // (e^{i w y_b} - e^{i w y_a}) / (i w) summed over a chord list, w = m (k_a - k_c)
        auto chord_sum = [&](std::size_t lo, std::size_t hi, std::size_t a, std::size_t c, HpReal& yr, HpReal& yi) {
            yr = 0;
            yi = 0;
            if (a == c) {
                for (std::size_t e = lo; e < hi; ++e) yr += HpReal(ends[e].second) - HpReal(ends[e].first);
                return;
            }
            HpReal num_re = 0, num_im = 0;
            for (std::size_t e = lo; e < hi; ++e) {
                // e^{i(t_a - t_c)} = (c_a c_c + s_a s_c) + i (s_a c_c - c_a s_c)
                num_re += cb[e * N + a] * cb[e * N + c] + sb[e * N + a] * sb[e * N + c] -
                          (ca[e * N + a] * ca[e * N + c] + sa[e * N + a] * sa[e * N + c]);
                num_im += sb[e * N + a] * cb[e * N + c] - cb[e * N + a] * sb[e * N + c] -
                          (sa[e * N + a] * ca[e * N + c] - ca[e * N + a] * sa[e * N + c]);
            }
            const HpReal w = hm * (kk[a] - kk[c]);
            yr = num_im / w;
            yi = -num_re / w;
        };

        HpReal yr, yi;
        for (std::size_t a = 0; a < N; ++a)
            for (std::size_t c = a; c < N; ++c) {
                HpReal re = 0, im = 0;
                if (same_chords) {
                    HpReal s = 0;
                    for (std::size_t i = 0; i < nq2; ++i) s += amp[i * N + a] * amp[i * N + c];
                    chord_sum(0, ne, a, c, yr, yi);
                    re = s * yr;
                    im = s * yi;
                } else {
                    for (std::size_t i = 0; i < nq2; ++i) {
                        chord_sum(offset[i], offset[i + 1], a, c, yr, yi);
                        const HpReal t = amp[i * N + a] * amp[i * N + c];
                        re += t * yr;
                        im += t * yi;
                    }
                }
                h.re[a * N + c] = re;
                h.im[a * N + c] = im;
                h.re[c * N + a] = re;
                h.im[c * N + a] = -im;
            }
        for (std::size_t a = 0; a < N; ++a) h.im[a * N + a] = 0;
        return h;
    };
    return op;
}

DiscretizedOperator gamma_gram(Side side, double m, double delta, const Polygon& omega, double b, const HoloQuad& q)
{
    if (side == Side::minus) return holomorphic_gram(m, 0.0, omega, Interval::minus(delta), b, q);
    return holomorphic_gram(m, delta, omega, Interval::plus(delta), b, q);
}

double g_sinc_kernel(double m, double k, double kp)
{
    const double d = k - kp;
    const double t = m * d;
    const double sinc = std::abs(t) < 1e-6 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
    return m / pi * sinc * 2.0 * std::sqrt(k * kp) / (k + kp);
}

double g_minus_kernel(double eta, double m, double k, double kp)
{
    return std::exp(eta * m * (k + kp)) * g_sinc_kernel(m, k, kp);
}

DiscretizedOperator g_sinc(const Interval& I, double m, int n)
{
    I.validate();
    if (!(m > 0.0)) throw DomainError("m must be positive");
    if (n <= 0) n = 32 + static_cast<int>(std::ceil(m * I.length()));
    const Rule k = interval_rule(I, n, 16);
    DiscretizedOperator op;
    op.rows = op.cols = k;
    const auto N = static_cast<Eigen::Index>(k.size());
    op.log_scale.resize(N);
    op.core.resize(N, N);
    for (Eigen::Index a = 0; a < N; ++a) {
        op.log_scale[a] = 0.5 * std::log(k.weights[static_cast<std::size_t>(a)]);
        for (Eigen::Index c = 0; c < N; ++c)
            op.core(a, c) = g_sinc_kernel(m, k.nodes[static_cast<std::size_t>(a)], k.nodes[static_cast<std::size_t>(c)]);
    }
    return op;
}

double kms_trace_ratio(const Interval& I, double m, int l, int n)
{
    if (l < 1) throw DomainError("power l must be >= 1");
    const DiscretizedOperator op = g_sinc(I, m, n);
    const Eigen::MatrixXd M = op.matrix().real();
    if (l == 1) return M.trace() / m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s += std::pow(es.eigenvalues()[i], l);
    return s / m;
}

double kms_count_ratio(const Interval& I, double m, double s, int n, CountingReport* report)
{
    if (!(s > 0.0) || s == 1.0) throw DomainError("threshold s must be positive and different from 1");
    const CountingReport r = count_above(g_sinc(I, m, n), s);
    if (report) *report = r;
    return static_cast<double>(r.count) / m;
}

std::vector<std::vector<double>> theta_coeffs(double delta, int q_max)
{
    if (q_max < 0 || q_max > 60) throw DomainError("theta_coeffs: q_max must lie in [0, 60]");
    const double a = Interval::star(delta).hi;
    std::vector<std::vector<double>> t(static_cast<std::size_t>(q_max + 1),
                                       std::vector<double>(static_cast<std::size_t>(q_max + 1), 0.0));
    // <t^q, P_l(2t - 1)> on (0, 1) = (q!)^2 / ((q - l)! (q + l + 1)!)
    for (int q = 0; q <= q_max; ++q)
        for (int l = 0; l <= q; ++l) {
            const double lg = 2.0 * std::lgamma(q + 1.0) - std::lgamma(q - l + 1.0) - std::lgamma(q + l + 2.0);
            t[static_cast<std::size_t>(q)][static_cast<std::size_t>(l)] =
                std::pow(a, q + 0.5) * std::sqrt(2.0 * l + 1.0) * std::exp(lg);
        }
    return t;
}

GammaDiagCount gamma_diag_count(double m, double xi, double delta, double R, double s)
{
    if (!(R > 0.0) || !(m > 0.0) || !(s > 0.0)) throw DomainError("gamma_diag_count: m, R, s must be positive");
    const double xp = std::max(0.0, xi + delta);
    const double thr = 0.5 * std::log(s);
    const double lmr = std::log(m * R);
    auto term = [&](long q) {
        const double qd = static_cast<double>(q);
        return m * xp + (qd + 1.0) * lmr - std::lgamma(qd + 1.0) - 0.5 * std::log(qd + 1.0);
    };
    GammaDiagCount g;
    // the log term is concave in q: count the contiguous run above the threshold
    const long peak = static_cast<long>(std::max(0.0, std::floor(m * R)));
    for (long q = 0;; ++q) {
        const double v = term(q);
        if (v > thr) ++g.count;
        else if (q > peak) break;
        if (q > 100000000L) throw ConvergenceFailure("gamma_diag_count: enumeration did not terminate");
    }
    g.ratio = static_cast<double>(g.count) / m;
    g.target = std::numbers::e * R * kappa(xp / (std::numbers::e * R));
    return g;
}

std::pair<double, double> disk_moment_check(double m, double R, double k, double kp)
{
    if (!(R > 0.0)) throw DomainError("disk radius must be positive");
    const double x = m * m * R * R * k * kp;
    if (x > 700.0) throw DomainError("disk_moment_check: m^2 R^2 k k' above the series window");
    double series = 0.0;
    double term = 1.0;   // x^q / (q!)^2
    for (int q = 0; q < 2000; ++q) {
        if (q > 0) term *= x / (static_cast<double>(q) * static_cast<double>(q));
        const double t = term / (q + 1.0);
        series += t;
        if (q > 2 && std::abs(t) < 1e-18 * std::abs(series)) break;
    }
    series *= pi * R * R;

    const double rate = m * R * (std::abs(k) + std::abs(kp));
    const int nr = 40 + static_cast<int>(std::ceil(rate));
    const int nt = 64 + 4 * static_cast<int>(std::ceil(rate));
    const Rule rr = gauss_legendre(nr, 0.0, R);
    double direct = 0.0;
    for (std::size_t i = 0; i < rr.size(); ++i) {
        const double r = rr.nodes[i];
        double s = 0.0;
        for (int t = 0; t < nt; ++t) {
            const double th = 2.0 * pi * t / nt;
            // Re e^{m r (k e^{i th} + k' e^{-i th})}
            s += std::exp(m * r * (k + kp) * std::cos(th)) * std::cos(m * r * (k - kp) * std::sin(th));
        }
        direct += rr.weights[i] * r * s * 2.0 * pi / nt;
    }
    return {series, direct};
}

double epsilon_minus(const Polygon& omega, double b)
{
    const double x = std::max(std::abs(omega.x_min()), std::abs(omega.x_max()));
    return std::exp(-b * x * x);
}

double epsilon_plus(const Polygon& omega, double b)
{
    if (omega.x_min() <= 0.0 && omega.x_max() >= 0.0) return 1.0;
    const double x = std::min(std::abs(omega.x_min()), std::abs(omega.x_max()));
    return std::exp(-b * x * x);
}

DiscretizedOperator q_operator(Side side, int j, double lambda, double A, double delta, const Problem& p)
{
    check_level_gap(j, lambda, p);
    if (!(A >= 0.0)) throw DomainError("q_operator: A must be >= 0");
    const double b = p.b(), sb = std::sqrt(b);
    const Polygon& omega = side == Side::minus ? p.V.omega_minus : p.V.omega_plus;
    FiberDiscretization fib = p.fiber;
    fib.W = side == Side::minus ? lower_envelope(p.W()) : upper_envelope(p.W(), delta);

    DiscretizedOperator op;
    op.j = j;
    op.lambda = lambda;
    op.A = A;
    op.k_max = std::max(A, k_max_rule(j, b, omega.x_max(), A, p.quad.tail_tol));
    if (!(op.k_max > A)) {
        op.log_scale.resize(0);
        op.core.resize(0, 0);
        return op;
    }
    const Rule k = panel_rule(A, op.k_max, p.quad.k_panel / sb, p.quad.k_order);
    const BandInterpolant& band = band_interpolant(fib, j, A, op.k_max, p.quad.band_step / sb);
    const ChordRule cr = chord_rule(omega, p.quad.x_panel / sb, p.quad.x_order);
    const double lw = std::sqrt(leading_weight(j, b));

    Eigen::MatrixXd f(static_cast<Eigen::Index>(k.size()), static_cast<Eigen::Index>(cr.x.size()));
    for (std::size_t a = 0; a < k.size(); ++a) {
        const double ka = k.nodes[a];
        const double poly = std::pow(-ka, j - 1);
        for (std::size_t q = 0; q < cr.x.size(); ++q) {
            const double u = sb * cr.x[q] - ka / sb;
            f(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(q)) = lw * std::exp(-0.5 * u * u) * poly;
        }
    }
    op.core = profile_gram(f, k.nodes, cr, 1.0);
    op.rows = op.cols = k;
    op.log_scale.resize(static_cast<Eigen::Index>(k.size()));
    for (std::size_t a = 0; a < k.size(); ++a)
        op.log_scale[static_cast<Eigen::Index>(a)] =
            0.5 * std::log(k.weights[a]) - 0.5 * std::log(band.gap_distance(k.nodes[a]) + lambda);
    return op;
}

ChainCheck chain_lower_bound(double m, double delta, double r, double alpha, double beta, double L,
                             const Polygon& omega_minus, double b, bool with_gram, const HoloQuad& q)
{
    if (!(0.0 < alpha && alpha < beta && L > 0.0)) throw DomainError("chain: need 0 < alpha < beta and L > 0");
    ChainCheck c;
    const double eps = epsilon_minus(omega_minus, b);
    c.sinc_threshold = r * std::exp(-2.0 * beta * delta * m) / (eps * (1.0 - std::exp(2.0 * (alpha - beta) * delta * m)));
    c.sinc_count = count_above(g_sinc(Interval::minus(delta), m * L), c.sinc_threshold).count;
    c.ratio = static_cast<double>(c.sinc_count) / m;
    c.target = (1.0 - 2.0 * delta) * L * std::sqrt(b) / pi;
    if (with_gram) {
        c.gram_report = count_above(gamma_gram(Side::minus, m, delta, omega_minus, b, q), r);
        c.gram_count = c.gram_report.count;
    }
    return c;
}

GammaBracket gamma_bracket(double lambda, double r, double eps, double delta, const Problem& p, const HoloQuad& q)
{
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("gamma_bracket: lambda must lie in (0, 1)");
    const double b = p.b();
    const PotentialLimits lim = potential_limits(p.W());
    if (!std::isfinite(lim.x_plus)) throw DomainError("gamma_bracket: needs a finite saturation point");
    GammaBracket g;
    g.m = std::sqrt(b * std::abs(std::log(lambda)));
    const double wmd = p.W()(lim.x_plus - delta);
    const double s_lo = std::pow(r * (1.0 + eps), 2) * (lim.w_plus - lim.w_minus) / p.V.c0_minus;
    const double s_hi = std::pow(r * (1.0 - eps), 2) * (lim.w_plus - wmd) / p.V.c0_plus * std::exp(-b * delta * delta);
    const Polygon om = p.V.omega_minus.translated(-lim.x_plus, 0.0);
    const Polygon op = p.V.omega_plus.translated(-lim.x_plus, 0.0);
    g.lower_report = count_above(gamma_gram(Side::minus, g.m, delta, om, b, q), s_lo, p.counting);
    g.upper_report = count_above(gamma_gram(Side::plus, g.m, delta, op, b, q), s_hi, p.counting);
    g.lower = g.lower_report.count;
    g.upper = g.upper_report.count;
    return g;
}

SandwichCounts sandwich_counts(int j, double lambda, double eps, double r, double delta, double A, const Problem& p,
                               const HoloQuad& q)
{
    SandwichCounts s;
    const double r2 = r * r;
    const DiscretizedOperator S = sjstar_sj(j, lambda, A, p);
    s.s_report = count_above(S, r2, p.counting);
    s.q_lower_report = count_above(q_operator(Side::minus, j, lambda, A, delta, p),
                                   r2 * (1.0 + eps) * (1.0 + eps) / p.V.c0_minus, p.counting);
    s.q_upper_report = count_above(q_operator(Side::plus, j, lambda, A, delta, p),
                                   r2 * (1.0 - eps) * (1.0 - eps) / p.V.c0_plus, p.counting);
    const GammaBracket g = gamma_bracket(lambda, r, eps, delta, p, q);
    s.gamma_lower_report = g.lower_report;
    s.gamma_upper_report = g.upper_report;
    s.s_count = s.s_report.count;
    s.q_lower = s.q_lower_report.count;
    s.q_upper = s.q_upper_report.count;
    s.gamma_lower = g.lower;
    s.gamma_upper = g.upper;
    s.m = g.m;
    s.warnings = S.warnings;
    return s;
}

} // namespace edgegap
