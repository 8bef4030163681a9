#include "edgegap/bsham.hpp"

#include "edgegap/errors.hpp"
#include "edgegap/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace edgegap {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string disc_key(const FiberDiscretization& d)
{
    std::ostringstream os;
    os << std::hexfloat << d.N << ' ' << d.half_width << ' ' << d.b << ' ' << d.richardson << ' '
       << static_cast<int>(d.W.kind()) << ' ' << d.W.width() << ' ' << d.W.delta() << ' ' << d.W.step_location();
    for (double v : d.W.breaks()) os << ' ' << v;
    os << '|';
    for (double v : d.W.values()) os << ' ' << v;
    return os.str();
}

double log_envelope(int j, double b, double x, double k)
{
    const double u = k / std::sqrt(b) - std::sqrt(b) * x;
    const double poly = j > 1 ? (2.0 * j - 2.0) * std::log(std::max(std::abs(k), 1e-300)) : 0.0;
    return std::log(leading_weight(j, b)) + poly - u * u;
}

// Peak of the log envelope over [lo, hi] on a fine grid.
double envelope_peak(int j, double b, double x, double lo, double hi, double* arg)
{
    double best = -std::numeric_limits<double>::infinity();
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
        const double k = lo + (hi - lo) * i / n;
        const double v = log_envelope(j, b, x, k);
        if (v > best) {
            best = v;
            if (arg) *arg = k;
        }
    }
    return best;
}

void check_gap(int j, double lambda, const Problem& p)
{
    if (j < 1) throw DomainError("level j must be >= 1");
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
    const GapEdges g = gap_edges(p.b(), p.W(), j);
    if (!(g.lower + lambda < g.upper)) throw DomainError("lambda outside the spectral gap");
}

struct KRange {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::string> warnings;
};

KRange k_range(int j, double A, const Problem& p)
{
    const double b = p.b();
    const double tol = p.quad.tail_tol;
    KRange r;
    const double X_plus = p.V.support.x_max(), X_minus = p.V.support.x_min();
    double hi = k_max_rule(j, b, X_plus, std::isfinite(A) ? A : minus_infinity, tol);
    if (p.quad.k_max_override > 0.0) {
        hi = p.quad.k_max_override;
        double peak_arg = 0.0;
        const double peak = envelope_peak(j, b, X_plus, std::isfinite(A) ? A : b * X_plus - 40.0 * std::sqrt(b),
                                          b * X_plus + 40.0 * std::sqrt(b), &peak_arg);
        if (log_envelope(j, b, X_plus, hi) > peak + std::log(tol))
            r.warnings.push_back("TruncationWarning: k tail above tolerance at K_max");
    }
    if (std::isfinite(A)) {
        r.lo = A;
        r.hi = std::max(hi, A);
    } else {
        const double K = std::max(hi, -k_min_rule(j, b, X_minus, tol));
        r.lo = -K;
        r.hi = K;
    }
    return r;
}

double interp4(const double* y, double t)
{
    // Lagrange through nodes -1, 0, 1, 2 at offset t in [0, 1)
    const double l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    const double l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    const double l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    return l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3];
}

// Grid function on a uniform grid, cubic Lagrange, zero outside.
double sample_uniform(const std::vector<double>& x, const std::vector<double>& v, double at)
{
    const std::size_t n = x.size();
    if (n < 4) return 0.0;
    const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
    const double s = (at - x.front()) / h;
    if (s < 0.0 || s > static_cast<double>(n - 1)) return 0.0;
    auto i = static_cast<std::ptrdiff_t>(std::floor(s));
    i = std::clamp<std::ptrdiff_t>(i, 1, static_cast<std::ptrdiff_t>(n) - 3);
    return interp4(&v[static_cast<std::size_t>(i - 1)], s - static_cast<double>(i));
}

DiscretizedOperator finish(DiscretizedOperator op, const Rule& k, const std::vector<double>& F2inv)
{
    op.rows = k;
    op.cols = k;
    op.log_scale.resize(static_cast<Eigen::Index>(k.size()));
    for (std::size_t a = 0; a < k.size(); ++a)
        op.log_scale[static_cast<Eigen::Index>(a)] = 0.5 * std::log(k.weights[a]) - 0.5 * std::log(F2inv[a]);
    return op;
}

} // namespace

Eigen::MatrixXcd profile_gram(const Eigen::MatrixXd& f, const std::vector<double>& kappa, const ChordRule& cr,
                              double amp)
{
    const Eigen::Index n = f.rows();
    const std::size_t nq = cr.x.size();
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(n, n);
    if (n == 0 || amp == 0.0) return G;

    double lmax = 0.0;
    std::vector<std::size_t> offset(nq + 1, 0);
    for (std::size_t q = 0; q < nq; ++q) {
        offset[q + 1] = offset[q] + cr.chords[q].size();
        for (const auto& c : cr.chords[q]) lmax = std::max(lmax, c.second - c.first);
    }
    const std::size_t nc = offset[nq];
    // e^{i kappa_a y} at both chord ends
    Eigen::MatrixXcd ea(n, static_cast<Eigen::Index>(nc)), eb(n, static_cast<Eigen::Index>(nc));
    for (Eigen::Index a = 0; a < n; ++a)
        for (std::size_t q = 0; q < nq; ++q)
            for (std::size_t c = 0; c < cr.chords[q].size(); ++c) {
                const auto col = static_cast<Eigen::Index>(offset[q] + c);
                ea(a, col) = std::polar(1.0, kappa[static_cast<std::size_t>(a)] * cr.chords[q][c].first);
                eb(a, col) = std::polar(1.0, kappa[static_cast<std::size_t>(a)] * cr.chords[q][c].second);
            }

    const double pref = amp / two_pi;
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index c = a; c < n; ++c) {
            const double om = kappa[static_cast<std::size_t>(a)] - kappa[static_cast<std::size_t>(c)];
            std::complex<double> sum = 0.0;
            if (std::abs(om) * lmax < 0.5) {
                for (std::size_t q = 0; q < nq; ++q) {
                    const double ff = f(a, static_cast<Eigen::Index>(q)) * f(c, static_cast<Eigen::Index>(q));
                    if (ff == 0.0) continue;
                    sum += cr.w[q] * ff * chord_fourier(cr.chords[q], om);
                }
            } else {
                for (std::size_t q = 0; q < nq; ++q) {
                    const double ff = f(a, static_cast<Eigen::Index>(q)) * f(c, static_cast<Eigen::Index>(q));
                    if (ff == 0.0) continue;
                    std::complex<double> s = 0.0;
                    for (std::size_t i = offset[q]; i < offset[q + 1]; ++i) {
                        const auto col = static_cast<Eigen::Index>(i);
                        s += eb(a, col) * std::conj(eb(c, col)) - ea(a, col) * std::conj(ea(c, col));
                    }
                    sum += cr.w[q] * ff * s;
                }
                sum /= std::complex<double>(0.0, om);
            }
            G(a, c) = pref * sum;
            G(c, a) = std::conj(G(a, c));
        }
    for (Eigen::Index a = 0; a < n; ++a) G(a, a) = G(a, a).real();
    return G;
}

Eigen::MatrixXcd DiscretizedOperator::matrix() const
{
    Eigen::MatrixXcd m = core;
    for (Eigen::Index a = 0; a < m.rows(); ++a)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(a, c) *= std::exp(log_scale[a] + log_scale[c]);
    return m;
}

LogMatrix DiscretizedOperator::log_matrix() const
{
    LogMatrix l = LogMatrix::from(core);
    for (Eigen::Index a = 0; a < l.logmag.rows(); ++a)
        for (Eigen::Index c = 0; c < l.logmag.cols(); ++c) l.logmag(a, c) += log_scale[a] + log_scale[c];
    return l;
}

CountingReport count_above(const DiscretizedOperator& op, double r, const CountingOptions& opt)
{
    CountingReport rep;
    rep.threshold = r;
    const int n = op.size();
    if (n == 0) return rep;

    CountingOptions inner = opt;
    inner.tie_rel = 0.0;
    auto counted = [&](double thr) {
        Eigen::MatrixXcd s = op.core;
        for (int a = 0; a < n; ++a) {
            const double d = std::exp(std::min(-2.0 * op.log_scale[a], 690.0));
            s(a, a) -= thr * d;
        }
        if (op.hp_core) {
            // certified double spectrum first, the exact-precision core otherwise
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s, Eigen::EigenvaluesOnly);
            const Eigen::VectorXd& ev = es.eigenvalues();
            const double norm = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
            double margin = std::numeric_limits<double>::infinity();
            long c = 0;
            for (Eigen::Index i = 0; i < ev.size(); ++i) {
                if (ev[i] > 0.0) ++c;
                margin = std::min(margin, std::abs(ev[i]));
            }
            if (margin > 64.0 * n * std::numeric_limits<double>::epsilon() * norm) {
                CountingReport rep;
                rep.count = rep.count_low = rep.count_high = c;
                rep.margin = margin;
                return rep;
            }
            HpAssembler shifted = [&](int bits) {
                HpHermitian h = op.hp_core(bits);
                for (int a = 0; a < n; ++a)
                    h.re[static_cast<std::size_t>(a) * static_cast<std::size_t>(n + 1)] -=
                        HpReal(thr) * exp(HpReal(-2.0 * op.log_scale[a]));
                return h;
            };
            return count_above(shifted, 0.0, inner);
        }
        return count_above(s, 0.0, inner);
    };
    CountingReport c = counted(r);
    c.threshold = r;

    // Tie diagnostic from the plain spectrum when it is representable in double.
    const double spread = op.log_scale.maxCoeff() - op.log_scale.minCoeff();
    if (op.log_scale.maxCoeff() < 300.0 && spread < 600.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.matrix(), Eigen::EigenvaluesOnly);
        const double tol = opt.tie_rel * std::max(1.0, std::abs(r));
        long near = 0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            if (std::abs(es.eigenvalues()[i] - r) < tol) ++near;
        if (near > 0) {
            c.tie = true;
            c.count_low = counted(r * (1.0 + opt.tie_rel) + tol).count;
            c.count_high = counted(r * (1.0 - opt.tie_rel) - tol).count;
            c.warnings.push_back("TieWarning");
        }
    }
    return c;
}

BandInterpolant::BandInterpolant(const FiberDiscretization& disc, int j, double k_lo, double k_hi, double step)
    : k0_(k_lo), step_(step)
{
    if (!(step > 0.0) || !(k_hi >= k_lo)) throw DomainError("band interpolant: bad range");
    top_ = band_top(disc.b, disc.W, j);
    const auto n = static_cast<std::size_t>(std::ceil((k_hi - k_lo) / step - 1e-9)) + 1;
    d_.resize(std::max<std::size_t>(n, 4));
    logd_.resize(d_.size());
    for (std::size_t i = 0; i < d_.size(); ++i) {
        const double k = k0_ + step_ * static_cast<double>(i);
        d_[i] = std::max(0.0, gap_distances(disc, k, j)[static_cast<std::size_t>(j - 1)]);
        logd_[i] = d_[i] > 0.0 ? std::log(d_[i]) : -std::numeric_limits<double>::infinity();
    }
}

double BandInterpolant::gap_distance(double k) const
{
    const double s = (k - k0_) / step_;
    const auto n = static_cast<std::ptrdiff_t>(d_.size());
    if (s <= 0.0) return d_.front();
    if (s >= static_cast<double>(n - 1)) return d_.back();
    const auto i = static_cast<std::ptrdiff_t>(std::floor(s));
    const double t = s - static_cast<double>(i);
    const std::ptrdiff_t base = std::clamp<std::ptrdiff_t>(i, 1, n - 3);
    const double tb = s - static_cast<double>(base);
    bool finite = true;
    for (std::ptrdiff_t m = base - 1; m <= base + 2; ++m)
        if (!std::isfinite(logd_[static_cast<std::size_t>(m)])) finite = false;
    if (finite) return std::exp(interp4(&logd_[static_cast<std::size_t>(base - 1)], tb));
    return (1.0 - t) * d_[static_cast<std::size_t>(i)] + t * d_[static_cast<std::size_t>(i + 1)];
}

const BandInterpolant& band_interpolant(const FiberDiscretization& disc, int j, double k_lo, double k_hi,
                                        double step)
{
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<BandInterpolant>> cache;
    std::ostringstream os;
    os << disc_key(disc) << '#' << j << ' ' << std::hexfloat << step;
    const std::string key = os.str();
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end() && it->second->k_lo() <= k_lo && it->second->k_hi() >= k_hi) return *it->second;
    double lo = k_lo, hi = k_hi;
    if (it != cache.end()) {
        lo = std::min(lo, it->second->k_lo());
        hi = std::max(hi, it->second->k_hi());
    }
    // align to the step lattice so cached samples are reproducible
    lo = step * std::floor(lo / step);
    hi = step * std::ceil(hi / step);
    auto fresh = std::make_unique<BandInterpolant>(disc, j, lo, hi, step);
    auto& slot = cache[key];
    slot = std::move(fresh);
    return *slot;
}

double k_max_rule(int j, double b, double x_edge, double A, double tol)
{
    const double sb = std::sqrt(b);
    const double center = b * x_edge;
    const double lo = std::isfinite(A) ? A : center - 40.0 * sb;
    const double hi = std::max(lo, center) + 40.0 * sb + 10.0 * std::sqrt(static_cast<double>(j)) * sb;
    double arg = lo;
    const double peak = envelope_peak(j, b, x_edge, lo, hi, &arg);
    const double target = peak + std::log(tol);
    double a = arg, c = hi;
    if (log_envelope(j, b, x_edge, c) > target) return c;
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + c);
        (log_envelope(j, b, x_edge, m) > target ? a : c) = m;
    }
    return c;
}

double k_min_rule(int j, double b, double x_left, double tol)
{
    const double sb = std::sqrt(b);
    const double center = b * x_left;
    const double lo = center - 40.0 * sb - 10.0 * std::sqrt(static_cast<double>(j)) * sb;
    const double hi = center + 40.0 * sb;
    double arg = center;
    const double peak = envelope_peak(j, b, x_left, lo, hi, &arg);
    const double target = peak + std::log(tol);
    double a = lo, c = arg;
    if (log_envelope(j, b, x_left, a) > target) return a;
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + c);
        (log_envelope(j, b, x_left, m) > target ? c : a) = m;
    }
    return a;
}

ChordRule chord_rule(const Polygon& omega, double panel, int order)
{
    ChordRule cr;
    if (omega.size() < 3) return cr;
    const Rule r = panel_rule(omega.x_min(), omega.x_max(), panel, order, omega.breakpoints_x());
    for (std::size_t i = 0; i < r.size(); ++i) {
        auto ch = omega.vertical_chords(r.nodes[i]);
        if (ch.empty()) continue;
        cr.x.push_back(r.nodes[i]);
        cr.w.push_back(r.weights[i]);
        cr.chords.push_back(std::move(ch));
    }
    return cr;
}

std::complex<double> chord_fourier(const std::vector<std::pair<double, double>>& chords, double omega)
{
    std::complex<double> s = 0.0;
    for (const auto& [ya, yb] : chords) {
        const double len = yb - ya, mid = 0.5 * (ya + yb);
        const double t = 0.5 * omega * len;
        const double sinc = std::abs(t) < 1e-4 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
        s += std::polar(len * sinc, omega * mid);
    }
    return s;
}

DiscretizedOperator sjstar_sj(int j, double lambda, double A, const Problem& p)
{
    check_gap(j, lambda, p);
    const double b = p.b(), sb = std::sqrt(b);
    DiscretizedOperator op;
    op.j = j;
    op.lambda = lambda;
    op.A = A;
    KRange kr = k_range(j, A, p);
    op.k_max = kr.hi;
    op.warnings = kr.warnings;
    if (!(kr.hi > kr.lo)) {
        op.log_scale.resize(0);
        op.core.resize(0, 0);
        return op;
    }
    const Rule k = panel_rule(kr.lo, kr.hi, p.quad.k_panel / sb, p.quad.k_order);
    const double step = p.quad.band_step / sb;
    const BandInterpolant& band = band_interpolant(p.fiber, j, kr.lo, kr.hi, step);
    const ChordRule cr = chord_rule(p.V.support, p.quad.x_panel / sb, p.quad.x_order);

    Eigen::MatrixXd f(static_cast<Eigen::Index>(k.size()), static_cast<Eigen::Index>(cr.x.size()));
    std::vector<double> F2inv(k.size());
    for (std::size_t a = 0; a < k.size(); ++a) {
        for (std::size_t q = 0; q < cr.x.size(); ++q)
            f(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(q)) = psi_inf(j, k.nodes[a], cr.x[q], b);
        F2inv[a] = band.gap_distance(k.nodes[a]) + lambda;
    }
    op.core = profile_gram(f, k.nodes, cr, p.V.amplitude);
    return finish(std::move(op), k, F2inv);
}

EffectiveCount effective_count(int j, double lambda, double eps, const Problem& p, double A)
{
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("effective_count: eps must lie in (0, 1)");
    const DiscretizedOperator op = sjstar_sj(j, lambda, A, p);
    EffectiveCount e;
    e.lower_report = count_above(op, 1.0 + eps, p.counting);
    e.upper_report = count_above(op, 1.0 - eps, p.counting);
    e.lower = e.lower_report.count;
    e.upper = e.upper_report.count;
    e.warnings = op.warnings;
    for (const auto* r : {&e.lower_report, &e.upper_report})
        e.warnings.insert(e.warnings.end(), r->warnings.begin(), r->warnings.end());
    return e;
}

DiscretizedOperator antiwick_matrix(int j, double lambda, const Problem& p)
{
    check_gap(j, lambda, p);
    const double b = p.b(), sb = std::sqrt(b);
    DiscretizedOperator op;
    op.j = j;
    op.lambda = lambda;
    op.A = minus_infinity;
    KRange kr = k_range(j, minus_infinity, p);
    op.k_max = kr.hi;
    op.warnings = kr.warnings;
    const Rule k = panel_rule(kr.lo, kr.hi, p.quad.k_panel / sb, p.quad.k_order);
    const double step = p.quad.band_step / sb;
    const BandInterpolant& band = band_interpolant(p.fiber, j, kr.lo, kr.hi, step);
    const ChordRule cr = chord_rule(p.V.support, p.quad.x_panel / sb, p.quad.x_order);

    // phase-space nodes (x_q, xi_i) with weight V w_q w_i / (2 pi)
    std::vector<double> px, pxi, pw;
    for (std::size_t q = 0; q < cr.x.size(); ++q)
        for (const auto& [ya, yb] : cr.chords[q]) {
            const int ny = std::max(p.quad.y_order_min, static_cast<int>(std::ceil(kr.hi * (yb - ya))) + 12);
            const Rule yr = gauss_legendre(ny, ya, yb);
            for (std::size_t i = 0; i < yr.size(); ++i) {
                px.push_back(cr.x[q]);
                pxi.push_back(yr.nodes[i]);
                pw.push_back(p.V.amplitude * cr.w[q] * yr.weights[i] / two_pi);
            }
        }
    const auto n = static_cast<Eigen::Index>(k.size());
    const auto np = static_cast<Eigen::Index>(px.size());
    Eigen::MatrixXcd B(n, np);
    for (Eigen::Index a = 0; a < n; ++a) {
        const double ka = k.nodes[static_cast<std::size_t>(a)];
        for (Eigen::Index c = 0; c < np; ++c) {
            const auto ci = static_cast<std::size_t>(c);
            B(a, c) = std::polar(std::sqrt(pw[ci]) * psi_inf(j, ka, px[ci], b), -ka * pxi[ci]);
        }
    }
    op.core = B * B.adjoint();
    for (Eigen::Index a = 0; a < n; ++a) op.core(a, a) = op.core(a, a).real();
    std::vector<double> F2inv(k.size());
    for (std::size_t a = 0; a < k.size(); ++a) F2inv[a] = band.gap_distance(k.nodes[a]) + lambda;
    return finish(std::move(op), k, F2inv);
}

BsCount bs_count(int j, double lambda, const Problem& p, int j_sum)
{
    check_gap(j, lambda, p);
    if (j_sum <= 0) j_sum = 2 * j + 2;
    if (j_sum < j) throw DomainError("bs_count: j_sum below the level");
    const double b = p.b(), sb = std::sqrt(b);
    const double z = band_top(b, p.W(), j) + lambda;
    const double tol = p.quad.tail_tol;
    BsCount out;
    out.j_sum = j_sum;
    out.remainder_bound = p.V.sup_norm() / (b * (2 * j_sum + 1) + p.W().w_minus() - z);
    if (out.remainder_bound > 0.25) out.warnings.push_back("TruncationWarning: fiber sum remainder bound " +
                                                           std::to_string(out.remainder_bound));
    if (p.V.amplitude == 0.0) {
        out.report.threshold = 1.0;
        return out;
    }

    double hi = k_max_rule(j, b, p.V.support.x_max(), minus_infinity, tol);
    double lo = k_min_rule(j_sum, b, p.V.support.x_min(), tol);
    for (int jj = 1; jj <= j_sum; ++jj) hi = std::max(hi, k_max_rule(jj, b, p.V.support.x_max(), minus_infinity, tol));
    const Rule k = panel_rule(lo, hi, p.quad.k_panel / sb, p.quad.k_order);
    const ChordRule cr = chord_rule(p.V.support, p.quad.x_panel / sb, p.quad.x_order);

    // node order: levels <= j first (block P), then the higher levels (block Q)
    const std::size_t nk = k.size();
    const auto nP = static_cast<Eigen::Index>(nk * static_cast<std::size_t>(j));
    const auto nAll = static_cast<Eigen::Index>(nk * static_cast<std::size_t>(j_sum));
    Eigen::MatrixXd f(nAll, static_cast<Eigen::Index>(cr.x.size()));
    Eigen::VectorXd dinv(nAll);
    std::vector<double> kappa(static_cast<std::size_t>(nAll));
    for (std::size_t a = 0; a < nk; ++a) {
        const auto pairs = solve_fiber(p.fiber, k.nodes[a], j_sum);
        const double sw = std::sqrt(k.weights[a]);
        for (int jj = 1; jj <= j_sum; ++jj) {
            const auto& e = pairs[static_cast<std::size_t>(jj - 1)];
            const auto row = static_cast<Eigen::Index>(static_cast<std::size_t>(jj - 1) * nk + a);
            kappa[static_cast<std::size_t>(row)] = k.nodes[a];
            dinv[row] = jj == j ? -(std::max(0.0, e.gap_distance) + lambda) : e.E - z;
            for (std::size_t q = 0; q < cr.x.size(); ++q)
                f(row, static_cast<Eigen::Index>(q)) = sw * sample_uniform(e.x, e.psi, cr.x[q]);
        }
    }
    Eigen::MatrixXcd M = profile_gram(f, kappa, cr, p.V.amplitude);
    M.diagonal() += dinv.cast<std::complex<double>>();
    out.nodes = static_cast<int>(nAll);

    // n_-(1; T D T^*) = n_+(D^{-1} + T^* T) - #{positive D^{-1}}; the Q block is positive definite.
    Eigen::MatrixXcd S = M.topLeftCorner(nP, nP);
    const Eigen::Index nQ = nAll - nP;
    if (nQ > 0) {
        Eigen::LLT<Eigen::MatrixXcd> llt(M.bottomRightCorner(nQ, nQ));
        if (llt.info() != Eigen::Success) throw ConvergenceFailure("bs_count: higher-level block not definite");
        const Eigen::MatrixXcd Bq = M.topRightCorner(nP, nQ);
        const Eigen::MatrixXcd L = llt.matrixL().solve(Bq.adjoint());
        S -= L.adjoint() * L;
    }
    S = 0.5 * (S + S.adjoint()).eval();
    out.report = count_above(S, 0.0, p.counting);
    out.report.threshold = 1.0;
    out.count = out.report.count;
    out.warnings.insert(out.warnings.end(), out.report.warnings.begin(), out.report.warnings.end());
    return out;
}

} // namespace edgegap
