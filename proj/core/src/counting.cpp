#include "edgegap/counting.hpp"

#include "edgegap/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace edgegap {

std::string to_string(CountRoute r) { return r == CountRoute::double_eig ? "double_eig" : "hp_inertia"; }

HpPrecisionGuard::HpPrecisionGuard(int bits) : saved_(HpReal::default_precision())
{
    // decimal digits carrying at least `bits` mantissa bits
    const auto digits = static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
    HpReal::default_precision(digits);
}

HpPrecisionGuard::~HpPrecisionGuard() { HpReal::default_precision(saved_); }

namespace {

double to_double(double x) { return x; }
double to_double(const HpReal& x) { return x.convert_to<double>(); }

template <class Real>
Real absr(const Real& x)
{
    using std::abs;
    return Real(abs(x));
}

template <class Real>
Inertia bunch_kaufman(std::vector<Real>& a, int n, int bits)
{
    using std::abs;
    using std::ldexp;
    Inertia out;
    out.min_pivot = std::numeric_limits<double>::infinity();
    if (n == 0) return out;
    const auto N = static_cast<std::size_t>(n);
    auto at = [&](int i, int j) -> Real& {
        return i >= j ? a[static_cast<std::size_t>(i) * N + static_cast<std::size_t>(j)]
                      : a[static_cast<std::size_t>(j) * N + static_cast<std::size_t>(i)];
    };

    // Row scales of the input matrix; a pivot is trusted when it clears 2^{20-bits} of its row scale.
    std::vector<Real> scale(N, Real(0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Real v = abs(at(i, j));
            if (v > scale[static_cast<std::size_t>(i)]) scale[static_cast<std::size_t>(i)] = v;
        }
    const int guard = 20 - bits;

    const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
    std::vector<int> perm(N);
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;

    auto swap_sym = [&](int p, int q, int k) {
        // exchange indices p < q within the trailing block starting at k
        if (p == q) return;
        std::swap(at(p, p), at(q, q));
        for (int m = k; m < n; ++m) {
            if (m == p || m == q) continue;
            std::swap(at(p, m), at(q, m));
        }
        std::swap(perm[static_cast<std::size_t>(p)], perm[static_cast<std::size_t>(q)]);
    };

    int k = 0;
    while (k < n) {
        int kstep = 1;
        const Real absakk = abs(at(k, k));
        int imax = k;
        Real colmax(0);
        for (int i = k + 1; i < n; ++i) {
            const Real v = abs(at(i, k));
            if (v > colmax) {
                colmax = v;
                imax = i;
            }
        }
        int kp = k;
        if (absakk == 0 && colmax == 0) {
            // exact zero pivot: a zero eigenvalue of the shifted matrix
            out.zero += 1;
            out.certified = false;
            out.min_pivot = 0.0;
            k += 1;
            continue;
        }
        if (!(absakk >= alpha * colmax)) {
            Real rowmax(0);
            for (int j = k; j < n; ++j) {
                if (j == imax) continue;
                const Real v = abs(at(imax, j));
                if (v > rowmax) rowmax = v;
            }
            if (absakk >= alpha * colmax * (colmax / rowmax)) {
                kp = k;
            } else if (abs(at(imax, imax)) >= alpha * rowmax) {
                kp = imax;
            } else {
                kp = imax;
                kstep = 2;
            }
        }
        const int kk = k + kstep - 1;
        if (kp != kk) swap_sym(kk, kp, k);

        if (kstep == 1) {
            const Real d = at(k, k);
            const Real sc = scale[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
            const double dd = to_double(absr(d));
            out.min_pivot = std::min(out.min_pivot, dd);
            if (d == 0) {
                out.zero += 1;
                out.certified = false;
            } else {
                if (d > 0)
                    out.positive += 1;
                else
                    out.negative += 1;
                if (abs(d) < ldexp(sc, guard)) out.certified = false;
            }
            if (d != 0) {
                const Real inv = Real(1) / d;
                for (int j = k + 1; j < n; ++j) {
                    const Real t = at(j, k) * inv;
                    if (t == 0) continue;
                    for (int i = j; i < n; ++i) at(i, j) -= at(i, k) * t;
                }
            }
            k += 1;
        } else {
            const Real d11 = at(k, k);
            const Real d21 = at(k + 1, k);
            const Real d22 = at(k + 1, k + 1);
            const Real det = d11 * d22 - d21 * d21;
            const Real tr = d11 + d22;
            Real sc = scale[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
            const Real& sc2 = scale[static_cast<std::size_t>(perm[static_cast<std::size_t>(k + 1)])];
            if (sc2 > sc) sc = sc2;
            if (det < 0) {
                out.positive += 1;
                out.negative += 1;
            } else if (det > 0) {
                if (tr > 0)
                    out.positive += 2;
                else
                    out.negative += 2;
            } else {
                out.zero += 1;
                if (tr > 0)
                    out.positive += 1;
                else if (tr < 0)
                    out.negative += 1;
                else
                    out.zero += 1;
                out.certified = false;
            }
            Real big = absr(d11);
            if (absr(d22) > big) big = absr(d22);
            if (absr(d21) > big) big = absr(d21);
            const double dd = to_double(Real(absr(det) / big));
            out.min_pivot = std::min(out.min_pivot, dd);
            if (abs(det) < ldexp(sc * sc, guard)) out.certified = false;
            if (det != 0) {
                // rows of W = A21 D^{-1}
                const Real inv = Real(1) / det;
                for (int j = k + 2; j < n; ++j) {
                    const Real aj1 = at(j, k), aj2 = at(j, k + 1);
                    const Real w1 = (d22 * aj1 - d21 * aj2) * inv;
                    const Real w2 = (d11 * aj2 - d21 * aj1) * inv;
                    for (int i = j; i < n; ++i) at(i, j) -= at(i, k) * w1 + at(i, k + 1) * w2;
                }
            }
            k += 2;
        }
    }
    return out;
}

double spectral_norm_bound(const Eigen::VectorXd& ev)
{
    return ev.size() ? std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff())) : 0.0;
}

template <class Vec>
CountingReport from_eigenvalues(const Vec& ev, double s, const CountingOptions& opt)
{
    CountingReport rep;
    rep.threshold = s;
    rep.route = CountRoute::double_eig;
    rep.precision_bits = 53;
    rep.margin = std::numeric_limits<double>::infinity();
    long c = 0;
    long near = 0;
    const double tie_tol = opt.tie_rel * std::max(1.0, std::abs(s));
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > s) ++c;
        const double d = std::abs(ev[i] - s);
        rep.margin = std::min(rep.margin, d);
        if (d < tie_tol) ++near;
    }
    rep.count = c;
    rep.count_low = rep.count_high = c;
    if (near > 0) {
        rep.tie = true;
        rep.count_low = c - near;
        rep.count_high = c + near;
        rep.warnings.push_back("TieWarning");
    }
    return rep;
}

bool eig_certified(const Eigen::VectorXd& ev, double margin, int n)
{
    const double u = std::numeric_limits<double>::epsilon();
    return margin > 64.0 * std::max(1, n) * u * spectral_norm_bound(ev);
}

HpHermitian to_hp(const Eigen::MatrixXcd& m, bool real_only)
{
    HpHermitian h;
    h.n = static_cast<int>(m.rows());
    const auto nn = static_cast<std::size_t>(h.n) * static_cast<std::size_t>(h.n);
    h.re.resize(nn);
    if (!real_only) h.im.resize(nn);
    for (int i = 0; i < h.n; ++i)
        for (int j = 0; j < h.n; ++j) {
            const auto idx = static_cast<std::size_t>(i) * static_cast<std::size_t>(h.n) + static_cast<std::size_t>(j);
            h.re[idx] = HpReal(m(i, j).real());
            if (!real_only) h.im[idx] = HpReal(m(i, j).imag());
        }
    return h;
}

Inertia shifted_inertia(const HpHermitian& h, double s, int bits)
{
    const int n = h.n;
    const HpReal shift(s);
    if (h.is_real()) {
        std::vector<HpReal> a(h.re);
        for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n + 1)] -= shift;
        return ldlt_inertia(std::move(a), n, bits);
    }
    // [[A, -B], [B, A]] doubles every eigenvalue of A + iB
    const int m = 2 * n;
    const auto M = static_cast<std::size_t>(m);
    const auto N = static_cast<std::size_t>(n);
    std::vector<HpReal> a(M * M);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            const HpReal& re = h.re[i * N + j];
            const HpReal& im = h.im[i * N + j];
            a[i * M + j] = re;
            a[(i + N) * M + (j + N)] = re;
            a[(i + N) * M + j] = im;
            a[i * M + (j + N)] = -im;
        }
    for (std::size_t i = 0; i < M; ++i) a[i * M + i] -= shift;
    return ldlt_inertia(std::move(a), m, bits);
}

CountingReport ladder(const HpAssembler& assemble, double s, const CountingOptions& opt, int start_bits)
{
    CountingReport rep;
    rep.threshold = s;
    rep.route = CountRoute::hp_inertia;
    for (int bits : precision_ladder(opt.precision_cap)) {
        if (bits < start_bits) continue;
        HpPrecisionGuard guard(bits);
        const HpHermitian h = assemble(bits);
        const Inertia in = shifted_inertia(h, s, bits);
        rep.precision_bits = bits;
        rep.count = h.is_real() ? in.positive : in.positive / 2;
        rep.count_low = rep.count_high = rep.count;
        rep.margin = in.min_pivot;
        if (in.certified) {
            const double tie_tol = opt.tie_rel * std::max(1.0, std::abs(s));
            if (rep.margin < tie_tol) {
                rep.tie = true;
                rep.count_low = rep.count - 1;
                rep.count_high = rep.count + 1;
                rep.warnings.push_back("TieWarning");
            }
            return rep;
        }
    }
    throw PrecisionExhausted("inertia not certified at the precision cap (" + std::to_string(opt.precision_cap) +
                             " bits)");
}

} // namespace

Inertia ldlt_inertia(std::vector<double> a, int n, int bits) { return bunch_kaufman(a, n, bits); }
Inertia ldlt_inertia(std::vector<HpReal> a, int n, int bits) { return bunch_kaufman(a, n, bits); }

std::vector<int> precision_ladder(int cap)
{
    std::vector<int> out;
    for (int b : {53, 128, 256, 512})
        if (b <= cap) out.push_back(b);
    if (out.empty() || out.back() < cap) out.push_back(cap);
    return out;
}

LogMatrix LogMatrix::from(const Eigen::MatrixXcd& m)
{
    LogMatrix l;
    l.logmag.resize(m.rows(), m.cols());
    l.phase.resize(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double a = std::abs(m(i, j));
            l.logmag(i, j) = a > 0 ? std::log(a) : -std::numeric_limits<double>::infinity();
            l.phase(i, j) = std::arg(m(i, j));
        }
    return l;
}

Eigen::MatrixXcd LogMatrix::to_complex() const
{
    Eigen::MatrixXcd m(logmag.rows(), logmag.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = std::polar(std::exp(logmag(i, j)), phase(i, j));
    return m;
}

double LogMatrix::max_logmag() const { return logmag.size() ? logmag.maxCoeff() : -std::numeric_limits<double>::infinity(); }

CountingReport count_above(const Eigen::MatrixXd& m, double s, const CountingOptions& opt)
{
    if (m.rows() != m.cols()) throw DomainError("count_above: matrix must be square");
    if (!opt.force_inertia) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        CountingReport rep = from_eigenvalues(es.eigenvalues(), s, opt);
        if (rep.tie || eig_certified(es.eigenvalues(), rep.margin, static_cast<int>(m.rows()))) return rep;
    }
    const Eigen::MatrixXcd mc = m.cast<std::complex<double>>();
    return ladder([&](int) { return to_hp(mc, true); }, s, opt, opt.force_inertia ? 53 : 128);
}

CountingReport count_above(const Eigen::MatrixXcd& m, double s, const CountingOptions& opt)
{
    if (m.rows() != m.cols()) throw DomainError("count_above: matrix must be square");
    if (!opt.force_inertia) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        CountingReport rep = from_eigenvalues(es.eigenvalues(), s, opt);
        if (rep.tie || eig_certified(es.eigenvalues(), rep.margin, static_cast<int>(m.rows()))) return rep;
    }
    const bool real_only = m.imag().cwiseAbs().maxCoeff() == 0.0;
    return ladder([&](int) { return to_hp(m, real_only); }, s, opt, opt.force_inertia ? 53 : 128);
}

CountingReport count_above(const LogMatrix& m, double s, const CountingOptions& opt)
{
    const int n = m.rows();
    if (!opt.force_inertia && m.max_logmag() < 600.0) return count_above(m.to_complex(), s, opt);
    bool real_only = true;
    for (Eigen::Index i = 0; i < m.phase.size(); ++i) {
        const double p = std::abs(m.phase.data()[i]);
        if (p != 0.0 && p != std::numbers::pi) real_only = false;
    }
    auto assemble = [&](int) {
        HpHermitian h;
        h.n = n;
        const auto N = static_cast<std::size_t>(n);
        h.re.resize(N * N);
        if (!real_only) h.im.resize(N * N);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const auto idx = static_cast<std::size_t>(i) * N + static_cast<std::size_t>(j);
                const double lm = m.logmag(i, j);
                if (!std::isfinite(lm)) {
                    h.re[idx] = 0;
                    if (!real_only) h.im[idx] = 0;
                    continue;
                }
                const HpReal mag = exp(HpReal(lm));
                h.re[idx] = mag * std::cos(m.phase(i, j));
                if (!real_only) h.im[idx] = mag * std::sin(m.phase(i, j));
            }
        return h;
    };
    return ladder(assemble, s, opt, 128);
}

CountingReport count_above(const HpAssembler& assemble, double s, const CountingOptions& opt)
{
    return ladder(assemble, s, opt, 128);
}

CountingReport count_below(const Eigen::MatrixXd& m, double s, const CountingOptions& opt)
{
    return count_above(Eigen::MatrixXd(-m), s, opt);
}

CountingReport count_below(const Eigen::MatrixXcd& m, double s, const CountingOptions& opt)
{
    return count_above(Eigen::MatrixXcd(-m), s, opt);
}

CountingReport n_star(const Eigen::MatrixXd& t, double s, const CountingOptions& opt)
{
    const Eigen::MatrixXd g = t.rows() < t.cols() ? Eigen::MatrixXd(t * t.transpose()) : Eigen::MatrixXd(t.transpose() * t);
    CountingReport rep = count_above(g, s * s, opt);
    rep.threshold = s;
    return rep;
}

CountingReport n_star(const Eigen::MatrixXcd& t, double s, const CountingOptions& opt)
{
    const Eigen::MatrixXcd g = t.rows() < t.cols() ? Eigen::MatrixXcd(t * t.adjoint()) : Eigen::MatrixXcd(t.adjoint() * t);
    CountingReport rep = count_above(g, s * s, opt);
    rep.threshold = s;
    return rep;
}

} // namespace edgegap
