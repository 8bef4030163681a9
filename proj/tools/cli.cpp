#include "cli.hpp"

#include <edgegap/bsham.hpp>
#include <edgegap/counting.hpp>
#include <edgegap/errors.hpp>
#include <edgegap/fiber.hpp>
#include <edgegap/geometry.hpp>
#include <edgegap/modelops.hpp>
#include <edgegap/scenario.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <execution>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>

namespace edgegap::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Verdict {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double target = 0.0;
    double tol = 0.0;
};

std::string num(double x) { return fmt::format("{}", x); }
std::string num(long x) { return std::to_string(x); }
std::string num(int x) { return std::to_string(x); }

std::string join(const std::vector<std::string>& parts)
{
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += "; ";
        out += p;
    }
    return out;
}

class Csv {
public:
    Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path)
    {
        if (!out_) throw InvalidConfig("cannot write " + path.string());
        row(header);
    }

    void row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << quote(cells[i]);
        }
        out_ << '\n';
    }

private:
    static std::string quote(const std::string& s)
    {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + '"';
    }

    std::ofstream out_;
};

struct Run {
    std::string subcommand;
    Scenario s;
    fs::path out;
    std::vector<Verdict> verdicts;

    Csv csv(const std::string& name, const std::vector<std::string>& header) const
    {
        return Csv(out / name, header);
    }

    void check(const std::string& name, bool pass, double value, double target, double tol)
    {
        verdicts.push_back({name, pass, value, target, tol});
    }
    void within_rel(const std::string& name, double value, double target, double tol)
    {
        check(name, std::abs(value - target) <= tol * std::abs(target), value, target, tol);
    }
    void within_abs(const std::string& name, double value, double target, double tol)
    {
        check(name, std::abs(value - target) <= tol, value, target, tol);
    }
    void at_most(const std::string& name, double value, double bound, double tol = 0.0)
    {
        check(name, value <= bound + tol, value, bound, tol);
    }
};

// Ordered parallel map; the first failure (by index) is rethrown.
template <class T, class F>
std::vector<T> par_map(std::size_t n, F f)
{
    std::vector<T> out(n);
    std::vector<std::exception_ptr> err(n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::for_each(std::execution::par, idx.begin(), idx.end(), [&](std::size_t i) {
        try {
            out[i] = f(i);
        } catch (...) {
            err[i] = std::current_exception();
        }
    });
    for (const auto& e : err)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<double> sweep(double lo, double hi, double step, std::initializer_list<std::vector<double>> extra)
{
    std::vector<double> ks;
    for (int i = 0; lo + step * i <= hi + 1e-12; ++i) ks.push_back(lo + step * i);
    for (const auto& e : extra) ks.insert(ks.end(), e.begin(), e.end());
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

std::size_t index_of(const std::vector<double>& ks, double k)
{
    return static_cast<std::size_t>(std::find(ks.begin(), ks.end(), k) - ks.begin());
}

std::string tag(const char* prefix, double x) { return fmt::format("{}{}", prefix, x); }

std::vector<std::string> count_row(double lambda, int j, const std::string& route, double threshold,
                                   const CountingReport& rep, const std::vector<std::string>& extra = {})
{
    std::vector<std::string> w = extra;
    w.insert(w.end(), rep.warnings.begin(), rep.warnings.end());
    return {num(lambda), num(j), route, num(threshold), num(rep.count), num(rep.precision_bits), join(w)};
}

const std::vector<std::string> count_header{"lambda", "j", "route", "threshold", "count", "precision_bits",
                                            "warnings"};

double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

// ---- subcommands ----

void cmd_bands(Run& r)
{
    const FiberDiscretization disc = r.s.fiber();
    const std::vector<double> ks = r.s.k_grid.values();
    const int jm = r.s.j_max;
    const auto E = par_map<std::vector<double>>(ks.size(), [&](std::size_t i) { return fiber_energies(disc, ks[i], jm); });
    Csv csv = r.csv("bands.csv", {"k", "j", "E"});
    for (std::size_t i = 0; i < ks.size(); ++i)
        for (int j = 1; j <= jm; ++j) csv.row({num(ks[i]), num(j), num(E[i][j - 1])});
    for (int j = 1; j <= jm; ++j) {
        double drop = 0.0;
        for (std::size_t i = 0; i + 1 < ks.size(); ++i) drop = std::max(drop, E[i][j - 1] - E[i + 1][j - 1]);
        r.at_most(tag("band_monotone_j", j), drop, 0.0, r.s.tol.monotone_drop);
    }
}

void cmd_gaps(Run& r)
{
    Csv csv = r.csv("gaps.csv", {"j", "lower", "upper"});
    for (int j = 1; j <= r.s.j_max; ++j) {
        const GapEdges g = gap_edges(r.s.b, r.s.W, j);
        csv.row({num(j), num(g.lower), num(g.upper)});
        r.check(tag("gap_open_j", j), g.upper > g.lower, g.upper - g.lower, 0.0, 0.0);
    }
}

void cmd_phi(Run& r)
{
    const FiberDiscretization disc = r.s.fiber();
    const std::vector<double> ks = r.s.k_grid.values();
    const int jm = r.s.j_max;
    const auto D = par_map<std::vector<double>>(ks.size(), [&](std::size_t i) { return gap_distances(disc, ks[i], jm); });
    Csv csv = r.csv("phi.csv", {"k", "j", "phi_squared", "gap_distance", "ratio"});
    std::vector<double> rise(static_cast<std::size_t>(jm), 0.0);
    std::vector<double> prev(static_cast<std::size_t>(jm), 0.0);
    for (std::size_t i = 0; i < ks.size(); ++i)
        for (int j = 1; j <= jm; ++j) {
            const double phi2 = phi_squared(j, ks[i], r.s.b, r.s.W);
            const double d = D[i][static_cast<std::size_t>(j - 1)];
            csv.row({num(ks[i]), num(j), num(phi2), num(d), phi2 > 0.0 ? num(d / phi2) : std::string("nan")});
            auto jj = static_cast<std::size_t>(j - 1);
            if (i > 0) rise[jj] = std::max(rise[jj], phi2 - prev[jj]);
            prev[jj] = phi2;
        }
    for (int j = 1; j <= jm; ++j)
        r.at_most(tag("phi_squared_nonincreasing_j", j), rise[static_cast<std::size_t>(j - 1)], 0.0,
                  r.s.tol.monotone_drop);
}

void verify_p21(Run& r)
{
    const FiberDiscretization disc = r.s.fiber();
    const int j = r.s.j;
    const std::vector<double> ks = r.s.k_grid.values();
    const auto E = par_map<double>(ks.size(), [&](std::size_t i) { return fiber_energies(disc, ks[i], j).back(); });
    Csv csv = r.csv("verify_p21.csv", {"k", "j", "E"});
    double drop = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        csv.row({num(ks[i]), num(j), num(E[i])});
        if (i > 0) drop = std::max(drop, E[i - 1] - E[i]);
    }
    r.at_most("monotone", drop, 0.0, r.s.tol.monotone_drop);
    const double K = r.s.tol.edge_k;
    r.within_abs("edge_minus", fiber_energies(disc, -K, j).back(), band_bottom(r.s.b, r.s.W, j), r.s.tol.edge);
    r.within_abs("edge_plus", fiber_energies(disc, K, j).back(), band_top(r.s.b, r.s.W, j), r.s.tol.edge);
}

void verify_tep2(Run& r)
{
    const FiberDiscretization disc = r.s.fiber();
    const Tolerances& t = r.s.tol;
    const std::vector<double> ks = sweep(0.0, 8.0, 0.5, {t.tep2_k, {t.tep2_j2_k}});
    const int jm = std::min(2, r.s.j_max);
    const auto ratios = par_map<std::vector<double>>(
        static_cast<std::size_t>(jm), [&](std::size_t i) { return verify_tep2(static_cast<int>(i) + 1, disc, ks); });
    Csv csv = r.csv("tep2.csv", {"j", "k", "ratio"});
    for (int j = 1; j <= jm; ++j)
        for (std::size_t i = 0; i < ks.size(); ++i) csv.row({num(j), num(ks[i]), num(ratios[j - 1][i])});
    for (double k : t.tep2_k) r.within_rel(tag("ratio_j1_k", k), ratios[0][index_of(ks, k)], 1.0, t.tep2_j1);
    if (jm >= 2) r.within_rel(tag("ratio_j2_k", t.tep2_j2_k), ratios[1][index_of(ks, t.tep2_j2_k)], 1.0, t.tep2_j2);
}

void verify_teth1(Run& r)
{
    const FiberDiscretization disc = r.s.fiber();
    const Tolerances& t = r.s.tol;
    const std::vector<double> ks = sweep(0.0, 8.0, 0.5, {{t.teth1_near_k, t.teth1_far_k}});
    const int j = r.s.j;
    const auto v = par_map<double>(ks.size(), [&](std::size_t i) { return verify_teth1(j, disc, {ks[i]}).front(); });
    Csv csv = r.csv("teth1.csv", {"j", "k", "scaled_distance"});
    for (std::size_t i = 0; i < ks.size(); ++i) csv.row({num(j), num(ks[i]), num(v[i])});
    const double near = v[index_of(ks, t.teth1_near_k)];
    const double far = v[index_of(ks, t.teth1_far_k)];
    r.check(tag("below_bound_k", t.teth1_far_k), far < t.teth1_bound, far, t.teth1_bound, 0.0);
    r.check("decreasing", far < near, far, near, 0.0);
}

void verify_lau25(Run& r)
{
    const Tolerances& t = r.s.tol;
    const double b = r.s.b;
    const EdgePotential& W = r.s.W;
    const std::vector<double> ks = sweep(0.0, 8.0, 0.5, {{t.lau25_k}});
    const int jm = std::min(3, r.s.j_max);
    Csv csv = r.csv("lau25.csv", {"j", "k", "phi_squared", "asymptote", "ratio"});
    std::vector<std::vector<double>> ratio;
    for (int j = 1; j <= jm; ++j) {
        ratio.push_back(verify_lau25(j, b, W, ks));
        for (std::size_t i = 0; i < ks.size(); ++i)
            csv.row({num(j), num(ks[i]), num(phi_squared(j, ks[i], b, W)), num(step_asymptote(j, ks[i], b, W)),
                     num(ratio.back()[i])});
    }
    r.within_rel(tag("ratio_j1_k", t.lau25_k), ratio[0][index_of(ks, t.lau25_k)], 1.0, t.lau25);
    double err = 0.0;
    const double x0 = W.step_location();
    for (double k : ks) {
        const double exact = 0.5 * (W.w_plus() - W.w_minus()) * std::erfc(std::sqrt(b) * (k / b - x0));
        err = std::max(err, std::abs(phi_squared(1, k, b, W) - exact));
    }
    r.at_most("closed_form_j1", err, 0.0, t.closed_form);
}

void verify_kms(Run& r)
{
    const KmsSettings& k = r.s.kms;
    const Tolerances& t = r.s.tol;
    const Interval I{k.lo, k.hi};
    const double target = I.length() / std::numbers::pi;
    Csv csv = r.csv("modelops.csv", {"m", "operator", "threshold", "count", "ratio", "target", "precision_bits"});
    for (double m : k.trace_m) {
        const double v = kms_trace_ratio(I, m, 1);
        csv.row({num(m), "trace_g", "", "", num(v), num(target), "53"});
        r.within_rel(tag("trace_g_m", m), v, target, t.kms_trace);
    }
    for (int l : {2, 3}) {
        const double v = kms_trace_ratio(I, k.power_m, l);
        csv.row({num(k.power_m), fmt::format("trace_g^{}", l), "", "", num(v), num(target), "53"});
        r.within_rel(fmt::format("trace_g{}_m{}", l, k.power_m), v, target, l == 2 ? t.kms_l2 : t.kms_l3);
    }
    for (double s : {k.s_low, k.s_high}) {
        CountingReport rep;
        const double v = kms_count_ratio(I, k.count_m, s, 0, &rep);
        const bool inside = s < 1.0;
        csv.row({num(k.count_m), "count_g", num(s), num(rep.count), num(v), num(inside ? target : 0.0),
                 num(rep.precision_bits)});
        if (inside)
            r.within_rel(fmt::format("count_g_s{}_m{}", s, k.count_m), v, target, t.kms_count);
        else
            r.at_most(fmt::format("count_g_s{}_m{}", s, k.count_m), v, 0.0, t.kms_zero_branch);
    }
}

void verify_sandwich(Run& r)
{
    const Problem p = r.s.problem();
    const CountSettings& c = r.s.counting;
    const double lam = c.sandwich_lambda;
    const int j = r.s.j;
    const SandwichCounts sc = sandwich_counts(j, lam, c.eps, c.r, c.delta, c.sandwich_A, p);
    const double r2 = c.r * c.r;
    Csv csv = r.csv("counts.csv", count_header);
    csv.row(count_row(lam, j, "sjstar", r2, sc.s_report, sc.warnings));
    csv.row(count_row(lam, j, "q_minus", sc.q_lower_report.threshold, sc.q_lower_report));
    csv.row(count_row(lam, j, "q_plus", sc.q_upper_report.threshold, sc.q_upper_report));
    csv.row(count_row(lam, j, "gamma_minus", sc.gamma_lower_report.threshold, sc.gamma_lower_report));
    csv.row(count_row(lam, j, "gamma_plus", sc.gamma_upper_report.threshold, sc.gamma_upper_report));
    const double slack = static_cast<double>(r.s.tol.sandwich_slack);
    const double sc_count = static_cast<double>(sc.s_count);
    r.at_most("q_minus_below_sjstar", static_cast<double>(sc.q_lower), sc_count, slack);
    r.at_most("sjstar_below_q_plus", sc_count, static_cast<double>(sc.q_upper), slack);
    r.at_most("gamma_minus_below_sjstar", static_cast<double>(sc.gamma_lower), sc_count, slack);
    r.at_most("sjstar_below_gamma_plus", sc_count, static_cast<double>(sc.gamma_upper), slack);
}

void verify_weylkyfan(Run& r)
{
    const WeylKyFanSettings& w = r.s.weylkyfan;
    std::mt19937_64 rng(w.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::uniform_real_distribution<double> S(0.01, 3.0);
    const int n = w.size;
    const int cols = std::max(1, n - n / 4);
    auto sym = [&] {
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k <= i; ++k) a(i, k) = a(k, i) = U(rng);
        return a;
    };
    auto rect = [&] {
        Eigen::MatrixXcd t(n, cols);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < cols; ++k) t(i, k) = {U(rng), U(rng)};
        return t;
    };
    Csv csv = r.csv("weylkyfan.csv", {"trial", "inequality", "s1", "s2", "lhs", "rhs"});
    long weyl_bad = 0, kyfan_bad = 0;
    for (int trial = 0; trial < w.trials; ++trial) {
        const Eigen::MatrixXd A = sym(), B = sym();
        const double s1 = S(rng), s2 = S(rng);
        const long lhs = count_above(Eigen::MatrixXd(A + B), s1 + s2).count;
        const long rhs = count_above(A, s1).count + count_above(B, s2).count;
        weyl_bad += lhs > rhs;
        csv.row({num(trial), "weyl", num(s1), num(s2), num(lhs), num(rhs)});
    }
    for (int trial = 0; trial < w.trials; ++trial) {
        const Eigen::MatrixXcd T1 = rect(), T2 = rect();
        const double s1 = S(rng), s2 = S(rng);
        const long lhs = n_star(Eigen::MatrixXcd(T1 + T2), s1 + s2).count;
        const long rhs = n_star(T1, s1).count + n_star(T2, s2).count;
        kyfan_bad += lhs > rhs;
        csv.row({num(trial), "ky_fan", num(s1), num(s2), num(lhs), num(rhs)});
    }
    r.at_most("weyl_violations", static_cast<double>(weyl_bad), 0.0);
    r.at_most("ky_fan_violations", static_cast<double>(kyfan_bad), 0.0);
}

void cmd_effective_count(Run& r)
{
    const Problem p = r.s.problem();
    const CountSettings& c = r.s.counting;
    const int j = r.s.j;
    Csv csv = r.csv("counts.csv", count_header);
    std::vector<long> uppers;
    for (double lam : r.s.lambdas) {
        const EffectiveCount e = effective_count(j, lam, c.eps, p, c.A);
        csv.row(count_row(lam, j, "effective_lower", 1.0 + c.eps, e.lower_report, e.warnings));
        csv.row(count_row(lam, j, "effective_upper", 1.0 - c.eps, e.upper_report, e.warnings));
        r.at_most(tag("ordered_lambda", lam), static_cast<double>(e.lower), static_cast<double>(e.upper));
        uppers.push_back(e.upper);
    }
    if (finiteness_predicate(r.s.V, r.s.W)) {
        const auto [lo, hi] = std::minmax_element(uppers.begin(), uppers.end());
        r.at_most("finiteness_upper_variation", static_cast<double>(*hi - *lo), 0.0,
                  static_cast<double>(r.s.tol.finiteness_variation));
    }
}

void cmd_bs_count(Run& r)
{
    const Problem p = r.s.problem();
    const CountSettings& c = r.s.counting;
    const int j = r.s.j;
    const double slack = static_cast<double>(r.s.tol.cross_route_slack);
    Csv csv = r.csv("counts.csv", count_header);
    for (double lam : r.s.lambdas) {
        const BsCount bs = bs_count(j, lam, p, c.j_sum);
        const EffectiveCount e = effective_count(j, lam, c.eps, p, c.A);
        csv.row(count_row(lam, j, "birman_schwinger", 1.0, bs.report, bs.warnings));
        csv.row(count_row(lam, j, "effective_lower", 1.0 + c.eps, e.lower_report, e.warnings));
        csv.row(count_row(lam, j, "effective_upper", 1.0 - c.eps, e.upper_report, e.warnings));
        const double n = static_cast<double>(bs.count);
        r.at_most(tag("lower_below_bs_lambda", lam), static_cast<double>(e.lower), n, slack);
        r.at_most(tag("bs_below_upper_lambda", lam), n, static_cast<double>(e.upper), slack);
    }
    // Anti-Wick form against the full-line S^*S at the first lambda.
    const double lam = r.s.lambdas.front();
    const DiscretizedOperator full = sjstar_sj(j, lam, minus_infinity, p);
    const DiscretizedOperator aw = antiwick_matrix(j, lam, p);
    for (double thr : {0.5, 1.0, 2.0}) {
        const CountingReport a = count_above(full, thr, p.counting);
        const CountingReport b = count_above(aw, thr, p.counting);
        csv.row(count_row(lam, j, "sjstar_full_line", thr, a, full.warnings));
        csv.row(count_row(lam, j, "antiwick", thr, b, aw.warnings));
        r.check(tag("antiwick_agrees_r", thr), a.count == b.count, static_cast<double>(b.count),
                static_cast<double>(a.count), 0.0);
    }
}

void cmd_scaling(Run& r)
{
    const Problem p = r.s.problem();
    const CountSettings& c = r.s.counting;
    const bool finite = finiteness_predicate(r.s.V, r.s.W);
    std::optional<AsymptoticConstants> ac;
    try {
        const double xp = r.s.W.x_plus();
        ac = asymptotic_constants(r.s.V.omega_minus.translated(-xp, 0.0), r.s.V.omega_plus.translated(-xp, 0.0),
                                  r.s.b, r.s.c_plus_search);
    } catch (const EmptyIntersection&) {
    }
    Csv csv = r.csv("scaling.csv", {"lambda", "m", "route", "lower", "upper", "C_minus_term", "C_plus_term",
                                    "precision_bits", "warnings"});
    std::vector<double> x, ylo, yhi;
    std::vector<long> uppers;
    for (double lam : r.s.lambdas) {
        const double L = std::abs(std::log(lam));
        const double m = std::sqrt(r.s.b * L);
        long lo = 0, hi = 0;
        int bits = 53;
        std::vector<std::string> warn;
        std::string route;
        if (finite) {
            const EffectiveCount e = effective_count(r.s.j, lam, c.eps, p, c.A);
            lo = e.lower;
            hi = e.upper;
            bits = std::max(e.lower_report.precision_bits, e.upper_report.precision_bits);
            warn = e.warnings;
            route = "effective";
        } else {
            const GammaBracket g = gamma_bracket(lam, c.r, c.eps, c.delta, p);
            lo = g.lower;
            hi = g.upper;
            bits = std::max(g.lower_report.precision_bits, g.upper_report.precision_bits);
            warn = g.lower_report.warnings;
            warn.insert(warn.end(), g.upper_report.warnings.begin(), g.upper_report.warnings.end());
            route = "gamma";
        }
        const double cm = ac ? ac->C_minus * std::sqrt(L) : 0.0;
        const double cp = ac ? ac->C_plus * std::sqrt(L) : 0.0;
        csv.row({num(lam), num(m), route, num(lo), num(hi), num(cm), num(cp), num(bits), join(warn)});
        r.at_most(tag("ordered_lambda", lam), static_cast<double>(lo), static_cast<double>(hi));
        x.push_back(std::log(L));
        ylo.push_back(std::log(std::max<long>(lo, 1)));
        yhi.push_back(std::log(std::max<long>(hi, 1)));
        uppers.push_back(hi);
    }
    const Tolerances& t = r.s.tol;
    const double mid = 0.5 * (t.slope_lo + t.slope_hi);
    const double half = 0.5 * (t.slope_hi - t.slope_lo);
    if (finite) {
        const auto [lo, hi] = std::minmax_element(uppers.begin(), uppers.end());
        r.at_most("finiteness_upper_variation", static_cast<double>(*hi - *lo), 0.0,
                  static_cast<double>(t.finiteness_variation));
    } else if (x.size() >= 4) {   // fewer points do not make a regression
        r.within_abs("slope_lower", slope(x, ylo), mid, half);
        r.within_abs("slope_upper", slope(x, yhi), mid, half);
    }
}

void cmd_geometry(Run& r)
{
    const double b = r.s.b;
    const double xp = r.s.W.x_plus();
    const double shift = std::isfinite(xp) ? -xp : 0.0;
    Csv csv = r.csv("geometry.csv", {"name", "c_minus", "c_plus", "C_minus", "C_plus", "diam"});
    auto emit = [&](const std::string& name, const Polygon& lo, const Polygon& hi) {
        try {
            const AsymptoticConstants a =
                asymptotic_constants(lo.translated(shift, 0.0), hi.translated(shift, 0.0), b, r.s.c_plus_search);
            const double diam = clip_positive_halfplane(hi.translated(shift, 0.0)).diameter();
            csv.row({name, num(a.c_minus), num(a.c_plus), num(a.C_minus), num(a.C_plus), num(diam)});
            r.check(name + "_c_plus_at_least_half_diameter", a.c_plus >= 0.5 * diam * (1.0 - 1e-12), a.c_plus,
                    0.5 * diam, 0.0);
            r.check(name + "_C_minus_below_C_plus", a.C_minus < a.C_plus, a.C_minus, a.C_plus, 0.0);
        } catch (const EmptyIntersection&) {
            csv.row({name, "0", "0", "0", "0", "0"});
        }
    };
    const Perturbation& V = r.s.V;
    emit("support", V.support, V.support);
    emit("omega_minus", V.omega_minus, V.omega_minus);
    emit("omega_plus", V.omega_plus, V.omega_plus);
    emit("sandwich", V.omega_minus, V.omega_plus);
}

void write_summary(const Run& r)
{
    json v = json::array();
    for (const Verdict& d : r.verdicts)
        v.push_back({{"name", d.name}, {"pass", d.pass}, {"value", d.value}, {"target", d.target}, {"tol", d.tol}});
    const json summary = {{"subcommand", r.subcommand}, {"scenario_hash", r.s.hash()}, {"verdicts", v}};
    std::ofstream(r.out / "summary.json") << summary.dump(2) << '\n';
    std::ofstream(r.out / "scenario.json") << r.s.to_json().dump(2) << '\n';
}

struct Flags {
    std::string config;
    std::string out;
    int j = 0;
    int precision_bits = 0;
    std::string target;
};

int execute(const std::string& sub, const Flags& f)
{
    if (sub == "schema") {
        std::cout << scenario_schema().dump(2) << '\n';
        return ok;
    }
    Scenario s = load_scenario(f.config);
    if (f.j > 0) {
        s.j = f.j;
        s.j_max = std::max(s.j_max, f.j);
    }
    if (f.precision_bits > 0) s.precision_bits = f.precision_bits;
    if (!f.out.empty()) s.output_dir = f.out;
    s.validate();
    if (s.normalize) s = s.normalized();

    Run r{sub == "verify" ? "verify " + f.target : sub, s, fs::path(s.output_dir), {}};
    fs::create_directories(r.out);

    static const std::map<std::string, void (*)(Run&)> table{
        {"bands", cmd_bands},
        {"gaps", cmd_gaps},
        {"phi", cmd_phi},
        {"verify p21", verify_p21},
        {"verify tep2", verify_tep2},
        {"verify teth1", verify_teth1},
        {"verify lau25", verify_lau25},
        {"verify kms", verify_kms},
        {"verify sandwich", verify_sandwich},
        {"verify weylkyfan", verify_weylkyfan},
        {"effective-count", cmd_effective_count},
        {"bs-count", cmd_bs_count},
        {"scaling", cmd_scaling},
        {"geometry", cmd_geometry},
    };
    table.at(r.subcommand)(r);
    write_summary(r);

    bool all = true;
    for (const Verdict& v : r.verdicts) {
        std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << " value=" << num(v.value) << " target="
                  << num(v.target) << " tol=" << num(v.tol) << '\n';
        all = all && v.pass;
    }
    return all ? ok : verification_failure;
}

} // namespace

int run(int argc, char** argv)
{
    CLI::App app{"Edge-state band and eigenvalue-counting toolkit"};
    app.require_subcommand(1);
    Flags f;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "scenario JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", f.out, "output directory (overrides the config)");
        sub->add_option("--j", f.j, "band level")->check(CLI::PositiveNumber);
        sub->add_option("--precision-bits", f.precision_bits, "precision cap in bits")->check(CLI::Range(53, 4096));
    };
    for (const char* name : {"bands", "gaps", "phi", "effective-count", "bs-count", "scaling", "geometry"})
        common(app.add_subcommand(name));
    CLI::App* verify = app.add_subcommand("verify", "run a verification check");
    verify->add_option("check", f.target, "which check")
        ->required()
        ->check(CLI::IsMember({"p21", "tep2", "teth1", "lau25", "kms", "sandwich", "weylkyfan"}));
    common(verify);
    app.add_subcommand("schema", "print the scenario JSON schema");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : invalid_config;
    }
    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        return execute(sub, f);
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    } catch (const Error& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return invalid_config;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << e.what() << '\n';
        return invalid_config;
    }
}

} // namespace edgegap::cli
