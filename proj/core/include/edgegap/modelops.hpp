#pragma once

#include "edgegap/bsham.hpp"
#include "edgegap/counting.hpp"
#include "edgegap/geometry.hpp"

#include <utility>
#include <vector>

namespace edgegap {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }

    static Interval minus(double delta);   // (delta, 1 - delta)
    static Interval plus(double delta);    // (0, 1 + delta)
    static Interval star(double delta);    // (0, 1 / (1 + delta))
    void validate() const;
};

enum class Side { minus, plus };

struct HoloQuad {
    int k_nodes = 0;       // 0: chosen from m and the domain size
    int k_order = 16;
    double x_rate = 6.0;   // panel width times the largest exponential rate in x
    int x_order = 10;
};

// pi^{-1} m^2 sqrt(k k') int_Omega e^{-b x^2} e^{m (x + shift)(k + k')} e^{i m y (k - k')} dmu on L^2(I).
// weight_b = 0 drops the Gaussian weight. The high-precision core is always attached.
DiscretizedOperator holomorphic_gram(double m, double shift, const Polygon& omega, const Interval& I,
                                     double weight_b, const HoloQuad& q = {});

// Gamma^*Gamma for side minus (I_-, no shift) or plus (I_+, shift delta).
DiscretizedOperator gamma_gram(Side side, double m, double delta, const Polygon& omega, double b,
                               const HoloQuad& q = {});

// Kernel of G^-_{eta,delta}(m): e^{eta m (k + k')} sin(m (k - k')) / (pi (k - k')) 2 sqrt(k k') / (k + k').
double g_minus_kernel(double eta, double m, double k, double kp);

// Nystrom discretization of the sinc kernel on I (n = 0 picks a resolving default).
DiscretizedOperator g_sinc(const Interval& I, double m, int n = 0);
double g_sinc_kernel(double m, double k, double kp);

double kms_trace_ratio(const Interval& I, double m, int l, int n = 0);
// m^{-1} n_+(s; g_I(m)).
double kms_count_ratio(const Interval& I, double m, double s, int n = 0, CountingReport* report = nullptr);

// theta[q][l] for k^q = sum_l theta_{q,l} p_l(k), p_l orthonormal on I_*(delta).
std::vector<std::vector<double>> theta_coeffs(double delta, int q_max);

struct GammaDiagCount {
    long count = 0;
    double ratio = 0.0;    // count / m
    double target = 0.0;   // e R kappa((xi + delta)_+ / (e R))
};
GammaDiagCount gamma_diag_count(double m, double xi, double delta, double R, double s);

// (series, direct quadrature) for int_{B_R(0)} e^{m (z k + conj(z) k')} dmu(z).
std::pair<double, double> disk_moment_check(double m, double R, double k, double kp);

// inf and sup of e^{-b x^2} over the x-projection of omega.
double epsilon_minus(const Polygon& omega, double b);
double epsilon_plus(const Polygon& omega, double b);

// Q_j^+-(lambda; A)^* Q_j^+-(lambda; A) over Omega_+- with the envelope band functions.
DiscretizedOperator q_operator(Side side, int j, double lambda, double A, double delta, const Problem& p);

// Lower-bound chain for an axis-parallel rectangle (alpha, beta) x (eta - L, eta + L) inside Omega_-.
struct ChainCheck {
    long gram_count = 0;     // n_+(r; Gamma^-* Gamma^-) on Omega_-
    long sinc_count = 0;     // n_+(s; g_{I_-}(m L))
    double sinc_threshold = 0.0;
    double ratio = 0.0;      // sinc_count / m
    double target = 0.0;     // (1 - 2 delta) L sqrt(b) / pi
    CountingReport gram_report;
};
ChainCheck chain_lower_bound(double m, double delta, double r, double alpha, double beta, double L,
                             const Polygon& omega_minus, double b, bool with_gram = true, const HoloQuad& q = {});

// Gamma-route bracket for n_*(r; S_j) at m = sqrt(b |ln lambda|).
struct GammaBracket {
    double m = 0.0;
    long lower = 0;
    long upper = 0;
    CountingReport lower_report;
    CountingReport upper_report;
};
GammaBracket gamma_bracket(double lambda, double r, double eps, double delta, const Problem& p,
                           const HoloQuad& q = {});

// Sandwich counts around n_*(r; S_j(lambda; A)).
struct SandwichCounts {
    long s_count = 0;
    long q_lower = 0;
    long q_upper = 0;
    long gamma_lower = 0;
    long gamma_upper = 0;
    double m = 0.0;
    CountingReport s_report;
    CountingReport q_lower_report;
    CountingReport q_upper_report;
    CountingReport gamma_lower_report;
    CountingReport gamma_upper_report;
    std::vector<std::string> warnings;
};
SandwichCounts sandwich_counts(int j, double lambda, double eps, double r, double delta, double A,
                               const Problem& p, const HoloQuad& q = {});

} // namespace edgegap
