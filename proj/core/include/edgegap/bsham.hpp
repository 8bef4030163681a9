#pragma once

#include "edgegap/counting.hpp"
#include "edgegap/fiber.hpp"
#include "edgegap/geometry.hpp"
#include "edgegap/potentials.hpp"
#include "edgegap/quadrature.hpp"

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace edgegap {

// Panel sizes are in units of b^{-1/2}.
struct QuadratureSpec {
    double k_panel = 0.25;
    int k_order = 6;
    double x_panel = 0.1;
    int x_order = 8;
    int y_order_min = 10;          // Gauss points per vertical chord (phase-space routes)
    double band_step = 0.05;       // sampling step of the band interpolant
    double tail_tol = 1e-16;       // K_max tail criterion
    double k_max_override = 0.0;   // > 0 replaces the tail rule (checked, may warn)
};

// Everything the counting routes need about one physical setup.
struct Problem {
    FiberDiscretization fiber;
    Perturbation V;
    QuadratureSpec quad;
    CountingOptions counting;

    double b() const { return fiber.b; }
    const EdgePotential& W() const { return fiber.W; }
};

// Hermitian matrix diag(e^{s}) C diag(e^{s}) on quadrature nodes, weights already symmetrized.
// Keeping the scale apart lets counts run on the congruent matrix C - r diag(e^{-2s}).
struct DiscretizedOperator {
    Rule rows;
    Rule cols;
    Eigen::VectorXd log_scale;
    Eigen::MatrixXcd core;
    // Optional exact-precision assembly of `core` (used when double entries are not enough).
    HpAssembler hp_core;

    int j = 0;
    double lambda = 0.0;
    double A = 0.0;
    double k_max = 0.0;
    std::vector<std::string> warnings;

    int size() const { return static_cast<int>(core.rows()); }
    Eigen::MatrixXcd matrix() const;
    LogMatrix log_matrix() const;
};

// n_+(r; M) through the congruence with diag(e^{-s}); tie diagnostics from the plain spectrum.
CountingReport count_above(const DiscretizedOperator& op, double r, const CountingOptions& opt = {});

// E_j^+ - E_j(k) sampled on a grid and interpolated cubically in log scale.
class BandInterpolant {
public:
    BandInterpolant(const FiberDiscretization& disc, int j, double k_lo, double k_hi, double step);
    double gap_distance(double k) const;
    double energy(double k) const { return top_ - gap_distance(k); }
    double k_lo() const { return k0_; }
    double k_hi() const { return k0_ + step_ * static_cast<double>(d_.size() - 1); }

private:
    double k0_ = 0.0;
    double step_ = 0.05;
    double top_ = 0.0;
    std::vector<double> d_;
    std::vector<double> logd_;
};

// Shared interpolant (cached per discretization, level and range).
const BandInterpolant& band_interpolant(const FiberDiscretization& disc, int j, double k_lo, double k_hi,
                                        double step);

// Smallest K above the envelope peak with w_j K^{2j-2} exp(-(K/sqrt b - sqrt b x_edge)^2) below
// `tol` times its maximum over k >= A.
double k_max_rule(int j, double b, double x_edge, double A, double tol = 1e-16);
// Most negative k needed when A = -infinity (Gaussian tail at the left support edge).
double k_min_rule(int j, double b, double x_left, double tol = 1e-16);

// Quadrature over a polygon: Gauss panels in x between vertex abscissae, chords per node.
struct ChordRule {
    std::vector<double> x;
    std::vector<double> w;
    std::vector<std::vector<std::pair<double, double>>> chords;
};
ChordRule chord_rule(const Polygon& omega, double panel, int order);

// sum_chords int e^{i omega y} dy for one node.
std::complex<double> chord_fourier(const std::vector<std::pair<double, double>>& chords, double omega);

// G(a, c) = amp / (2 pi) sum_q w_q f(a, q) f(c, q) int_chords e^{i (kappa_a - kappa_c) y} dy,
// with f already carrying any k-weights.
Eigen::MatrixXcd profile_gram(const Eigen::MatrixXd& f, const std::vector<double>& kappa, const ChordRule& cr,
                              double amp);

inline constexpr double minus_infinity = -std::numeric_limits<double>::infinity();

// S_j(lambda; A)^* S_j(lambda; A). A = minus_infinity gives the symmetric k range.
DiscretizedOperator sjstar_sj(int j, double lambda, double A, const Problem& p);

struct EffectiveCount {
    long lower = 0;   // n_+(1 + eps; S^*S)
    long upper = 0;   // n_+(1 - eps; S^*S)
    CountingReport lower_report;
    CountingReport upper_report;
    std::vector<std::string> warnings;
};
EffectiveCount effective_count(int j, double lambda, double eps, const Problem& p, double A = 0.0);

// F V_j F from the coherent family over phase space, F = (E_j^+ - E_j + lambda)^{-1/2}.
DiscretizedOperator antiwick_matrix(int j, double lambda, const Problem& p);

struct BsCount {
    long count = 0;
    CountingReport report;
    int j_sum = 0;
    double remainder_bound = 0.0;   // norm bound of the dropped fiber levels
    int nodes = 0;
    std::vector<std::string> warnings;
};
// n_-(1; V^{1/2} (H_0 - E_j^+ - lambda)^{-1} V^{1/2}) from the truncated fiber expansion.
BsCount bs_count(int j, double lambda, const Problem& p, int j_sum = 0);

} // namespace edgegap
