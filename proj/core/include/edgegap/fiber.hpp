#pragma once

#include "edgegap/potentials.hpp"

#include <vector>

namespace edgegap {

// Second-order finite differences for h(k) = -d^2/dx^2 + (bx - k)^2 + W(x) on
// [k/b - L, k/b + L] with Dirichlet ends; N nodes, spacing 2L/(N-1).
struct FiberDiscretization {
    int N = 2001;
    double half_width = 12.0;
    double b = 1.0;
    EdgePotential W = EdgePotential::step(0.0, 1.0, 0.0);
    // Eigenvalues extrapolated from the N and 2N-1 grids.
    bool richardson = true;

    static FiberDiscretization standard(double b, const EdgePotential& w, int N = 2001);
    void validate() const;
};

struct FiberEigenpair {
    int j = 1;
    double k = 0.0;
    // E_j^+ minus the identity-based gap distance (accurate in both band tails)
    double E = 0.0;
    // Richardson-extrapolated finite-difference eigenvalue
    double E_grid = 0.0;
    std::vector<double> x;
    std::vector<double> psi;          // unit norm under trapezoid weights
    double overlap_with_limit = 0.0;  // <psi_j(.;k), psi_{j,inf}(.;k)>, made nonnegative
    // E_j^+ - E_j(k), from <psi_lim, (W_+ - W) psi> / <psi_lim, psi> on one grid
    double gap_distance = 0.0;
    // trace norm of the difference between the two rank-one projections
    double projection_distance = 0.0;
};

struct SolveOptions {
    bool vectors = true;
    // Re-solve on the doubled grid and fail if E_1 moves by more than `tolerance`.
    bool check_convergence = false;
    double tolerance = 1e-7;
};

std::vector<FiberEigenpair> solve_fiber(const FiberDiscretization& disc, double k, int j_max,
                                        const SolveOptions& opt = {});

// Band energies E_1(k) .. E_{j_max}(k).
std::vector<double> fiber_energies(const FiberDiscretization& disc, double k, int j_max);
// Extrapolated finite-difference eigenvalues without the identity correction (no eigenvectors).
std::vector<double> grid_energies(const FiberDiscretization& disc, double k, int j_max);

// E_j^+ - E_j(k) for j = 1..j_max.
std::vector<double> gap_distances(const FiberDiscretization& disc, double k, int j_max);

struct GapEdges {
    double lower = 0.0;   // top of band j
    double upper = 0.0;   // bottom of band j + 1
};

double band_top(double b, const EdgePotential& w, int j);
double band_bottom(double b, const EdgePotential& w, int j);
GapEdges gap_edges(double b, const EdgePotential& w, int j);

// Integral of (W_+ - W(x + k/b)) b^{1/2} phi_j(b^{1/2} x)^2 dx.
double phi_squared(int j, double k, double b, const EdgePotential& w);

// 2 sqrt(1 - c^2) for unit vectors with overlap c.
double projection_distance(double c);
// Projection distance from ||u - v||^2 of sign-aligned unit vectors; avoids cancellation.
double projection_distance_from_gap(double diff_sq);
double projection_distance(int j, double k, const FiberDiscretization& disc);

struct BandTable {
    std::vector<double> k;
    int j_max = 0;
    std::vector<std::vector<double>> E;   // E[j-1][i]
    std::vector<GapEdges> gaps;            // per level, empty when the gap condition fails
};

BandTable band_table(const FiberDiscretization& disc, const std::vector<double>& k, int j_max);

// (E_j^+ - E_j(k)) / Phi_j(k)^2
std::vector<double> verify_tep2(int j, const FiberDiscretization& disc, const std::vector<double>& k);
// (E_j^+ - E_j(k))^{-1/2} times the projection distance; 0 when both vanish.
std::vector<double> verify_teth1(int j, const FiberDiscretization& disc, const std::vector<double>& k);
// ((w_+ - w_-)/2) p k^{2j-3} exp(-(k/sqrt(b) - sqrt(b) x0)^2) for a step.
double step_asymptote(int j, double k, double b, const EdgePotential& step);
// Phi_j(k)^2 over the step asymptote; WrongPotentialKind unless W is a step.
std::vector<double> verify_lau25(int j, double b, const EdgePotential& w, const std::vector<double>& k);

} // namespace edgegap
