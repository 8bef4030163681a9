#pragma once

#include <vector>

namespace edgegap {

// Normalized Hermite function phi_j, j >= 1, via the three-term recurrence.
double phi(int j, double x);
// phi_1 .. phi_jmax at x.
std::vector<double> phi_all(int jmax, double x);

// Limiting fiber eigenfunction b^{1/4} phi_j(b^{1/2} x - b^{-1/2} k).
double psi_inf(int j, double k, double x, double b);

// b^{-j+3/2} / (sqrt(pi) (j-1)! 2^{j-1})
double p_coeff(int j, double b);
// Squared leading coefficient of psi_inf in (-k)^{j-1}: 4^{j-1} p_coeff(j, b).
double leading_weight(int j, double b);

// Large-k form (leading_weight)^{1/2} (-k)^{j-1} exp(-(k/sqrt(b) - sqrt(b) x)^2 / 2).
double psi_inf_asymptotic(int j, double k, double x, double b);

struct HermiteBasis {
    int j_max = 1;
    double b = 1.0;
    double operator()(int j, double k, double x) const { return psi_inf(j, k, x, b); }
};

} // namespace edgegap
