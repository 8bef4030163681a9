#pragma once

#include <functional>
#include <vector>

namespace edgegap {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

// n-point Gauss-Legendre on [a, b].
Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Composite Gauss-Legendre: `order` points on each panel between consecutive breaks.
Rule composite_gauss(const std::vector<double>& breaks, int order);
// Uniform panels of width at most h on [a, b], with the given interior breaks honoured.
Rule panel_rule(double a, double b, double h, int order, const std::vector<double>& extra_breaks = {});

// Gauss-Hermite for weight e^{-x^2}. `scaled_weights` holds w_i e^{x_i^2}.
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> scaled_weights;
};
HermiteRule gauss_hermite(int n);

// Adaptive Gauss-Kronrod on [a, b] (a, b may be infinite).
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-14);

} // namespace edgegap
