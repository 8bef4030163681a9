#include "edgegap/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace edgegap {

Rule gauss_legendre(int n, double a, double b)
{
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    Rule r;
    r.nodes.resize(static_cast<std::size_t>(n));
    r.weights.resize(static_cast<std::size_t>(n));
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                // one more derivative evaluation at the converged node
                p1 = 1.0;
                p2 = 0.0;
                for (int j = 1; j <= n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
                }
                pp = n * (z * p1 - p2) / (z * z - 1.0);
                break;
            }
        }
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
        r.nodes[lo] = mid - half * z;
        r.nodes[hi] = mid + half * z;
        r.weights[lo] = r.weights[hi] = half * w;
    }
    return r;
}

Rule composite_gauss(const std::vector<double>& breaks, int order)
{
    Rule out;
    const Rule ref = gauss_legendre(order);
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        if (!(b > a)) continue;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            out.nodes.push_back(mid + half * ref.nodes[i]);
            out.weights.push_back(half * ref.weights[i]);
        }
    }
    return out;
}

Rule panel_rule(double a, double b, double h, int order, const std::vector<double>& extra_breaks)
{
    std::vector<double> cuts{a, b};
    for (double x : extra_breaks)
        if (x > a && x < b) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<double> breaks;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / h - 1e-12)));
        for (int q = 0; q < panels; ++q) breaks.push_back(lo + (hi - lo) * q / panels);
    }
    breaks.push_back(cuts.back());
    return composite_gauss(breaks, order);
}

HermiteRule gauss_hermite(int n)
{
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be positive");
    HermiteRule r;
    const auto un = static_cast<std::size_t>(n);
    r.nodes.assign(un, 0.0);
    r.weights.assign(un, 0.0);
    r.scaled_weights.assign(un, 0.0);
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * r.nodes[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * r.nodes[1];
        else
            z = 2.0 * z - r.nodes[static_cast<std::size_t>(i - 2)];
        double f_prev = 0.0, f = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Hermite functions: orthonormal polynomials times e^{-z^2/2}
            double p1 = pim4 * std::exp(-0.5 * z * z), p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            f = p1;
            f_prev = p2;
            const double dfdz = std::sqrt(2.0 * n) * f_prev - z * f;
            const double dz = f / dfdz;
            z -= dz;
            if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        double p1 = pim4 * std::exp(-0.5 * z * z), p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
        }
        const double deriv = std::sqrt(2.0 * n) * p2;   // psi_n' at a zero of psi_n
        const double sw = 2.0 / (deriv * deriv);
        const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
        r.nodes[lo] = z;
        r.nodes[hi] = -z;
        r.scaled_weights[lo] = r.scaled_weights[hi] = sw;
        r.weights[lo] = r.weights[hi] = sw * std::exp(-z * z);
    }
    std::reverse(r.nodes.begin(), r.nodes.end());
    std::reverse(r.weights.begin(), r.weights.end());
    std::reverse(r.scaled_weights.begin(), r.scaled_weights.end());
    return r;
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol)
{
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(f, a, b, 30, tol);
}

} // namespace edgegap
