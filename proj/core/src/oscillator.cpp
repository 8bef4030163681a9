#include "edgegap/oscillator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace edgegap {

std::vector<double> phi_all(int jmax, double x)
{
    if (jmax < 1) throw std::invalid_argument("phi: level must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(jmax));
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    out[0] = cur;
    for (int j = 1; j < jmax; ++j) {
        const double next = x * std::sqrt(2.0 / j) * cur - std::sqrt((j - 1.0) / j) * prev;
        prev = cur;
        cur = next;
        out[static_cast<std::size_t>(j)] = cur;
    }
    return out;
}

double phi(int j, double x) { return phi_all(j, x).back(); }

double psi_inf(int j, double k, double x, double b)
{
    const double sb = std::sqrt(b);
    return std::pow(b, 0.25) * phi(j, sb * x - k / sb);
}

double p_coeff(int j, double b)
{
    if (j < 1 || !(b > 0.0)) throw std::invalid_argument("p_coeff: need j >= 1, b > 0");
    const double lg = (-j + 1.5) * std::log(b) - 0.5 * std::log(std::numbers::pi) - std::lgamma(j) -
                      (j - 1) * std::log(2.0);
    return std::exp(lg);
}

double leading_weight(int j, double b) { return std::ldexp(p_coeff(j, b), 2 * (j - 1)); }

double psi_inf_asymptotic(int j, double k, double x, double b)
{
    const double sb = std::sqrt(b);
    const double u = k / sb - sb * x;
    return std::sqrt(leading_weight(j, b)) * std::pow(-k, j - 1) * std::exp(-0.5 * u * u);
}

} // namespace edgegap
