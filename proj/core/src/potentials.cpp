#include "edgegap/potentials.hpp"

#include "edgegap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace edgegap {

std::string to_string(PotentialKind kind)
{
    switch (kind) {
    case PotentialKind::step: return "step";
    case PotentialKind::two_step_upper: return "two_step_upper";
    case PotentialKind::piecewise_constant: return "piecewise_constant";
    case PotentialKind::smooth_monotone: return "smooth_monotone";
    }
    return "unknown";
}

EdgePotential EdgePotential::step(double w_minus, double w_plus, double x0)
{
    EdgePotential w;
    w.kind_ = PotentialKind::step;
    w.breaks_ = {x0};
    w.values_ = {w_minus, w_plus};
    w.x0_ = x0;
    return w;
}

EdgePotential EdgePotential::two_step_upper(double w_low, double w_plus, double x0, double delta)
{
    if (!(delta > 0.0)) throw InvalidConfig("two_step_upper: delta must be positive");
    EdgePotential w;
    w.kind_ = PotentialKind::two_step_upper;
    w.breaks_ = {x0 - delta};
    w.values_ = {w_low, w_plus};
    w.x0_ = x0;
    w.delta_ = delta;
    return w;
}

EdgePotential EdgePotential::piecewise_constant(std::vector<double> breaks, std::vector<double> values)
{
    if (values.size() != breaks.size() + 1)
        throw InvalidConfig("piecewise_constant: need one more value than breakpoints");
    for (std::size_t i = 1; i < breaks.size(); ++i)
        if (!(breaks[i] > breaks[i - 1]))
            throw InvalidConfig("piecewise_constant: breakpoints must be strictly increasing");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[i - 1]) throw InvalidConfig("piecewise_constant: values must be non-decreasing");
    EdgePotential w;
    w.kind_ = PotentialKind::piecewise_constant;
    w.breaks_ = std::move(breaks);
    w.values_ = std::move(values);
    return w;
}

EdgePotential EdgePotential::smooth_monotone(double w_minus, double w_plus, double x0, double width)
{
    if (!(width > 0.0)) throw InvalidConfig("smooth_monotone: width must be positive");
    if (w_plus < w_minus) throw InvalidConfig("smooth_monotone: w_plus < w_minus");
    EdgePotential w;
    w.kind_ = PotentialKind::smooth_monotone;
    w.values_ = {w_minus, w_plus};
    w.x0_ = x0;
    w.width_ = width;
    return w;
}

double EdgePotential::operator()(double x) const
{
    if (kind_ == PotentialKind::smooth_monotone) {
        const double a = values_.front(), b = values_.back();
        return a + (b - a) * 0.5 * (1.0 + std::tanh((x - x0_) / width_));
    }
    // x >= break selects the right-hand value
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    return values_[static_cast<std::size_t>(it - breaks_.begin())];
}

double EdgePotential::average(double a, double b) const
{
    if (!(b > a)) return (*this)(a);
    if (kind_ == PotentialKind::smooth_monotone) {
        const double lo = values_.front(), hi = values_.back();
        // integral of tanh(u) is log cosh(u), written to avoid overflow
        auto logcosh = [](double u) {
            const double t = std::abs(u);
            return t + std::log1p(std::exp(-2.0 * t)) - std::log(2.0);
        };
        const double ua = (a - x0_) / width_, ub = (b - x0_) / width_;
        const double mean_tanh = width_ * (logcosh(ub) - logcosh(ua)) / (b - a);
        return lo + (hi - lo) * 0.5 * (1.0 + mean_tanh);
    }
    double acc = 0.0;
    double left = a;
    std::size_t i = static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), a) - breaks_.begin());
    while (left < b) {
        const double right = (i < breaks_.size()) ? std::min(b, breaks_[i]) : b;
        acc += values_[i] * (right - left);
        left = right;
        ++i;
    }
    return acc / (b - a);
}

double EdgePotential::x_plus() const
{
    if (kind_ == PotentialKind::smooth_monotone) return std::numeric_limits<double>::infinity();
    const double top = values_.back();
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] == top) return i == 0 ? -std::numeric_limits<double>::infinity() : breaks_[i - 1];
    return std::numeric_limits<double>::infinity();
}

double EdgePotential::step_location() const
{
    if (kind_ == PotentialKind::smooth_monotone) return x0_;
    return breaks_.front();
}

PotentialLimits EdgePotential::limits() const { return {w_minus(), w_plus(), x_plus()}; }

EdgePotential EdgePotential::translated(double dx) const
{
    EdgePotential w = *this;
    for (double& b : w.breaks_) b += dx;
    w.x0_ += dx;
    return w;
}

PotentialLimits potential_limits(const EdgePotential& w)
{
    const PotentialLimits lim = w.limits();
    if (!(lim.w_minus < lim.w_plus)) throw ConstantPotential("edge potential is constant (W_- = W_+)");
    return lim;
}

bool gap_condition(const EdgePotential& w, double b) { return w.w_plus() - w.w_minus() < 2.0 * b; }

EdgePotential lower_envelope(const EdgePotential& w)
{
    const PotentialLimits lim = potential_limits(w);
    if (!std::isfinite(lim.x_plus)) throw DomainError("lower envelope needs a finite saturation point");
    return EdgePotential::step(lim.w_minus, lim.w_plus, lim.x_plus);
}

EdgePotential upper_envelope(const EdgePotential& w, double delta)
{
    const PotentialLimits lim = potential_limits(w);
    if (!std::isfinite(lim.x_plus)) throw DomainError("upper envelope needs a finite saturation point");
    return EdgePotential::two_step_upper(w(lim.x_plus - delta), lim.w_plus, lim.x_plus, delta);
}

Perturbation Perturbation::indicator(const Polygon& support, double amplitude)
{
    Perturbation v;
    v.support = support;
    v.amplitude = amplitude;
    v.omega_minus = support;
    v.omega_plus = support;
    v.c0_minus = amplitude;
    v.c0_plus = amplitude;
    return v;
}

double Perturbation::operator()(double x, double y) const
{
    return support.contains({x, y}) ? amplitude : 0.0;
}

void Perturbation::validate() const
{
    if (!(amplitude > 0.0)) throw InvalidConfig("perturbation amplitude must be positive");
    if (!(c0_minus > 0.0) || !(c0_plus > 0.0)) throw InvalidConfig("c0_minus and c0_plus must be positive");
    if (c0_minus > c0_plus) throw InvalidConfig("c0_minus must not exceed c0_plus");
    if (c0_minus > amplitude || amplitude > c0_plus)
        throw InvalidConfig("sandwich constants must bracket the amplitude");
    if (!support.is_simple() || !omega_minus.is_simple() || !omega_plus.is_simple())
        throw InvalidConfig("support polygons must be simple");
    // vertex containment sampling, with a small inward/outward tolerance
    auto inside_or_on = [](const Polygon& outer, Point p) {
        constexpr double h = 1e-9;
        if (outer.contains(p)) return true;
        for (double dx : {-h, h})
            for (double dy : {-h, h})
                if (outer.contains({p.x + dx, p.y + dy})) return true;
        return false;
    };
    for (const Point& p : omega_minus.vertices())
        if (!inside_or_on(support, p)) throw InvalidConfig("omega_minus is not contained in the support");
    for (const Point& p : support.vertices())
        if (!inside_or_on(omega_plus, p)) throw InvalidConfig("support is not contained in omega_plus");
    if (!(X_minus() < X_plus())) throw InvalidConfig("support has empty x-extent");
}

Perturbation Perturbation::translated(double dx) const
{
    Perturbation v = *this;
    v.support = support.translated(dx, 0.0);
    v.omega_minus = omega_minus.translated(dx, 0.0);
    v.omega_plus = omega_plus.translated(dx, 0.0);
    return v;
}

bool finiteness_predicate(const Perturbation& v, const EdgePotential& w) { return v.X_plus() < w.x_plus(); }

} // namespace edgegap
