#pragma once

#include "edgegap/geometry.hpp"

#include <limits>
#include <string>
#include <vector>

namespace edgegap {

enum class PotentialKind { step, two_step_upper, piecewise_constant, smooth_monotone };

std::string to_string(PotentialKind kind);

struct PotentialLimits {
    double w_minus = 0.0;
    double w_plus = 0.0;
    double x_plus = 0.0;   // +infinity when the supremum is never attained
};

// Bounded non-decreasing edge profile W(x).
class EdgePotential {
public:
    // w_minus for x < x0, w_plus for x >= x0.
    static EdgePotential step(double w_minus, double w_plus, double x0);
    // Upper envelope: w_plus for x >= x0 - delta, w_low otherwise.
    static EdgePotential two_step_upper(double w_low, double w_plus, double x0, double delta);
    // values[i] on [breaks[i-1], breaks[i]); values.size() == breaks.size() + 1.
    static EdgePotential piecewise_constant(std::vector<double> breaks, std::vector<double> values);
    // w_minus + (w_plus - w_minus) (1 + tanh((x - x0) / width)) / 2.
    static EdgePotential smooth_monotone(double w_minus, double w_plus, double x0, double width);

    PotentialKind kind() const { return kind_; }
    double operator()(double x) const;
    // Mean value over [a, b], exact for the piecewise-constant kinds.
    double average(double a, double b) const;

    PotentialLimits limits() const;
    double w_minus() const { return values_.front(); }
    double w_plus() const { return values_.back(); }
    double x_plus() const;
    bool is_step() const { return kind_ == PotentialKind::step; }

    // Step data for step-like kinds: (w_-, w_+, x_0).
    double step_location() const;
    const std::vector<double>& breaks() const { return breaks_; }
    const std::vector<double>& values() const { return values_; }
    double width() const { return width_; }
    double delta() const { return delta_; }

    EdgePotential translated(double dx) const;

private:
    PotentialKind kind_ = PotentialKind::step;
    std::vector<double> breaks_;
    std::vector<double> values_;
    double width_ = 1.0;
    double x0_ = 0.0;
    double delta_ = 0.0;
};

PotentialLimits potential_limits(const EdgePotential& w);
bool gap_condition(const EdgePotential& w, double b);

// Envelopes used by the model operators: W0^- <= W <= W0^+(delta).
EdgePotential lower_envelope(const EdgePotential& w);
EdgePotential upper_envelope(const EdgePotential& w, double delta);

enum class AmplitudeProfile { indicator, scaled_indicator };

// V = amplitude * indicator(support), with sandwich data c0^- chi(omega^-) <= V <= c0^+ chi(omega^+).
struct Perturbation {
    Polygon support;
    double amplitude = 1.0;
    AmplitudeProfile profile = AmplitudeProfile::indicator;
    Polygon omega_minus;
    Polygon omega_plus;
    double c0_minus = 1.0;
    double c0_plus = 1.0;

    static Perturbation indicator(const Polygon& support, double amplitude = 1.0);

    double operator()(double x, double y) const;
    double X_minus() const { return support.x_min(); }
    double X_plus() const { return support.x_max(); }
    double sup_norm() const { return amplitude; }

    // Throws InvalidConfig if the sandwich invariants fail.
    void validate() const;
    Perturbation translated(double dx) const;
};

bool finiteness_predicate(const Perturbation& v, const EdgePotential& w);

} // namespace edgegap
