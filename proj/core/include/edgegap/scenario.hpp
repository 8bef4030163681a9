#pragma once

#include "edgegap/bsham.hpp"
#include "edgegap/geometry.hpp"
#include "edgegap/potentials.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace edgegap {

struct Grid1D {
    double min = -10.0;
    double max = 10.0;
    int count = 401;
    std::vector<double> values() const;
};

// Verdict tolerances; the defaults are the documented acceptance targets.
struct Tolerances {
    double monotone_drop = 1e-9;
    double edge = 1e-3;
    double edge_k = 10.0;
    std::vector<double> tep2_k{4.0, 5.0, 6.0};
    double tep2_j1 = 0.05;
    double tep2_j2_k = 6.0;
    double tep2_j2 = 0.10;
    double teth1_near_k = 4.0;
    double teth1_far_k = 6.0;
    double teth1_bound = 0.2;
    double lau25_k = 5.0;
    double lau25 = 0.05;
    double closed_form = 1e-8;
    double kms_trace = 1e-10;
    double kms_l2 = 0.02;
    double kms_l3 = 0.03;
    double kms_count = 0.05;
    double kms_zero_branch = 0.01;
    long sandwich_slack = 3;
    long cross_route_slack = 2;
    long finiteness_variation = 1;
    double slope_lo = 0.35;
    double slope_hi = 0.65;
};

struct KmsSettings {
    double lo = 0.25;
    double hi = 0.75;
    std::vector<double> trace_m{10.0, 50.0, 100.0, 160.0};
    double power_m = 160.0;
    double count_m = 300.0;
    double s_low = 0.5;
    double s_high = 1.5;
};

struct CountSettings {
    double eps = 0.3;
    double A = 0.0;
    double r = 1.0;
    double delta = 0.05;
    double sandwich_A = 1.0;
    double sandwich_lambda = 1e-4;
    int j_sum = 0;
};

struct WeylKyFanSettings {
    int trials = 1000;
    int size = 20;
    unsigned seed = 20240611u;
};

struct Scenario {
    std::string name = "scenario";
    double b = 1.0;
    EdgePotential W = EdgePotential::step(0.0, 1.0, 0.0);
    Perturbation V;
    int fiber_N = 2001;
    double fiber_half_width = 0.0;   // 0: 12 / sqrt(b)
    bool richardson = true;
    Grid1D k_grid;
    int j = 1;
    int j_max = 3;
    std::vector<double> lambdas;
    std::vector<double> m_grid{100.0, 200.0, 300.0};
    int precision_bits = 512;
    std::string output_dir = "out";
    bool normalize = true;
    QuadratureSpec quad;
    CPlusOptions c_plus_search;
    CountSettings counting;
    KmsSettings kms;
    WeylKyFanSettings weylkyfan;
    Tolerances tol;
    nlohmann::json source;   // document as loaded

    FiberDiscretization fiber() const;
    Problem problem() const;
    // x^+ shifted to 0 (potential and all polygons); unchanged when x^+ is infinite.
    Scenario normalized() const;
    nlohmann::json to_json() const;
    std::string hash() const;
    void validate() const;
};

// Geometric lambda grid from max down to min with the given ratio.
std::vector<double> geometric_grid(double max, double min, double ratio);

Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
nlohmann::json scenario_schema();

} // namespace edgegap
