#pragma once

#include "edgegap/hp.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace edgegap {

enum class CountRoute { double_eig, hp_inertia };
std::string to_string(CountRoute r);

struct CountingReport {
    double threshold = 0.0;
    long count = 0;
    CountRoute route = CountRoute::double_eig;
    int precision_bits = 53;
    // smallest |eigenvalue - threshold| (double route) or smallest pivot magnitude (inertia route)
    double margin = 0.0;
    bool tie = false;
    long count_low = 0;    // diagnostics when a tie fires
    long count_high = 0;
    std::vector<std::string> warnings;
};

struct CountingOptions {
    int precision_cap = 512;
    double tie_rel = 1e-8;
    // Skip the double eigen route (always factor in high precision).
    bool force_inertia = false;
};

struct Inertia {
    long positive = 0;
    long negative = 0;
    long zero = 0;
    bool certified = true;   // every pivot clears the 2^20 guard above working accuracy
    double min_pivot = 0.0;
};

// Bunch-Kaufman LDL^T inertia of a real symmetric matrix (row-major, lower triangle used).
// `bits` is the working mantissa length used by the certification test.
Inertia ldlt_inertia(std::vector<double> a, int n, int bits = 53);
Inertia ldlt_inertia(std::vector<HpReal> a, int n, int bits);

// Log-magnitude + phase form of a Hermitian matrix: M_ij = exp(logmag_ij + i phase_ij).
struct LogMatrix {
    Eigen::MatrixXd logmag;
    Eigen::MatrixXd phase;
    int rows() const { return static_cast<int>(logmag.rows()); }
    static LogMatrix from(const Eigen::MatrixXcd& m);
    Eigen::MatrixXcd to_complex() const;
    double max_logmag() const;
};

// Producer of a high-precision Hermitian matrix at the requested working precision.
using HpAssembler = std::function<HpHermitian(int bits)>;

// n_+(s; M): eigenvalues strictly above s.
CountingReport count_above(const Eigen::MatrixXd& m, double s, const CountingOptions& opt = {});
CountingReport count_above(const Eigen::MatrixXcd& m, double s, const CountingOptions& opt = {});
CountingReport count_above(const LogMatrix& m, double s, const CountingOptions& opt = {});
CountingReport count_above(const HpAssembler& assemble, double s, const CountingOptions& opt = {});

// n_-(s; M) = n_+(s; -M).
CountingReport count_below(const Eigen::MatrixXd& m, double s, const CountingOptions& opt = {});
CountingReport count_below(const Eigen::MatrixXcd& m, double s, const CountingOptions& opt = {});

// n_*(s; T) = n_+(s^2; T^* T).
CountingReport n_star(const Eigen::MatrixXd& t, double s, const CountingOptions& opt = {});
CountingReport n_star(const Eigen::MatrixXcd& t, double s, const CountingOptions& opt = {});

// Precision ladder up to the cap: 53, 128, 256, 512.
std::vector<int> precision_ladder(int cap);

} // namespace edgegap
