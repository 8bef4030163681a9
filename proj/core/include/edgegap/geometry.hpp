#pragma once

#include <utility>
#include <vector>

namespace edgegap {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Simple polygon stored counterclockwise.
class Polygon {
public:
    Polygon() = default;
    explicit Polygon(std::vector<Point> vertices);

    const std::vector<Point>& vertices() const { return v_; }
    std::size_t size() const { return v_.size(); }
    double x_min() const { return xmin_; }
    double x_max() const { return xmax_; }
    double y_min() const { return ymin_; }
    double y_max() const { return ymax_; }
    double area() const;
    double diameter() const;
    Point centroid() const;

    bool contains(Point p) const;
    bool is_simple() const;

    // Maximal intervals [y0, y1] of the vertical line {x} inside the polygon, sorted.
    std::vector<std::pair<double, double>> vertical_chords(double x) const;

    // Abscissae of the vertices, sorted and deduplicated.
    std::vector<double> breakpoints_x() const;

    Polygon translated(double dx, double dy) const;
    Polygon scaled(double s) const;

private:
    std::vector<Point> v_;
    double xmin_ = 0, xmax_ = 0, ymin_ = 0, ymax_ = 0;
};

Polygon rectangle(double x0, double x1, double y0, double y1);
Polygon regular_polygon(double cx, double cy, double r, int n);

// Measure of {t > 0 : t ln t < s}.
double kappa(double s);

// Supremum of lengths of connected vertical segments inside the polygon.
double c_minus(const Polygon& omega);

Polygon clip_positive_halfplane(const Polygon& omega);

struct CPlusOptions {
    int grid = 41;
    int rounds = 3;
    double box_factor = 2.0;   // search box side, in units of the diameter
};

struct CPlusResult {
    double value = 0.0;
    double xi = 0.0;
    double eta = 0.0;
    double radius = 0.0;
};

// R kappa(xi_+ / (e R)) for the disk centered at (xi, eta) with the smallest enclosing radius.
double disk_functional(const Polygon& omega, double xi, double eta);

CPlusResult c_plus(const Polygon& omega, const CPlusOptions& opt = {});

struct AsymptoticConstants {
    double c_minus = 0.0;   // of the clipped lower domain
    double c_plus = 0.0;    // of the clipped upper domain
    double C_minus = 0.0;
    double C_plus = 0.0;
};

AsymptoticConstants asymptotic_constants(const Polygon& omega_minus, const Polygon& omega_plus,
                                         double b, const CPlusOptions& opt = {});

} // namespace edgegap
