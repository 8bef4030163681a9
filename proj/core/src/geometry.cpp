#include "edgegap/geometry.hpp"

#include "edgegap/errors.hpp"

#include <boost/math/special_functions/lambert_w.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace edgegap {

namespace {

double signed_area(const std::vector<Point>& v)
{
    double a = 0.0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

double cross(Point o, Point a, Point b)
{
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Point p, Point q, Point r)
{
    return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
           std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
}

bool segments_intersect(Point p1, Point p2, Point p3, Point p4)
{
    const double d1 = cross(p3, p4, p1);
    const double d2 = cross(p3, p4, p2);
    const double d3 = cross(p1, p2, p3);
    const double d4 = cross(p1, p2, p4);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(p3, p1, p4)) return true;
    if (d2 == 0 && on_segment(p3, p2, p4)) return true;
    if (d3 == 0 && on_segment(p1, p3, p2)) return true;
    if (d4 == 0 && on_segment(p1, p4, p2)) return true;
    return false;
}

} // namespace

Polygon::Polygon(std::vector<Point> vertices) : v_(std::move(vertices))
{
    if (v_.size() < 3) throw DomainError("polygon needs at least three vertices");
    if (signed_area(v_) < 0) std::reverse(v_.begin(), v_.end());
    xmin_ = ymin_ = std::numeric_limits<double>::infinity();
    xmax_ = ymax_ = -std::numeric_limits<double>::infinity();
    for (const Point& p : v_) {
        xmin_ = std::min(xmin_, p.x);
        xmax_ = std::max(xmax_, p.x);
        ymin_ = std::min(ymin_, p.y);
        ymax_ = std::max(ymax_, p.y);
    }
}

double Polygon::area() const { return signed_area(v_); }

double Polygon::diameter() const
{
    double d2 = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i)
        for (std::size_t j = i + 1; j < v_.size(); ++j) {
            const double dx = v_[i].x - v_[j].x, dy = v_[i].y - v_[j].y;
            d2 = std::max(d2, dx * dx + dy * dy);
        }
    return std::sqrt(d2);
}

Point Polygon::centroid() const
{
    double cx = 0.0, cy = 0.0;
    const std::size_t n = v_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = v_[i];
        const Point& q = v_[(i + 1) % n];
        const double c = p.x * q.y - q.x * p.y;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    const double a6 = 6.0 * area();
    return {cx / a6, cy / a6};
}

bool Polygon::contains(Point p) const
{
    bool inside = false;
    const std::size_t n = v_.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = v_[i];
        const Point& b = v_[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xc) inside = !inside;
        }
    }
    return inside;
}

bool Polygon::is_simple() const
{
    const std::size_t n = v_.size();
    if (std::abs(area()) <= 0.0) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(v_[i], v_[(i + 1) % n], v_[j], v_[(j + 1) % n])) return false;
        }
    }
    return true;
}

std::vector<std::pair<double, double>> Polygon::vertical_chords(double x) const
{
    std::vector<double> ys;
    const std::size_t n = v_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = v_[i];
        const Point& q = v_[(i + 1) % n];
        if ((p.x <= x) != (q.x <= x)) ys.push_back(p.y + (x - p.x) * (q.y - p.y) / (q.x - p.x));
    }
    std::sort(ys.begin(), ys.end());
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < ys.size(); i += 2) out.emplace_back(ys[i], ys[i + 1]);
    return out;
}

std::vector<double> Polygon::breakpoints_x() const
{
    std::vector<double> xs;
    for (const Point& p : v_) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

Polygon Polygon::translated(double dx, double dy) const
{
    std::vector<Point> w = v_;
    for (Point& p : w) {
        p.x += dx;
        p.y += dy;
    }
    return Polygon(std::move(w));
}

Polygon Polygon::scaled(double s) const
{
    std::vector<Point> w = v_;
    for (Point& p : w) {
        p.x *= s;
        p.y *= s;
    }
    return Polygon(std::move(w));
}

Polygon rectangle(double x0, double x1, double y0, double y1)
{
    return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

Polygon regular_polygon(double cx, double cy, double r, int n)
{
    std::vector<Point> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        v[static_cast<std::size_t>(i)] = {cx + r * std::cos(t), cy + r * std::sin(t)};
    }
    return Polygon(std::move(v));
}

double kappa(double s)
{
    if (!(s >= 0.0)) throw DomainError("kappa: argument must be nonnegative");
    if (s == 0.0) return 1.0;
    // t ln t = s  <=>  ln t = W0(s)
    return std::exp(boost::math::lambert_w0(s));
}

namespace {

double longest_chord(const Polygon& omega, double x)
{
    double best = 0.0;
    for (const auto& [a, b] : omega.vertical_chords(x)) best = std::max(best, b - a);
    return best;
}

} // namespace

double c_minus(const Polygon& omega)
{
    // Chord lengths are piecewise linear between vertex abscissae, so the supremum is
    // approached at a breakpoint from one side; a refined grid guards the rest.
    constexpr double eps = 1e-9;
    double best = 0.0;
    const std::vector<double> xs = omega.breakpoints_x();
    for (double x : xs) {
        best = std::max(best, longest_chord(omega, x - eps));
        best = std::max(best, longest_chord(omega, x + eps));
    }
    constexpr int refine = 64;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double a = xs[i], b = xs[i + 1];
        for (int q = 1; q < refine; ++q) best = std::max(best, longest_chord(omega, a + (b - a) * q / refine));
    }
    return best;
}

Polygon clip_positive_halfplane(const Polygon& omega)
{
    // Sutherland-Hodgman against x > 0.
    const auto& v = omega.vertices();
    std::vector<Point> out;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % n];
        const bool pin = p.x > 0.0;
        const bool qin = q.x > 0.0;
        if (pin) out.push_back(p);
        if (pin != qin) {
            const double t = p.x / (p.x - q.x);
            out.push_back({0.0, p.y + t * (q.y - p.y)});
        }
    }
    if (out.size() < 3 || signed_area(out) <= 0.0)
        throw EmptyIntersection("domain does not meet the half-plane Re z > 0");
    return Polygon(std::move(out));
}

double disk_functional(const Polygon& omega, double xi, double eta)
{
    double r2 = 0.0;
    for (const Point& p : omega.vertices()) {
        const double dx = p.x - xi, dy = p.y - eta;
        r2 = std::max(r2, dx * dx + dy * dy);
    }
    const double r = std::sqrt(r2);
    return r * kappa(std::max(xi, 0.0) / (std::numbers::e * r));
}

CPlusResult c_plus(const Polygon& omega, const CPlusOptions& opt)
{
    const int g = std::max(opt.grid, 3);
    const Point c = omega.centroid();
    double half = 0.5 * opt.box_factor * omega.diameter();
    double cx = c.x, cy = c.y;
    CPlusResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (int round = 0; round <= opt.rounds; ++round) {
        const double step = 2.0 * half / (g - 1);
        CPlusResult local = best;
        // Row-major scan with strict improvement keeps the lexicographically first argmin.
        for (int i = 0; i < g; ++i) {
            const double xi = cx - half + i * step;
            for (int j = 0; j < g; ++j) {
                const double eta = cy - half + j * step;
                const double f = disk_functional(omega, xi, eta);
                if (f < local.value) local = {f, xi, eta, 0.0};
            }
        }
        best = local;
        cx = best.xi;
        cy = best.eta;
        half = 2.0 * step;
    }
    double r2 = 0.0;
    for (const Point& p : omega.vertices()) {
        const double dx = p.x - best.xi, dy = p.y - best.eta;
        r2 = std::max(r2, dx * dx + dy * dy);
    }
    best.radius = std::sqrt(r2);
    return best;
}

AsymptoticConstants asymptotic_constants(const Polygon& omega_minus, const Polygon& omega_plus,
                                         double b, const CPlusOptions& opt)
{
    const Polygon lo = clip_positive_halfplane(omega_minus);
    const Polygon hi = clip_positive_halfplane(omega_plus);
    AsymptoticConstants out;
    out.c_minus = c_minus(lo);
    out.c_plus = c_plus(hi, opt).value;
    out.C_minus = std::sqrt(b) * out.c_minus / (2.0 * std::numbers::pi);
    out.C_plus = std::numbers::e * std::sqrt(b) * out.c_plus;
    return out;
}

} // namespace edgegap
