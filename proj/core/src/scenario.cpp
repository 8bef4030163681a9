#include <edgegap/errors.hpp>
#include <edgegap/scenario.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>

namespace edgegap {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Grid1D, min, max, count)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Tolerances, monotone_drop, edge, edge_k, tep2_k, tep2_j1, tep2_j2_k,
    tep2_j2, teth1_near_k, teth1_far_k, teth1_bound, lau25_k, lau25,
    closed_form, kms_trace, kms_l2, kms_l3, kms_count, kms_zero_branch,
    sandwich_slack, cross_route_slack, finiteness_variation,
    slope_lo, slope_hi)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(KmsSettings, lo, hi, trace_m, power_m, count_m, s_low, s_high)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CountSettings, eps, A, r, delta, sandwich_A, sandwich_lambda, j_sum)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CPlusOptions, grid, rounds, box_factor)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(WeylKyFanSettings, trials, size, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(QuadratureSpec, k_panel, k_order, x_panel, x_order, y_order_min,
    band_step, tail_tol, k_max_override)

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object()) throw InvalidConfig(where + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw InvalidConfig(where + ": unknown key '" + key + "'");
}

template <class T>
std::set<std::string> keys_of(const T& defaults)
{
    const json j = defaults;
    std::set<std::string> out;
    for (const auto& [key, _] : j.items()) out.insert(key);
    return out;
}

template <class T>
T section(const json& doc, const char* key)
{
    T value{};
    if (!doc.contains(key)) return value;
    check_keys(doc.at(key), keys_of(value), key);
    json merged = value;
    merged.update(doc.at(key));
    return merged.get<T>();
}

Polygon polygon_from(const json& v, const std::string& where)
{
    if (!v.is_array() || v.size() < 3) throw InvalidConfig(where + ": need at least three vertices");
    std::vector<Point> pts;
    for (const auto& p : v) {
        if (!p.is_array() || p.size() != 2) throw InvalidConfig(where + ": vertices are [x, y] pairs");
        pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    Polygon poly(std::move(pts));
    if (!poly.is_simple()) throw InvalidConfig(where + ": polygon is not simple");
    if (!(poly.area() > 0.0)) throw InvalidConfig(where + ": polygon has zero area");
    return poly;
}

json polygon_json(const Polygon& p)
{
    json v = json::array();
    for (const Point& q : p.vertices()) v.push_back({q.x, q.y});
    return v;
}

EdgePotential potential_from(const json& w)
{
    const std::string type = w.at("type").get<std::string>();
    if (type == "step") {
        check_keys(w, {"type", "w_minus", "w_plus", "x0"}, "edge_potential");
        return EdgePotential::step(w.value("w_minus", 0.0), w.value("w_plus", 1.0), w.value("x0", 0.0));
    }
    if (type == "two_step_upper") {
        check_keys(w, {"type", "w_low", "w_plus", "x0", "delta"}, "edge_potential");
        return EdgePotential::two_step_upper(w.value("w_low", 0.0), w.value("w_plus", 1.0), w.value("x0", 0.0),
                                             w.at("delta").get<double>());
    }
    if (type == "piecewise_constant") {
        check_keys(w, {"type", "breaks", "values"}, "edge_potential");
        return EdgePotential::piecewise_constant(w.at("breaks").get<std::vector<double>>(),
                                                 w.at("values").get<std::vector<double>>());
    }
    if (type == "smooth_monotone") {
        check_keys(w, {"type", "w_minus", "w_plus", "x0", "width"}, "edge_potential");
        return EdgePotential::smooth_monotone(w.value("w_minus", 0.0), w.value("w_plus", 1.0), w.value("x0", 0.0),
                                              w.value("width", 1.0));
    }
    throw InvalidConfig("edge_potential: unknown type '" + type + "'");
}

json potential_json(const EdgePotential& w)
{
    switch (w.kind()) {
    case PotentialKind::step:
        return {{"type", "step"}, {"w_minus", w.w_minus()}, {"w_plus", w.w_plus()}, {"x0", w.step_location()}};
    case PotentialKind::two_step_upper:
        return {{"type", "two_step_upper"},
                {"w_low", w.w_minus()},
                {"w_plus", w.w_plus()},
                {"x0", w.step_location() + w.delta()},
                {"delta", w.delta()}};
    case PotentialKind::piecewise_constant:
        return {{"type", "piecewise_constant"}, {"breaks", w.breaks()}, {"values", w.values()}};
    case PotentialKind::smooth_monotone:
        return {{"type", "smooth_monotone"},
                {"w_minus", w.w_minus()},
                {"w_plus", w.w_plus()},
                {"x0", w.step_location()},
                {"width", w.width()}};
    }
    return {};
}

Perturbation perturbation_from(const json& v)
{
    check_keys(v, {"type", "vertices", "amplitude", "c0_minus", "c0_plus", "omega_minus", "omega_plus"},
               "perturbation");
    const std::string type = v.value("type", std::string("polygon_indicator"));
    if (type != "polygon_indicator") throw InvalidConfig("perturbation: unknown type '" + type + "'");
    Perturbation p = Perturbation::indicator(polygon_from(v.at("vertices"), "perturbation.vertices"),
                                             v.value("amplitude", 1.0));
    p.c0_minus = v.value("c0_minus", p.amplitude);
    p.c0_plus = v.value("c0_plus", p.amplitude);
    if (v.contains("omega_minus")) p.omega_minus = polygon_from(v.at("omega_minus"), "perturbation.omega_minus");
    if (v.contains("omega_plus")) p.omega_plus = polygon_from(v.at("omega_plus"), "perturbation.omega_plus");
    p.validate();
    return p;
}

} // namespace

std::vector<double> Grid1D::values() const
{
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            count == 1 ? min : min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
}

std::vector<double> geometric_grid(double max, double min, double ratio)
{
    if (!(max > 0.0) || !(min > 0.0) || !(ratio > 1.0) || min > max)
        throw InvalidConfig("lambda grid: need 0 < min <= max and ratio > 1");
    std::vector<double> out;
    const int n = static_cast<int>(std::floor(std::log(max / min) / std::log(ratio) + 1e-9));
    for (int i = 0; i <= n; ++i) out.push_back(max * std::pow(ratio, -static_cast<double>(i)));
    return out;
}

FiberDiscretization Scenario::fiber() const
{
    FiberDiscretization d = FiberDiscretization::standard(b, W, fiber_N);
    if (fiber_half_width > 0.0) d.half_width = fiber_half_width;
    d.richardson = richardson;
    return d;
}

Problem Scenario::problem() const
{
    Problem p;
    p.fiber = fiber();
    p.V = V;
    p.quad = quad;
    p.counting.precision_cap = precision_bits;
    return p;
}

Scenario Scenario::normalized() const
{
    Scenario s = *this;
    const double xp = W.x_plus();
    if (!std::isfinite(xp) || xp == 0.0) return s;
    s.W = W.translated(-xp);
    s.V = V.translated(-xp);
    s.source["normalization"] = {{"shift", -xp}};
    return s;
}

void Scenario::validate() const
{
    if (!(b > 0.0) || !std::isfinite(b)) throw InvalidConfig("b must be positive");
    if (W.w_plus() == W.w_minus()) throw ConstantPotential("edge potential is constant");
    if (!gap_condition(W, b)) throw NoGap("gap condition W_+ - W_- < 2b fails");
    V.validate();
    fiber().validate();
    if (k_grid.count < 2 || !(k_grid.min < k_grid.max)) throw InvalidConfig("k_grid: need count >= 2 and min < max");
    if (j < 1 || j_max < j) throw InvalidConfig("need 1 <= j <= j_max");
    if (j_max > fiber_N / 10) throw InvalidConfig("j_max too large for the fiber grid");
    if (lambdas.empty()) throw InvalidConfig("lambda grid is empty");
    for (double l : lambdas)
        if (!(l > 0.0) || !(l < 1.0)) throw InvalidConfig("lambda values must lie in (0, 1)");
    for (double m : m_grid)
        if (!(m > 0.0)) throw InvalidConfig("m values must be positive");
    if (precision_bits < 53 || precision_bits > 4096) throw InvalidConfig("precision_bits must lie in [53, 4096]");
    if (!(counting.eps > 0.0 && counting.eps < 1.0)) throw InvalidConfig("counting.eps must lie in (0, 1)");
    if (!(counting.r > 0.0)) throw InvalidConfig("counting.r must be positive");
    if (!(counting.delta > 0.0 && counting.delta < 0.5)) throw InvalidConfig("counting.delta must lie in (0, 1/2)");
    if (!(kms.lo < kms.hi) || kms.lo < 0.0) throw InvalidConfig("kms: need 0 <= lo < hi");
    if (quad.k_order < 1 || quad.x_order < 1 || !(quad.k_panel > 0.0) || !(quad.x_panel > 0.0) ||
        !(quad.band_step > 0.0))
        throw InvalidConfig("quadrature: orders and panel sizes must be positive");
    if (c_plus_search.grid < 3 || c_plus_search.rounds < 1 || !(c_plus_search.box_factor > 0.0))
        throw InvalidConfig("c_plus_search: need grid >= 3, rounds >= 1, box_factor > 0");
    if (weylkyfan.trials < 1 || weylkyfan.size < 2) throw InvalidConfig("weylkyfan: need trials >= 1, size >= 2");
}

nlohmann::json Scenario::to_json() const
{
    json out;
    out["name"] = name;
    out["b"] = b;
    out["edge_potential"] = potential_json(W);
    out["perturbation"] = {{"type", "polygon_indicator"},
                           {"vertices", polygon_json(V.support)},
                           {"amplitude", V.amplitude},
                           {"c0_minus", V.c0_minus},
                           {"c0_plus", V.c0_plus},
                           {"omega_minus", polygon_json(V.omega_minus)},
                           {"omega_plus", polygon_json(V.omega_plus)}};
    out["fiber"] = {{"N", fiber_N}, {"half_width", fiber().half_width}, {"richardson", richardson}};
    out["k_grid"] = k_grid;
    out["j"] = j;
    out["j_max"] = j_max;
    out["lambda_grid"] = {{"values", lambdas}};
    out["m_grid"] = m_grid;
    out["precision_bits"] = precision_bits;
    out["output_dir"] = output_dir;
    out["normalize"] = normalize;
    out["quadrature"] = quad;
    out["c_plus_search"] = c_plus_search;
    out["counting"] = counting;
    out["kms"] = kms;
    out["weylkyfan"] = weylkyfan;
    out["tolerances"] = tol;
    if (source.contains("normalization")) out["normalization"] = source["normalization"];
    return out;
}

std::string Scenario::hash() const
{
    const std::size_t h = std::hash<std::string>{}(to_json().dump());
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016zx", h);
    return buf;
}

Scenario scenario_from_json(const nlohmann::json& doc)
{
    check_keys(doc,
               {"name", "b", "edge_potential", "perturbation", "fiber", "k_grid", "j", "j_max", "lambda_grid", "m_grid",
                "precision_bits", "output_dir", "normalize", "quadrature", "c_plus_search", "counting", "kms", "weylkyfan",
                "tolerances", "normalization", "$schema"},
               "config");
    Scenario s;
    try {
        s.source = doc;
        s.name = doc.value("name", s.name);
        s.b = doc.value("b", 1.0);
        if (!doc.contains("edge_potential")) throw InvalidConfig("config: edge_potential is required");
        if (!doc.contains("perturbation")) throw InvalidConfig("config: perturbation is required");
        s.W = potential_from(doc.at("edge_potential"));
        s.V = perturbation_from(doc.at("perturbation"));
        if (doc.contains("fiber")) {
            const json& f = doc.at("fiber");
            check_keys(f, {"N", "half_width", "richardson"}, "fiber");
            s.fiber_N = f.value("N", s.fiber_N);
            s.fiber_half_width = f.value("half_width", 0.0);
            s.richardson = f.value("richardson", true);
        }
        s.k_grid = section<Grid1D>(doc, "k_grid");
        s.j = doc.value("j", 1);
        s.j_max = doc.value("j_max", std::max(3, s.j));
        if (doc.contains("lambda_grid")) {
            const json& g = doc.at("lambda_grid");
            check_keys(g, {"values", "max", "min", "ratio"}, "lambda_grid");
            if (g.contains("values"))
                s.lambdas = g.at("values").get<std::vector<double>>();
            else
                s.lambdas = geometric_grid(g.value("max", 1e-2), g.value("min", 1e-8), g.value("ratio", 10.0));
        } else {
            s.lambdas = geometric_grid(1e-2, 1e-8, 10.0);
        }
        s.m_grid = doc.value("m_grid", s.m_grid);
        s.precision_bits = doc.value("precision_bits", s.precision_bits);
        s.output_dir = doc.value("output_dir", s.output_dir);
        s.normalize = doc.value("normalize", s.normalize);
        s.quad = section<QuadratureSpec>(doc, "quadrature");
        s.c_plus_search = section<CPlusOptions>(doc, "c_plus_search");
        s.counting = section<CountSettings>(doc, "counting");
        s.kms = section<KmsSettings>(doc, "kms");
        s.weylkyfan = section<WeylKyFanSettings>(doc, "weylkyfan");
        s.tol = section<Tolerances>(doc, "tolerances");
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("config: ") + e.what());
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("config parse error: ") + e.what());
    }
    return scenario_from_json(doc);
}

nlohmann::json scenario_schema()
{
    const json num = {{"type", "number"}};
    const json numarr = {{"type", "array"}, {"items", num}};
    const json polygon = {{"type", "array"},
                          {"minItems", 3},
                          {"items", {{"type", "array"}, {"items", num}, {"minItems", 2}, {"maxItems", 2}}}};
    auto object_of = [](const json& defaults) {
        json props = json::object();
        for (const auto& [key, value] : defaults.items()) {
            json p;
            if (value.is_array())
                p = {{"type", "array"}, {"items", {{"type", "number"}}}};
            else if (value.is_number_integer() || value.is_number_unsigned())
                p = {{"type", "integer"}};
            else
                p = {{"type", "number"}};
            p["default"] = value;
            props[key] = p;
        }
        return json{{"type", "object"}, {"additionalProperties", false}, {"properties", props}};
    };

    json potential = {
        {"type", "object"},
        {"required", {"type"}},
        {"properties",
         {{"type", {{"enum", {"step", "two_step_upper", "piecewise_constant", "smooth_monotone"}}}},
          {"w_minus", num},
          {"w_plus", num},
          {"w_low", num},
          {"x0", num},
          {"delta", num},
          {"width", num},
          {"breaks", numarr},
          {"values", numarr}}}};
    json perturbation = {{"type", "object"},
                         {"required", {"vertices"}},
                         {"additionalProperties", false},
                         {"properties",
                          {{"type", {{"const", "polygon_indicator"}}},
                           {"vertices", polygon},
                           {"amplitude", num},
                           {"c0_minus", num},
                           {"c0_plus", num},
                           {"omega_minus", polygon},
                           {"omega_plus", polygon}}}};
    json fiber = {{"type", "object"},
                  {"additionalProperties", false},
                  {"properties",
                   {{"N", {{"type", "integer"}, {"minimum", 200}, {"default", 2001}}},
                    {"half_width", {{"type", "number"}, {"description", "0 or absent: 12/sqrt(b)"}}},
                    {"richardson", {{"type", "boolean"}, {"default", true}}}}}};
    json lambda_grid = {{"type", "object"},
                        {"additionalProperties", false},
                        {"properties",
                         {{"values", numarr},
                          {"max", {{"type", "number"}, {"default", 1e-2}}},
                          {"min", {{"type", "number"}, {"default", 1e-8}}},
                          {"ratio", {{"type", "number"}, {"default", 10.0}}}}}};

    return {{"$schema", "http://json-schema.org/draft-07/schema#"},
            {"title", "edgegap scenario"},
            {"type", "object"},
            {"required", {"edge_potential", "perturbation"}},
            {"additionalProperties", false},
            {"properties",
             {{"$schema", {{"type", "string"}}},
              {"name", {{"type", "string"}}},
              {"b", {{"type", "number"}, {"exclusiveMinimum", 0}, {"default", 1.0}}},
              {"edge_potential", potential},
              {"perturbation", perturbation},
              {"fiber", fiber},
              {"k_grid", object_of(json(Grid1D{}))},
              {"j", {{"type", "integer"}, {"minimum", 1}, {"default", 1}}},
              {"j_max", {{"type", "integer"}, {"minimum", 1}, {"default", 3}}},
              {"lambda_grid", lambda_grid},
              {"m_grid", numarr},
              {"precision_bits", {{"type", "integer"}, {"minimum", 53}, {"maximum", 4096}, {"default", 512}}},
              {"output_dir", {{"type", "string"}, {"default", "out"}}},
              {"normalize", {{"type", "boolean"}, {"default", true}}},
              {"quadrature", object_of(json(QuadratureSpec{}))},
              {"c_plus_search", object_of(json(CPlusOptions{}))},
              {"counting", object_of(json(CountSettings{}))},
              {"kms", object_of(json(KmsSettings{}))},
              {"weylkyfan", object_of(json(WeylKyFanSettings{}))},
              {"tolerances", object_of(json(Tolerances{}))},
              {"normalization", {{"type", "object"}}}}}};
}

} // namespace edgegap
