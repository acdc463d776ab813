#include "extcal/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

namespace extcal {

ordered_json poly_to_json(const PolyField& p) {
    ordered_json j;
    j["nvars"] = p.nvars();
    ordered_json terms = ordered_json::array();
    for (const auto& [e, c] : p.terms()) {
        ordered_json t;
        t["exps"] = e;
        t["num"] = c.num();
        t["den"] = c.den();
        terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    return j;
}

PolyField poly_from_json(const json& j) {
    if (!j.is_object() || !j.contains("nvars") || !j.contains("terms"))
        throw SchemaError("polynomial: expected {nvars, terms}");
    int nvars = j.at("nvars").get<int>();
    if (nvars < 0 || nvars > 16) throw SchemaError("polynomial: nvars out of range");
    PolyField p(nvars);
    for (const auto& t : j.at("terms")) {
        if (!t.contains("exps") || !t.contains("num"))
            throw SchemaError("polynomial term: expected {exps, num[, den]}");
        std::vector<int> e = t.at("exps").get<std::vector<int>>();
        if (static_cast<int>(e.size()) != nvars)
            throw SchemaError("polynomial term: exponent arity != nvars");
        for (int x : e)
            if (x < 0 || x > 64) throw SchemaError("polynomial term: exponent out of range");
        long long num = t.at("num").get<long long>();
        long long den = t.contains("den") ? t.at("den").get<long long>() : 1;
        if (den == 0) throw SchemaError("polynomial term: zero denominator");
        p.add_term(e, Rational(num, den));
    }
    return p;
}

ordered_json form_to_json(const FieldForm& f) {
    ordered_json j;
    j["dim"] = f.dim();
    j["grade"] = f.grade();
    ordered_json terms = ordered_json::array();
    for (const auto& [mi, c] : f.terms()) {
        if (!c.is_poly())
            throw std::logic_error("form_to_json: numeric coefficients are not serializable");
        ordered_json t;
        t["indices"] = mi.idx;
        t["coeff"] = poly_to_json(c.poly());
        terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    return j;
}

FieldForm form_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("grade") || !j.contains("terms"))
        throw SchemaError("form: expected {dim, grade, terms}");
    int dim = j.at("dim").get<int>();
    int grade = j.at("grade").get<int>();
    if (dim < 0 || dim > 9 || grade < 0 || grade > dim)
        throw SchemaError("form: dim/grade out of range");
    FieldForm f(dim, grade);
    for (const auto& t : j.at("terms")) {
        if (!t.contains("indices") || !t.contains("coeff"))
            throw SchemaError("form term: expected {indices, coeff}");
        std::vector<int> idx = t.at("indices").get<std::vector<int>>();
        PolyField c = poly_from_json(t.at("coeff"));
        if (c.nvars() != dim) throw SchemaError("form term: coefficient arity != dim");
        try {
            f.add_term(std::move(idx), ScalarField(std::move(c)));
        } catch (const std::invalid_argument& e) {
            throw SchemaError(std::string("form term: ") + e.what());
        }
    }
    return f;
}

ordered_json map_to_json(const SmoothMap& m) {
    ordered_json j;
    j["domain_dim"] = m.domain_dim();
    ordered_json comps = ordered_json::array();
    for (int i = 0; i < m.codomain_dim(); ++i) {
        if (!m.component(i).is_poly())
            throw std::logic_error("map_to_json: numeric components are not serializable");
        comps.push_back(poly_to_json(m.component(i).poly()));
    }
    j["components"] = std::move(comps);
    return j;
}

SmoothMap map_from_json(const json& j) {
    if (!j.is_object() || !j.contains("domain_dim") || !j.contains("components"))
        throw SchemaError("map: expected {domain_dim, components}");
    int dom = j.at("domain_dim").get<int>();
    if (dom < 0 || dom > 9) throw SchemaError("map: domain_dim out of range");
    std::vector<ScalarField> comps;
    for (const auto& c : j.at("components")) {
        PolyField p = poly_from_json(c);
        if (p.nvars() != dom) throw SchemaError("map: component arity != domain_dim");
        comps.emplace_back(std::move(p));
    }
    if (comps.empty()) throw SchemaError("map: no components");
    return SmoothMap(dom, std::move(comps));
}

ordered_json chain_to_json(const Chain& c) {
    ordered_json j;
    j["r"] = c.r;
    j["target_dim"] = c.target_dim;
    ordered_json terms = ordered_json::array();
    for (const auto& [w, cube] : c.terms) {
        ordered_json t;
        t["weight"] = w;
        t["map"] = map_to_json(cube.map);
        terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    return j;
}

Chain chain_from_json(const json& j) {
    if (!j.is_object() || !j.contains("r") || !j.contains("target_dim") || !j.contains("terms"))
        throw SchemaError("chain: expected {r, target_dim, terms}");
    int r = j.at("r").get<int>();
    int dim = j.at("target_dim").get<int>();
    if (r < 0 || r > 6 || dim < 0 || dim > 9) throw SchemaError("chain: r/target_dim out of range");
    Chain c(r, dim);
    for (const auto& t : j.at("terms")) {
        if (!t.contains("weight") || !t.contains("map"))
            throw SchemaError("chain term: expected {weight, map}");
        SmoothMap m = map_from_json(t.at("map"));
        if (m.domain_dim() != r) throw SchemaError("chain term: map domain != r");
        if (m.codomain_dim() != dim) throw SchemaError("chain term: map codomain != target_dim");
        c.add(t.at("weight").get<int>(), SingularCube(r, std::move(m)));
    }
    return c;
}

ordered_json report_to_json(const VerificationReport& rep) {
    ordered_json j;
    j["title"] = rep.title;
    j["seed"] = rep.seed;
    j["overall_pass"] = rep.overall_pass();
    ordered_json checks = ordered_json::array();
    for (const auto& c : rep.checks) {
        ordered_json cj;
        cj["name"] = c.name;
        cj["identity"] = c.identity;
        cj["residual"] = format_double(c.residual);
        cj["tolerance"] = format_double(c.tolerance);
        cj["pass"] = c.pass;
        checks.push_back(std::move(cj));
    }
    j["checks"] = std::move(checks);
    return j;
}

void atomic_write(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (!target.parent_path().empty()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        out << text;
        if (!out) throw std::runtime_error("atomic_write: short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace extcal
