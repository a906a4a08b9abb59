#include "msparisi/io.hpp"

#include <fstream>
#include <sstream>

namespace msparisi {

namespace {

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

std::vector<std::pair<double, double>> atom_list(const Json& j) {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& a : j) {
        if (!a.is_array() || a.size() != 2) throw ConfigError("atoms must be [value, weight] pairs");
        atoms.emplace_back(a[0].get<double>(), a[1].get<double>());
    }
    return atoms;
}

Json atom_json(const std::vector<std::pair<double, double>>& atoms) {
    Json arr = Json::array();
    for (const auto& [v, w] : atoms) arr.push_back({v, w});
    return arr;
}

}  // namespace

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

ModelParams model_from_json(const Json& j) {
    return guarded("model", [&] {
        ModelParams p;
        p.zeta = j.at("zeta").get<std::vector<double>>();
        p.gamma = j.at("gamma").get<std::vector<double>>();
        if (j.contains("field")) {
            const auto atoms = atom_list(j.at("field").at("atoms"));
            if (atoms.empty()) throw ConfigError("field law needs at least one atom");
            p.field.atoms = atoms;
        }
        if (j.contains("r") && j.at("r").get<int>() != p.r())
            throw ConfigError("model: r does not match the length of gamma");
        const auto report = validate_model(p);
        if (!report.ok()) {
            std::string msg = "model invalid:";
            for (const auto& v : report.violations) msg += " " + v + ";";
            throw ConfigError(msg);
        }
        return p;
    });
}

Json to_json(const ModelParams& params) {
    return Json{{"r", params.r()},
                {"zeta", params.zeta},
                {"gamma", params.gamma},
                {"field", {{"atoms", atom_json(params.field.atoms)}}}};
}

DiscreteMeasure measure_from_json(const Json& j) {
    return guarded("measure", [&] { return DiscreteMeasure::from_atoms(atom_list(j.at("atoms"))); });
}

Json to_json(const DiscreteMeasure& mu) { return Json{{"atoms", atom_json(mu.weighted_atoms())}}; }

ParisiPair pair_from_json(const Json& j, const ModelParams& params) {
    return guarded("pair", [&] {
        ParisiPair pair =
            make_pair(j.at("xi").get<std::vector<double>>(), j.at("x").get<std::vector<double>>(), params);
        const auto v = validate_pair(pair, params);
        if (!v.empty()) {
            std::string msg = "pair invalid:";
            for (const auto& s : v) msg += " " + s + ";";
            throw ConfigError(msg);
        }
        return pair;
    });
}

Json to_json(const ParisiPair& pair) {
    return Json{{"xi", pair.xi}, {"x", pair.x}, {"gamma_tilde", pair.gamma_tilde}};
}

NumericsConfig numerics_from_json(const Json& j) {
    return guarded("numerics", [&] {
        NumericsConfig n;
        if (j.is_null()) return n;
        if (j.contains("quad_rule")) {
            const auto s = j.at("quad_rule").get<std::string>();
            if (s == "trapezoid")
                n.quad_rule = QuadKind::trapezoid;
            else if (s == "gauss_hermite")
                n.quad_rule = QuadKind::gauss_hermite;
            else
                throw ConfigError("numerics: unknown quad_rule '" + s + "'");
        }
        if (j.contains("quad_nodes")) n.quad_nodes = j.at("quad_nodes").get<int>();
        if (j.contains("grid_points")) n.grid_points = j.at("grid_points").get<int>();
        if (j.contains("grid_half_width") && !j.at("grid_half_width").is_null())
            n.grid_half_width = j.at("grid_half_width").get<double>();
        return n;
    });
}

Json to_json(const NumericsConfig& num) {
    Json j{{"quad_rule", num.quad_rule == QuadKind::trapezoid ? "trapezoid" : "gauss_hermite"},
           {"quad_nodes", num.quad_nodes},
           {"grid_points", num.grid_points}};
    j["grid_half_width"] = num.grid_half_width ? Json(*num.grid_half_width) : Json(nullptr);
    return j;
}

OptimizeOptions optimize_options_from_json(const Json& j) {
    return guarded("optimize options", [&] {
        OptimizeOptions o;
        if (j.contains("tol")) o.tol = j.at("tol").get<double>();
        if (j.contains("damping")) o.damping = j.at("damping").get<double>();
        if (j.contains("max_iter")) o.max_iter = j.at("max_iter").get<int>();
        if (j.contains("multistart")) o.multistart = j.at("multistart").get<bool>();
        if (!(o.tol > 0.0) || !(o.damping > 0.0 && o.damping <= 1.0) || o.max_iter < 1)
            throw ConfigError("optimize options: need tol > 0, 0 < damping <= 1, max_iter >= 1");
        return o;
    });
}

SimOptions sim_options_from_json(const Json& j) {
    return guarded("simulate", [&] {
        SimOptions o;
        if (j.contains("N")) o.N = j.at("N").get<int>();
        if (j.contains("n_outer")) o.n_outer = j.at("n_outer").get<int>();
        if (j.contains("n_inner")) {
            const auto& v = j.at("n_inner");
            o.n_inner = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
        }
        if (j.contains("seed")) o.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("allow_deep")) o.allow_deep = j.at("allow_deep").get<bool>();
        return o;
    });
}

Json to_json(const PhaseLabel& label) {
    Json gaps = Json::array(), moments = Json::array();
    for (const auto& [l, d] : label.gaps) gaps.push_back({l, d});
    for (const auto& [l, m] : label.conditional_moments) moments.push_back({l, m});
    return Json{{"kind", to_string(label.kind)},
                {"distinct_support_points", label.distinct_support_points},
                {"positive_support_points", label.positive_support_points},
                {"gaps", gaps},
                {"conditional_moments", moments}};
}

Json to_json(const OptimReport& report) {
    Json hist = Json::array();
    for (const auto& [k, v] : report.refinement_history) hist.push_back({k, v});
    return Json{{"pair", to_json(report.pair)},
                {"value", report.value},
                {"residual", report.residual},
                {"iterations", report.iterations},
                {"converged", report.converged},
                {"refinement_history", hist},
                {"start", report.start},
                {"used_fallback", report.used_fallback}};
}

}  // namespace msparisi
