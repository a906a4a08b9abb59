#include "msparisi/app.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <regex>
#include <sstream>

#include "msparisi/checks.hpp"
#include "msparisi/parallel.hpp"

namespace msparisi {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// CSV cells never contain separators or line breaks.
std::string cell(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
    return s;
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

OptimReport optimize_model(const ModelParams& params, const NumericsConfig& num, int k, const OptimizeOptions& opts) {
    return refine_k(params, num, refinement_schedule(k), opts);
}

double annealed_of(const ModelParams& p) { return std::numbers::ln2 + 0.5 * p.gamma_r() * p.gamma_r(); }

Json check_json(const CheckResult& r, const Json& inputs) {
    Json j{{"name", r.name}, {"inputs", inputs}, {"pass", r.pass}, {"detail", r.detail}};
    j["measured"] = std::isfinite(r.measured) ? Json(r.measured) : Json(nullptr);
    j["target"] = std::isfinite(r.target) ? Json(r.target) : Json(nullptr);
    return j;
}

CheckResult run_check(const Json& c, const NumericsConfig& num) {
    const auto name = c.at("name").get<std::string>();
    const auto seed = get_or<std::uint64_t>(c, "seed", 1);
    const int k = get_or<int>(c, "k_per_interval", 2);
    auto model = [&] { return model_from_json(c.at("model")); };
    auto opts = [&] { return optimize_options_from_json(c); };

    if (name == "trivial_anchor") return check_trivial_anchor(get_or(c, "n_models", 20), seed, get_or(c, "tol", 1e-8));
    if (name == "oracle_equivalence")
        return check_oracle(get_or(c, "n_pairs", 50), get_or(c, "k_max", 3), seed, get_or(c, "tol", 1e-6));
    if (name == "gradient_fd") return check_gradient_fd(get_or(c, "n_pairs", 20), seed, get_or(c, "tol", 1e-4));
    if (name == "redundant_level") return check_redundant_level(get_or(c, "n_pairs", 20), seed, get_or(c, "tol", 1e-9));
    if (name == "lipschitz") return check_lipschitz(model(), get_or(c, "n_pairs", 200), seed, get_or(c, "slack", 1e-8));
    if (name == "curvature") {
        const auto p = model();
        return check_curvature(p, annealed_curvature(p), get_or(c, "tol", 1e-3));
    }
    if (name == "annealed_value") {
        const auto p = model();
        return check_annealed_value(optimize_model(p, num, k, opts()), p, get_or(c, "tol", 1e-5), get_or(c, "x_tol", 1e-3));
    }
    if (name == "below_annealed") {
        const auto p = model();
        return check_below_annealed(optimize_model(p, num, k, opts()), p, get_or(c, "margin", 1e-4));
    }
    if (name == "rsb_support") {
        const auto p = model();
        return check_rsb_support(optimize_model(p, num, k, opts()), p, get_or(c, "min_support", p.r()),
                                 get_or(c, "moment_min", 0.01), get_or(c, "residual_tol", 1e-6));
    }
    if (name == "plateau_bound") {
        const auto p = model();
        return check_plateau(optimize_model(p, num, k, opts()), p, get_or(c, "ell", 1));
    }
    if (name == "moment_ordering") {
        const auto p = model();
        return check_ordering(optimize_model(p, num, k, opts()), p);
    }
    if (name == "simulator_n1" || name == "simulator_jensen") {
        const auto p = model();
        SimOptions so = sim_options_from_json(c);
        if (name == "simulator_n1") so.N = 1;
        const auto t0 = std::chrono::steady_clock::now();
        const SimEstimate e = nested_pressure(p, so);
        CheckResult r;
        r.name = name;
        if (name == "simulator_n1") {
            const double exact = single_spin_pressure(p);
            r.measured = std::abs(e.mean - exact);
            r.target = 3.0 * e.std_error;
            r.detail = "estimate " + fmt(e.mean) + " +- " + fmt(e.std_error) + ", exact " + fmt(exact);
        } else {
            r.measured = e.mean;
            r.target = annealed_of(p) + 3.0 * e.std_error;
            r.detail = "estimate " + fmt(e.mean) + " +- " + fmt(e.std_error) + ", annealed " + fmt(annealed_of(p));
        }
        r.pass = r.measured <= r.target;
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }
    throw ConfigError("verify: unknown check '" + name + "'");
}

}  // namespace

std::vector<int> refinement_schedule(int k_per_interval) {
    if (k_per_interval < 1) throw DomainError("k_per_interval must be positive");
    std::vector<int> s;
    for (int k = 1; k < k_per_interval; k *= 2) s.push_back(k);
    s.push_back(k_per_interval);
    return s;
}

Json run_eval(const Json& model, const Json& pair, const Json& numerics) {
    const ModelParams p = model_from_json(model);
    const ParisiPair pr = pair_from_json(pair, p);
    const NumericsConfig n = numerics_from_json(numerics);
    try {
        validate_numerics(n, p);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("numerics: ") + e.what());
    }
    const ParisiEvaluation ev = evaluate_full(pr, p, n);
    return Json{{"value", ev.value},
                {"annealed_value", annealed_of(p)},
                {"targets", ev.targets},
                {"gradient", ev.gradient},
                {"residual", ev.residual}};
}

Json run_optimize(const Json& config, std::optional<int> k_override) {
    const ModelParams p = model_from_json(config);
    const NumericsConfig n = numerics_from_json(config.contains("numerics") ? config.at("numerics") : Json());
    const OptimizeOptions o = optimize_options_from_json(config);
    const int k = k_override ? *k_override : get_or(config, "k_per_interval", 4);
    if (k < 1) throw ConfigError("k_per_interval must be positive");
    try {
        validate_numerics(n, p);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("numerics: ") + e.what());
    }
    const OptimReport rep = optimize_model(p, n, k, o);
    Json out{{"model", to_json(p)}, {"k_per_interval", k}, {"report", to_json(rep)}, {"annealed_value", annealed_of(p)}};
    out["measure"] = to_json(pair_to_measure(rep.pair));
    out["phase"] = rep.converged ? to_json(classify_phase(rep, p)) : Json(nullptr);
    return out;
}

ScanSpec scan_spec_from_json(const Json& j) {
    try {
        ScanSpec s;
        s.model = j.at("model");
        model_from_json(s.model);
        for (const auto& a : j.at("sweep")) {
            SweepAxis ax;
            ax.param = a.at("param").get<std::string>();
            if (!std::regex_match(ax.param, std::regex(R"((gamma|gamma2|zeta|field)\[\d+\])")))
                throw ConfigError("scan: unsupported parameter path '" + ax.param + "'");
            if (a.contains("values")) {
                ax.values = a.at("values").get<std::vector<double>>();
            } else {
                const double lo = a.at("start").get<double>(), hi = a.at("stop").get<double>();
                const int steps = a.at("steps").get<int>();
                if (steps < 1) throw ConfigError("scan: steps must be positive");
                for (int i = 0; i < steps; ++i) ax.values.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
            }
            if (ax.values.empty()) throw ConfigError("scan: empty sweep axis");
            s.axes.push_back(std::move(ax));
        }
        if (s.axes.empty()) throw ConfigError("scan: no sweep axes");
        s.numerics = numerics_from_json(j.contains("numerics") ? j.at("numerics") : Json());
        const Json opt = j.contains("optimize") ? j.at("optimize") : Json::object();
        s.options = optimize_options_from_json(opt);
        s.k_per_interval = get_or(opt, "k_per_interval", 2);
        if (s.k_per_interval < 1) throw ConfigError("scan: k_per_interval must be positive");
        s.output = get_or<std::string>(j, "output", "");
        return s;
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("scan: ") + e.what());
    }
}

ModelParams apply_sweep(const Json& model, const std::vector<SweepAxis>& axes, const std::vector<double>& values) {
    Json m = model;
    static const std::regex path(R"((gamma|gamma2|zeta|field)\[(\d+)\])");
    for (std::size_t a = 0; a < axes.size(); ++a) {
        std::smatch match;
        if (!std::regex_match(axes[a].param, match, path))
            throw ConfigError("scan: unsupported parameter path '" + axes[a].param + "'");
        const std::string name = match[1];
        const auto idx = static_cast<std::size_t>(std::stoul(match[2]));
        const double v = values[a];
        auto set = [&](Json& arr, double val) {
            if (!arr.is_array() || idx >= arr.size()) throw DomainError("sweep index out of range: " + axes[a].param);
            arr[idx] = val;
        };
        if (name == "gamma") set(m["gamma"], v);
        if (name == "gamma2") {
            if (v < 0.0) throw DomainError("gamma2 must be nonnegative");
            set(m["gamma"], std::sqrt(v));
        }
        if (name == "zeta") set(m["zeta"], v);
        if (name == "field") {
            if (!m.contains("field")) m["field"] = Json{{"atoms", {{0.0, 1.0}}}};
            auto& atoms = m["field"]["atoms"];
            if (idx >= atoms.size()) throw DomainError("sweep index out of range: " + axes[a].param);
            atoms[idx][0] = v;
        }
    }
    try {
        return model_from_json(m);
    } catch (const ConfigError& e) {
        throw DomainError(e.what());
    }
}

std::string run_scan(const ScanSpec& spec) {
    std::size_t total = 1;
    for (const auto& a : spec.axes) total *= a.values.size();
    std::vector<std::string> rows(total);
    parallel_for(total, [&](std::size_t idx) {
        std::vector<double> vals(spec.axes.size());
        std::size_t rem = idx;
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            vals[a] = spec.axes[a].values[rem % spec.axes[a].values.size()];
            rem /= spec.axes[a].values.size();
        }
        std::ostringstream row;
        row << idx;
        for (double v : vals) row << ',' << fmt(v);
        try {
            const ModelParams p = apply_sweep(spec.model, spec.axes, vals);
            validate_numerics(spec.numerics, p);
            const OptimReport rep = optimize_model(p, spec.numerics, spec.k_per_interval, spec.options);
            row << ',' << fmt(rep.value) << ',' << fmt(annealed_of(p));
            if (rep.converged) {
                const PhaseLabel lab = classify_phase(rep, p);
                std::string gaps, moments;
                for (const auto& [l, d] : lab.gaps) gaps += (gaps.empty() ? "" : ";") + std::to_string(l) + ":" + fmt(d);
                for (const auto& [l, m] : lab.conditional_moments)
                    moments += (moments.empty() ? "" : ";") + std::to_string(l) + ":" + fmt(m);
                row << ',' << to_string(lab.kind) << ',' << lab.distinct_support_points << ',' << gaps << ',' << moments;
            } else {
                row << ",,,,";
            }
            row << ',' << (rep.converged ? 1 : 0) << ',' << fmt(rep.residual) << ',' << rep.pair.k() << ','
                << (rep.converged ? "" : "not converged");
        } catch (const std::exception& e) {
            row << ",,,,,,,,," << cell(e.what());
        }
        rows[idx] = row.str();
    });
    std::ostringstream out;
    out << "index";
    for (const auto& a : spec.axes) out << ',' << a.param;
    out << ",value,annealed_value,phase,distinct_support_points,gaps,conditional_moments,converged,residual,k,error\n";
    for (const auto& r : rows) out << r << '\n';
    return out.str();
}

std::string run_simulate(const Json& config, bool record_wall_time) {
    ModelParams p;
    SimOptions o;
    std::string observable;
    int ell = 1;
    try {
        p = model_from_json(config.at("model"));
        o = sim_options_from_json(config);
        observable = get_or<std::string>(config, "observable", "pressure");
        ell = get_or(config, "ell", 1);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("simulate: ") + e.what());
    }
    if (observable != "pressure" && observable != "overlap2")
        throw ConfigError("simulate: observable must be pressure or overlap2");
    const auto t0 = std::chrono::steady_clock::now();
    SimEstimate e;
    try {
        e = observable == "pressure" ? nested_pressure(p, o) : overlap_moment_sim(p, ell, o);
    } catch (const DomainError& err) {
        throw ConfigError(std::string("simulate: ") + err.what());
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string inner;
    for (int n : e.n_inner) inner += (inner.empty() ? "" : ";") + std::to_string(n);
    std::ostringstream out;
    out << "N,observable,ell,mean,stderr,n_outer,n_inner,seed,wall_time_s\n";
    out << o.N << ',' << observable << ',' << (observable == "pressure" ? std::string() : std::to_string(ell)) << ','
        << fmt(e.mean) << ',' << fmt(e.std_error) << ',' << e.n_outer << ',' << inner << ',' << e.seed << ','
        << (record_wall_time ? fmt(wall) : std::string()) << '\n';
    return out.str();
}

VerifyOutcome run_verify(const Json& config) {
    NumericsConfig n;
    Json checks;
    try {
        n = numerics_from_json(config.contains("numerics") ? config.at("numerics") : Json());
        checks = config.at("checks");
        if (!checks.is_array() || checks.empty()) throw ConfigError("verify: checks must be a non-empty array");
        for (const auto& c : checks) c.at("name").get<std::string>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("verify: ") + e.what());
    }
    VerifyOutcome out;
    out.all_pass = true;
    Json entries = Json::array();
    for (const auto& c : checks) {
        CheckResult r;
        try {
            r = run_check(c, n);
        } catch (const Json::exception& e) {
            throw ConfigError(std::string("verify: ") + e.what());
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            r.name = c.at("name").get<std::string>();
            r.pass = false;
            r.detail = std::string("error: ") + e.what();
            r.measured = std::nan("");
            r.target = std::nan("");
        }
        out.all_pass = out.all_pass && r.pass;
        entries.push_back(check_json(r, c));
    }
    out.report = Json{{"checks", entries}, {"all_pass", out.all_pass}};
    return out;
}

}  // namespace msparisi
