#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "msparisi/app.hpp"

namespace {

// Writes to `path`, or stdout when empty.
void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw msparisi::ConfigError("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace msparisi;
    CLI::App app{"Multiscale Parisi functional: evaluation, optimization, phase scans and finite-N simulation"};
    app.require_subcommand(1);

    std::string model_path, pair_path, numerics_path, config_path, output;
    std::optional<int> k_per_interval;
    bool no_wall_time = false;

    auto* eval = app.add_subcommand("eval", "Evaluate the functional, gradient and residual of a pair");
    eval->add_option("model", model_path, "Model JSON")->required();
    eval->add_option("pair", pair_path, "Pair JSON")->required();
    eval->add_option("--numerics", numerics_path, "Numerics JSON");

    auto* opt = app.add_subcommand("optimize", "Minimize over x on refined zeta-anchored grids");
    opt->add_option("model", model_path, "Model JSON (may carry optimizer keys and numerics)")->required();
    opt->add_option("--k-per-interval", k_per_interval, "Levels per zeta interval")->check(CLI::PositiveNumber);

    auto* scan = app.add_subcommand("scan", "Sweep model parameters and write a CSV table");
    scan->add_option("config", config_path, "Scan JSON")->required();

    auto* sim = app.add_subcommand("simulate", "Nested Monte Carlo at finite N");
    sim->add_option("config", config_path, "Simulation JSON")->required();
    sim->add_flag("--no-wall-time", no_wall_time, "Leave wall_time_s empty so outputs are byte-identical");

    auto* verify = app.add_subcommand("verify", "Run named checks and write a JSON report");
    verify->add_option("config", config_path, "Verification JSON")->required();

    for (auto* sub : {eval, opt, scan, sim, verify}) sub->add_option("-o,--output", output, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*eval) {
            const Json num = numerics_path.empty() ? Json() : load_json_file(numerics_path);
            emit(run_eval(load_json_file(model_path), load_json_file(pair_path), num).dump(2) + "\n", output);
        } else if (*opt) {
            emit(run_optimize(load_json_file(model_path), k_per_interval).dump(2) + "\n", output);
        } else if (*scan) {
            ScanSpec spec = scan_spec_from_json(load_json_file(config_path));
            emit(run_scan(spec), output.empty() ? spec.output : output);
        } else if (*sim) {
            const Json cfg = load_json_file(config_path);
            emit(run_simulate(cfg, !no_wall_time), output.empty() ? cfg.value("output", std::string()) : output);
        } else if (*verify) {
            const Json cfg = load_json_file(config_path);
            const VerifyOutcome v = run_verify(cfg);
            emit(v.report.dump(2) + "\n", output.empty() ? cfg.value("output", std::string()) : output);
            return v.all_pass ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
