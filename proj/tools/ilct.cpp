#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ilct/commands.hpp"
#include "ilct/errors.hpp"
#include "ilct/scenario.hpp"

namespace {

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ilct::Error("cannot write " + path);
    os << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative learning control: trackability analysis and simulation"};
    app.require_subcommand(1);

    std::string scenario_arg;
    std::string case_name;
    std::string json_out;
    std::string out_dir;
    int iters = -1;
    std::uint64_t seed = 0;

    auto* analyze = app.add_subcommand("analyze", "Trackability verdicts and convergence condition");
    analyze->add_option("scenario", scenario_arg, "Scenario file or built-in name")->required();
    analyze->add_option("--case", case_name, "Case to analyze (default: all)");
    analyze->add_option("--json", json_out, "Also write the report as JSON");

    auto* run = app.add_subcommand("run", "Run the learning iterations and write CSV output");
    run->add_option("scenario", scenario_arg, "Scenario file or built-in name")->required();
    run->add_option("--case", case_name, "Case to run")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    auto* iters_opt = run->add_option("--iters", iters, "Override the iteration count")->check(CLI::NonNegativeNumber);
    auto* seed_opt = run->add_option("--seed", seed, "Override the disturbance seed");

    auto* verify = app.add_subcommand("verify", "Cross-check a run against the predicted limits");
    verify->add_option("scenario", scenario_arg, "Scenario file or built-in name")->required();
    verify->add_option("--case", case_name, "Case to verify")->required();
    verify->add_option("--json", json_out, "Also write the checks as JSON");

    auto* examples = app.add_subcommand("examples", "Built-in scenarios");
    examples->require_subcommand(1);
    examples->add_subcommand("list", "List built-in scenarios");
    std::string export_name;
    std::string export_path;
    auto* exp = examples->add_subcommand("export", "Write a built-in scenario as JSON");
    exp->add_option("name", export_name, "Built-in name")->required();
    exp->add_option("-o,--output", export_path, "Output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    ilct::Scenario scenario;
    try {
        if (*examples) {
            if (examples->got_subcommand("list")) {
                for (const auto& n : ilct::builtin_names()) std::cout << n << '\n';
                return ilct::exit_ok;
            }
            const std::string text = ilct::serialize_scenario(ilct::builtin_scenario(export_name));
            if (export_path.empty()) {
                std::cout << text;
            } else {
                std::ofstream os(export_path, std::ios::binary);
                os << text;
            }
            return ilct::exit_ok;
        }
        scenario = ilct::resolve_scenario(scenario_arg);
    } catch (const ilct::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ilct::exit_invalid;
    } catch (const ilct::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ilct::exit_invalid;
    }

    try {
        if (*analyze) {
            std::optional<std::string> which;
            if (!case_name.empty()) which = case_name;
            const auto results = ilct::cmd_analyze(scenario, which);
            ilct::print_analyze(std::cout, scenario, results);
            if (!json_out.empty()) write_json(json_out, ilct::analyze_to_json(scenario, results));
            for (const auto& r : results) {
                if (!r.verdict.trackable) return ilct::exit_untrackable;
            }
            return ilct::exit_ok;
        }
        if (*run) {
            ilct::RunOptions opt;
            if (*iters_opt) opt.iterations = iters;
            if (*seed_opt) opt.seed = seed;
            const ilct::RunResult r = ilct::cmd_run(scenario, case_name, out_dir, opt);
            std::cout << "case " << case_name << ": " << r.report.iterations << " iterations, final sup error "
                      << r.report.final_sup_error << '\n';
            for (const auto& f : r.files) std::cout << "  wrote " << f << '\n';
            if (r.diverged) {
                std::cerr << "diverged: " << r.message << '\n';
                return ilct::exit_diverged;
            }
            return ilct::exit_ok;
        }
        if (*verify) {
            const auto checks = ilct::cmd_verify(scenario, case_name);
            ilct::print_checks(std::cout, checks);
            if (!json_out.empty()) write_json(json_out, ilct::checks_to_json(checks));
            for (const auto& c : checks) {
                if (!c.pass) return ilct::exit_check_failed;
            }
            return ilct::exit_ok;
        }
    } catch (const ilct::DivergenceError& e) {
        std::cerr << "diverged: " << e.what() << '\n';
        return ilct::exit_diverged;
    } catch (const ilct::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ilct::exit_invalid;
    }
    return ilct::exit_ok;
}
