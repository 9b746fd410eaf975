// Command-line front end: one subcommand per task, driven by a JSON config.

#include "gexp/cli/tasks.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum Exit { ok = 0, assertion_failed = 1, usage_error = 2, runtime_error = 3 };

struct Args {
    std::string config;
    std::string out;
    std::string format = "both";
    std::optional<std::uint64_t> seed;
    int jobs = 1;
};

int run_task(gexp::cli::Task task, const Args& args)
{
    using namespace gexp::cli;
    try {
        auto cfg = load_config(args.config);
        const std::string out = !args.out.empty() ? args.out : !cfg.output.empty() ? cfg.output : "gexp_out";
        RunReport report = run(std::move(cfg), task, RunOptions{args.jobs, args.seed});
        Formats formats{args.format != "structured", args.format != "tabular"};
        emit(report, out, formats);
        for (const auto& w : report.warnings) {
            std::cerr << "warning: " << w << "\n";
        }
        for (const auto& a : report.assertions) {
            std::cout << (a.passed ? "PASS " : "FAIL ") << a.name;
            if (!a.detail.empty()) {
                std::cout << ": " << a.detail;
            }
            std::cout << "\n";
        }
        std::cout << to_string(task) << ": " << (report.passed() ? "passed" : "FAILED") << ", output in " << out
                  << "\n";
        return report.passed() ? ok : assertion_failed;
    }
    catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return usage_error;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return runtime_error;
    }
}

const char* describe(gexp::cli::Task task)
{
    switch (task) {
    case gexp::cli::Task::solve: return "evaluate rho_0 of each claim";
    case gexp::cli::Task::axioms: return "run the axiom suite on claim pairs";
    case gexp::cli::Task::domination: return "check growth sandwich, theta and sup-norm domination";
    case gexp::cli::Task::dual: return "sweep densities against the dual representation";
    case gexp::cli::Task::penalize: return "penalization and Doob-Meyer compensator of Y + zB";
    case gexp::cli::Task::represent: return "recover the driver and round-trip it";
    case gexp::cli::Task::converge: return "error ratios of a scheme pair under step doubling";
    }
    return "";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dynamic risk measures as g-expectations on a binary Brownian tree"};
    app.require_subcommand(1);
    Args args;
    std::optional<gexp::cli::Task> chosen;
    for (auto task : {gexp::cli::Task::solve, gexp::cli::Task::axioms, gexp::cli::Task::domination,
                      gexp::cli::Task::dual, gexp::cli::Task::penalize, gexp::cli::Task::represent,
                      gexp::cli::Task::converge}) {
        auto* sub = app.add_subcommand(gexp::cli::to_string(task), describe(task));
        sub->add_option("-c,--config", args.config, "JSON scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", args.out, "output directory");
        sub->add_option("--format", args.format, "tabular, structured or both")
            ->check(CLI::IsMember({"tabular", "structured", "both"}));
        sub->add_option("--seed", args.seed, "override the config seed");
        sub->add_option("-j,--jobs", args.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->callback([&chosen, task] { chosen = task; });
    }
    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage_error;
    }
    return run_task(*chosen, args);
}
