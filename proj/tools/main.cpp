// Command-line front end: solve, sweep, diagnose, oracle.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <cournot/cournot.hpp>
#include <cournot/verify.hpp>

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory (default: out)");
    cmd->add_option("--override", args.overrides,
                    "config override as key.path=value (repeatable)");
    cmd->add_option("--threads", args.threads, "worker threads for sweep points (default: 1)")
        ->check(CLI::PositiveNumber);
}

int run_command(const CommonArgs& args, bool sweep) {
    cournot::json doc = cournot::json::parse(cournot::slurp(args.config_path));
    for (const auto& ov : args.overrides) cournot::apply_override(doc, ov);
    cournot::RunOptions opts;
    opts.out_dir = args.out_dir;
    opts.threads = args.threads;
    cournot::RunOutcome out = cournot::run(doc, opts, sweep);
    std::cout << (out.converged ? "converged" : "did not converge") << "; artifacts in "
              << out.out_dir << "\n";
    return out.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cournot-Nash equilibria of nonatomic games via entropic optimal transport"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cournot::kVersion));

    CommonArgs solve_args, sweep_args;
    CLI::App* solve_cmd = app.add_subcommand("solve", "solve one configuration");
    add_common(solve_cmd, solve_args);
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "solve every value of the config's sweep section");
    add_common(sweep_cmd, sweep_args);

    std::string report_path;
    CLI::App* diagnose_cmd =
        app.add_subcommand("diagnose", "recompute and cross-check an emitted report");
    diagnose_cmd->add_option("report", report_path, "path to report.json")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "run built-in cross-checks with frozen expected values");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return run_command(solve_args, false);
        if (sweep_cmd->parsed()) return run_command(sweep_args, true);
        if (diagnose_cmd->parsed()) return cournot::verify_report(report_path, std::cout);
        if (oracle_cmd->parsed()) return cournot::run_builtin_oracles(std::cout) ? 0 : 1;
    } catch (const cournot::InvalidConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const cournot::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
