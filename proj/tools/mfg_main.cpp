#include <CLI11.hpp>

#include "mfg/runner.hpp"
#include "mfg/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Certifying solver for stationary mean field games with a hard "
                 "density constraint"};
    app.set_version_flag("--version", std::string("mfg ") + mfg::kVersion);
    app.require_subcommand(1);

    mfg::RunnerOptions opt;
    std::uint64_t seed_value = 0;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* c = cmd->add_option("--config", opt.config_path, "run configuration file");
        if (needs_config) c->required();
        cmd->add_option("--out", opt.out_dir, "output directory (overrides output.dir)");
        cmd->add_option("--threads", opt.threads,
                        "worker threads (fallback: MFG_THREADS, then config)");
        cmd->add_option("--seed", seed_value, "override solver.seed")
            ->each([&](const std::string&) { opt.seed = seed_value; });
    };

    auto* solve = app.add_subcommand("solve", "solve one problem and certify it");
    add_common(solve, true);

    auto* certify = app.add_subcommand(
        "certify", "recompute the certificate of a finished run directory");
    std::string run_dir;
    certify->add_option("run_dir", run_dir, "run directory")->required();

    auto* sweep = app.add_subcommand("sweep", "eps-homotopy over a schedule");
    add_common(sweep, true);

    auto* selftest = app.add_subcommand("selftest", "oracle-backed kernel suites");
    bool debug_fail = false;
    selftest->add_flag("--debug-fail-selftest", debug_fail,
                       "inject a perturbation so the failure path triggers");

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) return mfg::cmd_solve(opt);
    if (certify->parsed()) return mfg::cmd_certify(run_dir);
    if (sweep->parsed()) return mfg::cmd_sweep(opt);
    if (selftest->parsed()) return mfg::cmd_selftest(debug_fail);
    return mfg::kExitConfigError;
}
