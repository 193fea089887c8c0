#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace mfg {

// Exit codes shared by the CLI commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictFail = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitMaxIter = 3;
inline constexpr int kExitIoError = 4;

struct RunnerOptions {
    std::string config_path;
    std::string out_dir;                // overrides output.dir when nonempty
    int threads = 0;                    // 0 = config / MFG_THREADS fallback
    std::optional<std::uint64_t> seed;  // overrides solver.seed
};

// Solves the configured problem and writes m/w/u/p/mu fields, the
// convergence CSV, the certificate block, and a run manifest into the output
// directory. Exit 0 iff the certificate verdict is pass.
int cmd_solve(const RunnerOptions& opt);

// Re-reads a run directory and recomputes the certificate from the stored
// fields, comparing every key against the stored block at 1e-12.
int cmd_certify(const std::string& run_dir);

// Homotopy over congestion.eps_schedule with per-stage artifacts and a
// stage-distance CSV (eps, |delta m|_2, gap).
int cmd_sweep(const RunnerOptions& opt);

// Oracle-backed kernel suites (conjugacy, Moreau, adjointness, manufactured
// Poisson); prints a per-suite max-error table. `debug_fail` injects a
// deliberate perturbation so the failure path can be exercised.
int cmd_selftest(bool debug_fail);

}  // namespace mfg
