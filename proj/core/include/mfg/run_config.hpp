#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mfg/problem.hpp"
#include "mfg/solver.hpp"

namespace mfg {

// INI-style run configuration: dotted keys (`domain.extent = 2 2`) or
// `[domain]` section headers; `#`/`;` comments; unknown keys rejected.
struct RunConfig {
    std::vector<double> extent;
    std::vector<int> cells;

    double q = 0.0;
    std::optional<double> r;
    std::optional<double> eps;
    std::vector<double> eps_schedule;

    std::string potential;  // uniform | cosine_well | two_well | file
    double v0 = 0.0;
    double depth = 1.0;
    std::optional<std::vector<double>> center;
    std::optional<double> radius;
    double depth2 = 1.0;
    std::optional<std::vector<double>> center2;
    std::optional<double> radius2;
    std::string potential_file;
    double rho = 0.0;
    double theta = 1.0;

    SolverConfig solver;
    std::string out_dir;

    // Base directory for relative paths (directory of the config file).
    std::filesystem::path base_dir;

    static RunConfig parse_file(const std::filesystem::path& path);
    static RunConfig parse_text(const std::string& text,
                                const std::filesystem::path& base_dir = ".");

    Grid make_grid() const;
    ProblemSpec make_spec(double eps_value) const;

    // The single-solve epsilon; throws SpecError if a schedule was given.
    double solve_eps() const;
    // The sweep schedule; throws SpecError if absent.
    const std::vector<double>& sweep_schedule() const;

    // Normalized dotted-key echo used in run manifests.
    std::string echo() const;
};

}  // namespace mfg
