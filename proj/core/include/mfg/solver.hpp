#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "mfg/certificates.hpp"
#include "mfg/problem.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

struct SolverConfig {
    double penalty = 1.0;  // initial ADMM penalty, adapted by residual balancing
    int max_iter = 20000;
    double tol_primal = 1e-6;
    double tol_dual = 1e-6;
    double tol_gap = 1e-5;     // relative certified duality gap
    double inner_tol = 1e-10;  // CG tolerance of the affine projection
    std::uint64_t seed = 0;
    double init_perturbation = 0.01;  // feasible-init noise amplitude (relative)
    int check_every = 25;             // penalty adaptation / gap cadence
    int threads = 1;

    void validate() const;
};

struct IterationRecord {
    int iter = 0;
    double primal_res = 0.0;
    double dual_res = 0.0;
    double gap = 0.0;  // NaN until first certified evaluation
    double objective = 0.0;
    double mass_error = 0.0;
};

struct Solution {
    CellField m;
    FaceField w;
    CellField u;  // mean zero
    double lambda = 0.0;
    double objective = 0.0;
    int iterations = 0;
    Certificate certificate;
    std::vector<IterationRecord> history;
};

struct Residuals {
    double primal = 0.0;
    double dual = 0.0;
    double pde = 0.0;
    double mass = 0.0;
    double box = 0.0;
};

struct MaxIterExceeded : std::runtime_error {
    MaxIterExceeded(Solution best_, Residuals res_, int stage_ = -1)
        : std::runtime_error(stage_ < 0
                                 ? "solver hit the iteration cap"
                                 : "solver hit the iteration cap at homotopy stage " +
                                       std::to_string(stage_)),
          best(std::move(best_)), residuals(res_), stage(stage_) {}
    Solution best;
    Residuals residuals;
    int stage;
};

// Projection onto {-laplacian(m) + divergence(w) = 0, integrate(m) = 1} in
// the metric of the stacked consensus interpolation (m, face_to_cell(w), m).
// The constraint multiplier is eliminated through a Schur complement that is
// SPD on mean-zero fields and solved by CG with a Poisson-type spectral
// preconditioner; the mass row is carried explicitly and its multiplier
// (together with the PDE multiplier field) converges, once scaled by the
// penalty, to (lambda, -u).
class AffineProjector {
public:
    AffineProjector(const Grid& g, double tol);

    struct Result {
        CellField m;
        FaceField w;
        double nu = 0.0;  // mass-row multiplier of the projection
        int cg_iterations = 0;
    };

    // Minimizes |m - v1a|^2 + |face_to_cell(w) - v1b|^2 + |m - v2|^2 over the
    // constraint set. `phi` is the PDE-row multiplier, kept across calls as a
    // warm start.
    Result project(const CellField& v1a, const CellVecField& v1b, const CellField& v2,
                   CellField& phi) const;

private:
    Grid grid_;
    SpectralPoisson spectral_;
    double tol_;
};

// Consensus splitting state: staggered iterate, centered copies, scaled duals.
struct ConsensusState {
    CellField m;
    FaceField w;
    CellField zeta1a;
    CellVecField zeta1b;
    CellField zeta2;
    CellField zeta1a_prev;
    CellVecField zeta1b_prev;
    CellField zeta2_prev;
    CellField y1a;
    CellVecField y1b;
    CellField y2;
    CellField phi;
    double nu = 0.0;
    double rho = 1.0;
};

// m = 1/|Omega|, w = 0; feasible for every admissible spec.
std::pair<CellField, FaceField> feasible_init(const ProblemSpec& spec);

// Feasible start, perturbed by seeded noise and re-projected when
// config.init_perturbation > 0; consensus copies synchronized, duals zero.
ConsensusState initial_state(const ProblemSpec& spec, const SolverConfig& config);

Residuals compute_residuals(const ProblemSpec& spec, const ConsensusState& s);

Solution solve(const ProblemSpec& spec, const SolverConfig& config);

struct HomotopyResult {
    std::vector<Solution> stages;
    std::vector<double> m_distances;  // L2 distance of m between consecutive stages
};

// Solves (P_{q,eps}) along a strictly decreasing positive schedule with warm
// starts. Stage failures carry the stage index.
HomotopyResult homotopy_solve(const ProblemSpec& spec,
                              const std::vector<double>& eps_schedule,
                              const SolverConfig& config);

}  // namespace mfg
