#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mfg/problem.hpp"

namespace mfg {

// Dual data of the equilibrium system: the value function u (mean zero), the
// pressure density p on {m = 1}, the exclusion density mu on {m = 0}, and the
// normalization multiplier lambda. `conjugate` carries the cell-sampled
// conjugate pair (alpha, beta) backing the dual certificate; beta satisfies
// the exact staggered adjoint relation face_to_cell_adjoint(beta) = -grad u.
struct Multipliers {
    CellField u;
    CellField p;
    CellField mu;
    double lambda = 0.0;        // refined by the concave dual maximization
    double lambda_input = 0.0;  // multiplier as handed in (solver mass row)
    SubgradientField conjugate;
};

struct Certificate {
    double primal_value = 0.0;
    double dual_value = 0.0;
    double gap = 0.0;
    double hjb_residual = 0.0;
    double fp_residual = 0.0;
    double compl_pressure = 0.0;
    double compl_exclusion = 0.0;
    double weak_concentration = 0.0;
    double lambda = 0.0;
    double mass_error = 0.0;
    double box_violation = 0.0;
    bool pass = false;
};

struct CertifyConfig {
    double tol_gap = 1e-5;             // relative to 1 + |primal|
    double tol_feasibility = 1e-6;     // mass error and box violation
    double tol_complementarity = 1e-4; // pairings and weak concentration
    double tol_fp = 0.5;               // staggered/centered cross-check (O(h^2)-limited)
    double tol_active = 1e-6;
};

// Primal objective. Cells with density below 1e-11 carry no congestion cost:
// on the numerical zero set the admissible momentum vanishes, and the
// extended-value branch of ell is discontinuous against rounding noise there.
double primal_value(const ProblemSpec& spec, const CellField& m, const FaceField& w);

// Recovers (p, mu) from the discrete equilibrium row
//   g := f(.,m) + lambda + laplacian(u) - H(beta),  mu = g_+, p = g_-,
// where beta is the adjoint-exact conjugate momentum lifted from u, refined
// together with lambda by maximizing the concave dual objective.
Multipliers extract_multipliers(const ProblemSpec& spec, const CellField& m,
                                const CellField& u, double lambda);

// Dual objective at the multiplier point, with the pressure mass selected
// optimally for the box conjugate (always a valid lower bound).
double dual_objective(const ProblemSpec& spec, const Multipliers& mult);

// Dual objective with a caller-supplied pressure density: c = -lap u + H - p
// - lambda, a* the minimizer of F* over [c, inf). Returns -inf when rho = 0
// and the constraint cannot be met (indicator conjugate).
double dual_objective_with_pressure(const ProblemSpec& spec, const Multipliers& mult,
                                    const CellField& p);

// Fokker-Planck consistency: || w - m_face * grad_fstar(-grad u) || relative,
// evaluated face by face with the transverse gradient reconstructed by
// averaging. Discretization-limited away from smooth regimes.
double fp_residual(const ProblemSpec& spec, const CellField& m, const FaceField& w,
                   const CellField& u);

// (<p, 1-m>, <mu, m>) as discrete integrals, density clamped to [0,1].
std::pair<double, double> complementarity(const ProblemSpec& spec, const CellField& m,
                                          const Multipliers& mult);

// integral of p plus the duality pairing
//   lambda + integral of [f(x,m) - (1/q')|grad u|^{q'}] m - <grad m, grad u>,
// with the cell gradient taken from the lifted conjugate momentum.
double weak_concentration(const ProblemSpec& spec, const CellField& m,
                          const CellField& u, const Multipliers& mult);

struct ActiveSets {
    std::vector<int> zero;      // m <= tol
    std::vector<int> positive;  // complement
    std::vector<int> interior;  // tol < m < 1 - tol
};
ActiveSets active_sets(const CellField& m, double tol_active);

Certificate certify(const ProblemSpec& spec, const CellField& m, const FaceField& w,
                    const CellField& u, double lambda, const CertifyConfig& cfg = {});

// Flat key=value block with stable key names.
std::string certificate_to_text(const Certificate& c);
Certificate certificate_from_text(const std::string& text);

// Minimum-norm cell momentum X with face_to_cell_adjoint(X) = -gradient(u).
CellVecField lift_conjugate_momentum(const Grid& g, const CellField& u);

}  // namespace mfg
