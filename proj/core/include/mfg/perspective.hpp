#pragma once

#include <array>
#include <utility>

#include "mfg/errors.hpp"
#include "mfg/grid.hpp"

namespace mfg {

// Point in R^d, d <= 2; the unused component stays zero in 1-D.
using Vec = std::array<double, 2>;

double vec_norm(const Vec& v);

// Exponents of the congestion kernel
//   F(y) = (1/q)|y|^q + (eps/r)|y|^r,
// its dual weights q' = q/(q-1), r' = r/(r-1), and the perspective cost
//   ell(a, b) = a * F(b/a) for a > 0, 0 at (0,0), +inf otherwise.
struct CongestionParams {
    double q;
    double r;
    double eps;
    double q_conj;
    double r_conj;

    CongestionParams(double q, double r, double eps);

    static CongestionParams pure(double q) { return {q, q, 0.0}; }

    bool regularized() const { return eps > 0.0; }

    // Growth regime required by the model: q > dim when eps = 0, r > dim
    // when eps > 0. Throws SpecError.
    void validate_for_dim(int dim) const;
};

// Perspective congestion cost; +inf encodes infeasibility, never NaN.
double ell(double a, const Vec& b, const CongestionParams& p);

// Radial inverse of y -> |y|^{q-2} y + eps |y|^{r-2} y: the magnitude t >= 0
// solving t^{q-1} + eps t^{r-1} = s. Safeguarded Newton, tolerance 1e-12.
double fstar_magnitude(double s, const CongestionParams& p);

// grad F*(z): the vector colinear with z of magnitude fstar_magnitude(|z|).
Vec grad_fstar(const Vec& z, const CongestionParams& p);

// G(y) = (1/q')|y|^q + (eps/r')|y|^r as a function of |y|.
double g_magnitude(double s, const CongestionParams& p);

// H(z) = G(grad F*(z)) = F*(z); radial, convex, H(0) = 0.
double hamiltonian_magnitude(double s, const CongestionParams& p);
double hamiltonian(const Vec& z, const CongestionParams& p);

// Radial inverse of hamiltonian_magnitude (c >= 0).
double hamiltonian_inverse(double c, const CongestionParams& p);

// A conjugate-space point (alpha, beta); admissible when alpha + H(beta) <= 0.
struct ConjugatePair {
    double alpha = 0.0;
    Vec beta{};
};

double conjugate_slack(const ConjugatePair& x, const CongestionParams& p);

// Euclidean projection onto the conjugate set {alpha + H(beta) <= 0}.
// Interior points are fixed; the result satisfies the constraint exactly.
ConjugatePair project_conjugate(const ConjugatePair& x, const CongestionParams& p);

// prox of tau * ell via the Moreau identity
//   prox_{tau ell}(x) = x - tau * project_conjugate(x / tau).
std::pair<double, Vec> prox_ell(double a, const Vec& b, double tau,
                                const CongestionParams& p);

// The closed-form subgradient selection of ell at (m, w):
// for m > 0, v = w/m, alpha = -G(v), beta = grad F(v); the apex selection
// (0, 0) at (m, w) = (0, 0). Throws InfeasiblePoint outside dom ell.
ConjugatePair subdiff_element(double m, const Vec& w, const CongestionParams& p);

// Cell-sampled conjugate pair (alpha, beta), pointwise admissible.
struct SubgradientField {
    CellField alpha;
    CellVecField beta;
};

}  // namespace mfg
