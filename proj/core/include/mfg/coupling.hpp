#pragma once

#include "mfg/grid.hpp"

namespace mfg {

// Local coupling f(x, m) = V(x) + rho * sign(m) |m|^theta with antiderivative
// F(x, m) = V(x) m + rho |m|^{theta+1} / (theta+1) and explicit conjugate F*.
// rho >= 0 keeps f non-decreasing in m; rho > 0 makes it strictly increasing
// (which is what guarantees a unique equilibrium density).
struct Coupling {
    CellField V;
    double rho = 0.0;
    double theta = 1.0;

    Coupling(CellField potential, double rho, double theta);

    bool strictly_increasing() const { return rho > 0.0; }

    // f(x_i, 1), the largest coupling value on the box [0, 1].
    double f_upper(int i) const { return V[i] + rho; }
};

// Potential catalog.
CellField potential_uniform(const Grid& g, double v0);
// Radial cosine-squared well of given depth and radius about `center`
// (C^1, compactly supported, flat at the rim).
CellField potential_cosine_well(const Grid& g, double depth, std::array<double, 2> center,
                                double radius);
CellField potential_two_well(const Grid& g, double depth1, std::array<double, 2> c1,
                             double r1, double depth2, std::array<double, 2> c2,
                             double r2);

double f_eval(const Coupling& c, int i, double m);
double F_eval(const Coupling& c, int i, double m);

// Legendre transform F*(x, a) = sup_m { a m - F(x, m) }. For rho = 0 this is
// the indicator-type conjugate of a linear function: 0 at a = V(x), +inf else.
double fstar_eval(const Coupling& c, int i, double a);

// d/da F*(x, a) where defined (rho > 0): the maximizing m.
double fstar_prime(const Coupling& c, int i, double a);

// argmin over m in [0,1] of (m - m0)^2 / (2 tau) + F(x, m).
double prox_coupling_box(const Coupling& c, double m0, int i, double tau);

}  // namespace mfg
