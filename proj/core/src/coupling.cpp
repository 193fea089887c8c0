#include "mfg/coupling.hpp"

#include <cmath>
#include <limits>

namespace mfg {

Coupling::Coupling(CellField potential, double rho_, double theta_)
    : V(std::move(potential)), rho(rho_), theta(theta_) {
    if (rho < 0.0) throw SpecError("coupling strength rho must be nonnegative");
    if (theta < 1.0) throw SpecError("coupling exponent theta must be at least 1");
    if (V.empty()) throw SpecError("coupling potential is empty");
}

CellField potential_uniform(const Grid& g, double v0) {
    return make_cell_field(g, v0);
}

namespace {
double well_value(const Grid& g, int i, double depth, std::array<double, 2> center,
                  double radius) {
    const auto x = g.cell_center(i);
    double d2 = 0.0;
    for (int k = 0; k < g.dim; ++k) d2 += (x[k] - center[k]) * (x[k] - center[k]);
    const double d = std::sqrt(d2);
    if (d >= radius) return 0.0;
    const double c = std::cos(0.5 * M_PI * d / radius);
    return -depth * c * c;
}
}  // namespace

CellField potential_cosine_well(const Grid& g, double depth, std::array<double, 2> center,
                                double radius) {
    if (!(radius > 0.0)) throw SpecError("well radius must be positive");
    CellField v = make_cell_field(g);
    for (int i = 0; i < g.total_cells(); ++i)
        v[i] = well_value(g, i, depth, center, radius);
    return v;
}

CellField potential_two_well(const Grid& g, double depth1, std::array<double, 2> c1,
                             double r1, double depth2, std::array<double, 2> c2,
                             double r2) {
    if (!(r1 > 0.0) || !(r2 > 0.0)) throw SpecError("well radius must be positive");
    CellField v = make_cell_field(g);
    for (int i = 0; i < g.total_cells(); ++i)
        v[i] = well_value(g, i, depth1, c1, r1) + well_value(g, i, depth2, c2, r2);
    return v;
}

double f_eval(const Coupling& c, int i, double m) {
    const double power =
        c.theta == 1.0 ? m : std::copysign(std::pow(std::abs(m), c.theta), m);
    return c.V[i] + c.rho * power;
}

double F_eval(const Coupling& c, int i, double m) {
    return c.V[i] * m + c.rho * std::pow(std::abs(m), c.theta + 1.0) / (c.theta + 1.0);
}

double fstar_eval(const Coupling& c, int i, double a) {
    const double d = a - c.V[i];
    if (c.rho == 0.0)
        return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    if (c.theta == 1.0) return d * d / (2.0 * c.rho);
    return std::pow(c.rho, -1.0 / c.theta) * (c.theta / (c.theta + 1.0)) *
           std::pow(std::abs(d), (c.theta + 1.0) / c.theta);
}

double fstar_prime(const Coupling& c, int i, double a) {
    const double d = a - c.V[i];
    if (c.theta == 1.0) return d / c.rho;
    return std::copysign(std::pow(std::abs(d) / c.rho, 1.0 / c.theta), d);
}

double prox_coupling_box(const Coupling& c, double m0, int i, double tau) {
    if (!(tau > 0.0)) throw SpecError("prox_coupling_box needs tau > 0");
    if (c.theta == 1.0) {
        const double m = (m0 - tau * c.V[i]) / (1.0 + tau * c.rho);
        return std::min(1.0, std::max(0.0, m));
    }
    auto psi = [&](double m) { return (m - m0) / tau + f_eval(c, i, m); };
    if (psi(0.0) >= 0.0) return 0.0;
    if (psi(1.0) <= 0.0) return 1.0;
    double lo = 0.0, hi = 1.0, m = 0.5;
    const double scale = 1.0 + std::abs(m0) / tau + std::abs(c.V[i]) + c.rho;
    for (int it = 0; it < 200; ++it) {
        const double f = psi(m);
        if (std::abs(f) <= 1e-14 * scale) return m;
        (f > 0.0 ? hi : lo) = m;
        if (hi - lo <= 1e-16) return 0.5 * (lo + hi);
        const double d = 1.0 / tau + c.rho * c.theta * std::pow(m, c.theta - 1.0);
        double next = m - f / d;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        m = next;
    }
    throw NoConvergence("prox_coupling_box", 200);
}

}  // namespace mfg
