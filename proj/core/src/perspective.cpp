#include "mfg/perspective.hpp"

#include <cmath>
#include <limits>

namespace mfg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Safeguarded Newton for a monotone increasing residual with phi(lo) <= 0 <= phi(hi).
template <class F, class DF>
double newton_bisect(F&& phi, DF&& dphi, double lo, double hi, double tol,
                     const char* what) {
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = phi(t);
        if (std::abs(f) <= tol) return t;
        if (f > 0.0)
            hi = t;
        else
            lo = t;
        if (hi - lo <= 1e-15 * (1.0 + hi)) return 0.5 * (lo + hi);
        const double d = dphi(t);
        double next = (std::isfinite(d) && d > 0.0) ? t - f / d : lo;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        t = next;
    }
    throw NoConvergence(what, 200);
}
}  // namespace

double vec_norm(const Vec& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1]); }

CongestionParams::CongestionParams(double q_, double r_, double eps_)
    : q(q_), r(r_), eps(eps_) {
    if (!(q > 1.0)) throw SpecError("congestion exponent q must exceed 1");
    if (eps < 0.0) throw SpecError("congestion eps must be nonnegative");
    if (eps > 0.0 && !(r > 1.0))
        throw SpecError("regularization exponent r must exceed 1 when eps > 0");
    q_conj = q / (q - 1.0);
    r_conj = (r > 1.0) ? r / (r - 1.0) : q_conj;
}

void CongestionParams::validate_for_dim(int dim) const {
    if (eps == 0.0) {
        if (!(q > dim))
            throw SpecError("direct regime needs q > dim = " + std::to_string(dim) +
                            "; enable the eps-regularization with r > dim instead");
    } else {
        if (!(r > dim))
            throw SpecError("regularized regime needs r > dim = " + std::to_string(dim));
    }
}

double ell(double a, const Vec& b, const CongestionParams& p) {
    const double nb = vec_norm(b);
    if (a > 0.0) {
        double value = std::pow(nb, p.q) / (p.q * std::pow(a, p.q - 1.0));
        if (p.eps > 0.0)
            value += p.eps * std::pow(nb, p.r) / (p.r * std::pow(a, p.r - 1.0));
        return value;
    }
    if (a == 0.0 && nb == 0.0) return 0.0;
    return kInf;
}

double fstar_magnitude(double s, const CongestionParams& p) {
    if (!(s > 0.0)) return 0.0;
    if (p.eps == 0.0)
        return p.q == 2.0 ? s : std::pow(s, 1.0 / (p.q - 1.0));
    if (p.q == 2.0 && p.r == 3.0)
        return 2.0 * s / (1.0 + std::sqrt(1.0 + 4.0 * p.eps * s));

    double hi = std::pow(s, 1.0 / (p.q - 1.0));
    hi = std::min(hi, std::pow(s / p.eps, 1.0 / (p.r - 1.0)));
    if (!std::isfinite(hi)) hi = std::pow(s / p.eps, 1.0 / (p.r - 1.0));
    auto phi = [&](double t) {
        return std::pow(t, p.q - 1.0) + p.eps * std::pow(t, p.r - 1.0) - s;
    };
    auto dphi = [&](double t) {
        return (p.q - 1.0) * std::pow(t, p.q - 2.0) +
               p.eps * (p.r - 1.0) * std::pow(t, p.r - 2.0);
    };
    return newton_bisect(phi, dphi, 0.0, hi, 1e-15 * (1.0 + s), "fstar_magnitude");
}

Vec grad_fstar(const Vec& z, const CongestionParams& p) {
    const double nz = vec_norm(z);
    if (nz == 0.0) return {0.0, 0.0};
    const double t = fstar_magnitude(nz, p);
    return {t * z[0] / nz, t * z[1] / nz};
}

double g_magnitude(double s, const CongestionParams& p) {
    if (!(s > 0.0)) return 0.0;
    double value = std::pow(s, p.q) / p.q_conj;
    if (p.eps > 0.0) value += p.eps * std::pow(s, p.r) / p.r_conj;
    return value;
}

double hamiltonian_magnitude(double s, const CongestionParams& p) {
    if (!(s > 0.0)) return 0.0;
    if (p.eps == 0.0) return std::pow(s, p.q_conj) / p.q_conj;
    return g_magnitude(fstar_magnitude(s, p), p);
}

double hamiltonian(const Vec& z, const CongestionParams& p) {
    return hamiltonian_magnitude(vec_norm(z), p);
}

double hamiltonian_inverse(double c, const CongestionParams& p) {
    if (!(c > 0.0)) return 0.0;
    double sigma;
    if (p.eps == 0.0) {
        sigma = std::pow(p.q_conj * c, 1.0 / p.q);
        return std::pow(sigma, p.q - 1.0);
    }
    double hi = std::pow(p.q_conj * c, 1.0 / p.q);
    hi = std::min(hi, std::pow(p.r_conj * c / p.eps, 1.0 / p.r));
    auto phi = [&](double t) { return g_magnitude(t, p) - c; };
    auto dphi = [&](double t) {
        return std::pow(t, p.q - 1.0) + p.eps * std::pow(t, p.r - 1.0);
    };
    sigma = newton_bisect(phi, dphi, 0.0, hi, 1e-15 * (1.0 + c), "hamiltonian_inverse");
    return std::pow(sigma, p.q - 1.0) + p.eps * std::pow(sigma, p.r - 1.0);
}

double conjugate_slack(const ConjugatePair& x, const CongestionParams& p) {
    return x.alpha + hamiltonian(x.beta, p);
}

ConjugatePair project_conjugate(const ConjugatePair& x, const CongestionParams& p) {
    const double nb = vec_norm(x.beta);
    const double slack = x.alpha + hamiltonian_magnitude(nb, p);
    if (slack <= 0.0) return x;
    if (nb == 0.0) return {0.0, {0.0, 0.0}};

    // KKT condition in the radial variable tau = |beta_projected|:
    //   psi(tau) = tau + (alpha + H(tau)) * H'(tau) - |beta| = 0
    // on [tau_lo, |beta|] where the multiplier alpha + H(tau) >= 0. One inner
    // solve per evaluation: t = H'(tau), H = G(t), psi' = 1 + (alpha+H)/F''(t)
    // + t^2 (the curvature term degenerates at t = 0 for q > 2; the bisection
    // safeguard covers it).
    const double tau_lo = x.alpha >= 0.0 ? 0.0 : hamiltonian_inverse(-x.alpha, p);
    auto eval = [&](double tau, double& dpsi) {
        const double t = fstar_magnitude(tau, p);
        const double mult = x.alpha + g_magnitude(t, p);
        double fpp = (p.q - 1.0) * std::pow(t, p.q - 2.0);
        if (p.eps > 0.0) fpp += p.eps * (p.r - 1.0) * std::pow(t, p.r - 2.0);
        dpsi = 1.0 + ((std::isfinite(fpp) && fpp > 0.0) ? mult / fpp : 0.0) + t * t;
        return tau - nb + mult * t;
    };
    double lo = tau_lo, hi = nb, tau = 0.5 * (tau_lo + nb);
    const double tol = 1e-12 * (1.0 + nb);
    int it = 0;
    for (; it < 200; ++it) {
        double slope;
        const double f = eval(tau, slope);
        if (std::abs(f) <= tol) break;
        (f > 0.0 ? hi : lo) = tau;
        if (hi - lo <= 1e-15 * (1.0 + hi)) {
            tau = 0.5 * (lo + hi);
            break;
        }
        double next = (std::isfinite(slope) && slope > 0.0) ? tau - f / slope : lo;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        tau = next;
    }
    if (it >= 200) throw NoConvergence("project_conjugate", 200);

    ConjugatePair out;
    out.alpha = -hamiltonian_magnitude(tau, p);
    out.beta = {tau * x.beta[0] / nb, tau * x.beta[1] / nb};
    return out;
}

std::pair<double, Vec> prox_ell(double a, const Vec& b, double tau,
                                const CongestionParams& p) {
    if (!(tau > 0.0)) throw SpecError("prox_ell needs tau > 0");
    const ConjugatePair pj =
        project_conjugate({a / tau, {b[0] / tau, b[1] / tau}}, p);
    double a_out = a - tau * pj.alpha;
    Vec b_out{b[0] - tau * pj.beta[0], b[1] - tau * pj.beta[1]};
    if (a_out < 0.0) a_out = 0.0;  // apex rounding guard
    return {a_out, b_out};
}

ConjugatePair subdiff_element(double m, const Vec& w, const CongestionParams& p) {
    if (m < 0.0) throw InfeasiblePoint("subdifferential undefined for m < 0");
    const double nw = vec_norm(w);
    if (m == 0.0) {
        if (nw != 0.0)
            throw InfeasiblePoint("subdifferential undefined at m = 0 with w != 0");
        return {0.0, {0.0, 0.0}};
    }
    const double s = nw / m;
    ConjugatePair out;
    out.alpha = -g_magnitude(s, p);
    if (nw == 0.0) {
        out.beta = {0.0, 0.0};
    } else {
        const double grad = std::pow(s, p.q - 1.0) +
                            (p.eps > 0.0 ? p.eps * std::pow(s, p.r - 1.0) : 0.0);
        out.beta = {grad * w[0] / nw, grad * w[1] / nw};
    }
    return out;
}

}  // namespace mfg
