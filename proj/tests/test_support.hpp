#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/perspective.hpp"
#include "mfg/problem.hpp"

namespace mfg::test {

// ---- independent scalar oracles (no calls into the kernels under test) ----

// sup_{t >= 0} s t - t^q/q - eps t^r/r by golden-section search.
inline double conjugate_oracle(double s, double q, double r, double eps) {
    auto value = [&](double t) {
        double v = s * t - std::pow(t, q) / q;
        if (eps > 0.0) v -= eps * std::pow(t, r) / r;
        return v;
    };
    double lo = 0.0, hi = std::pow(s, 1.0 / (q - 1.0)) + 1.0;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = value(x1), f2 = value(x2);
    for (int it = 0; it < 220 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        if (f1 < f2) {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + phi * (hi - lo); f2 = value(x2);
        } else {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - phi * (hi - lo); f1 = value(x1);
        }
    }
    return std::max(value(0.5 * (lo + hi)), 0.0);
}

// min of a unimodal scalar function by golden-section, returning the argmin.
template <class F>
double golden_argmin(F&& f, double lo, double hi, int iters = 160) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iters && hi - lo > 1e-16 * (1.0 + hi); ++it) {
        if (f1 > f2) {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + phi * (hi - lo); f2 = f(x2);
        } else {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - phi * (hi - lo); f1 = f(x1);
        }
    }
    return 0.5 * (lo + hi);
}

// Brute-force prox of tau*ell at (a0, b0): 2-D minimization by grid search
// over the density component with nested golden-section in the radial
// momentum, then local refinement.
inline std::pair<double, double> prox_oracle(double a0, double b0_mag, double tau,
                                             const CongestionParams& p) {
    auto ell_scalar = [&](double a, double s) {
        if (a > 0.0) {
            double v = std::pow(s, p.q) / (p.q * std::pow(a, p.q - 1.0));
            if (p.eps > 0.0) v += p.eps * std::pow(s, p.r) / (p.r * std::pow(a, p.r - 1.0));
            return v;
        }
        if (a == 0.0 && s == 0.0) return 0.0;
        return std::numeric_limits<double>::infinity();
    };
    auto value_at = [&](double a) {
        auto inner = [&](double s) {
            return ell_scalar(a, s) + (s - b0_mag) * (s - b0_mag) / (2.0 * tau);
        };
        const double s_best = a > 0.0 ? golden_argmin(inner, 0.0, std::max(b0_mag, 1e-12))
                                      : 0.0;
        return inner(s_best) + (a - a0) * (a - a0) / (2.0 * tau);
    };
    const double slope_cap =
        std::pow(std::max(b0_mag, 1e-6) / 1e-2, p.q) +
        (p.eps > 0.0 ? p.eps * std::pow(std::max(b0_mag, 1e-6) / 1e-2, p.r) : 0.0);
    double hi = std::max(a0, 0.0) + tau * std::min(slope_cap, 1e4) + 1.0;
    double lo = 0.0;
    // coarse grid, then shrink around the best sample
    for (int round = 0; round < 4; ++round) {
        const int steps = 200;
        double best_a = lo, best_v = value_at(lo);
        for (int i = 1; i <= steps; ++i) {
            const double a = lo + (hi - lo) * i / steps;
            const double v = value_at(a);
            if (v < best_v) { best_v = v; best_a = a; }
        }
        const double width = (hi - lo) / steps;
        lo = std::max(0.0, best_a - 2.0 * width);
        hi = best_a + 2.0 * width;
    }
    const double a_best = golden_argmin(value_at, lo, hi);
    auto inner = [&](double s) {
        return ell_scalar(a_best, s) + (s - b0_mag) * (s - b0_mag) / (2.0 * tau);
    };
    const double s_best =
        a_best > 0.0 ? golden_argmin(inner, 0.0, std::max(b0_mag, 1e-12)) : 0.0;
    return {a_best, s_best};
}

// Adaptive Simpson quadrature.
template <class F>
double simpson_recurse(F&& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-13) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 40);
}

// ---- field generators -------------------------------------------------------

// Smooth strictly interior density with unit mass, plus the exactly
// PDE-compatible momentum w = gradient(m).
struct FeasiblePoint {
    CellField m;
    FaceField w;
    CellField u;
    double lambda;
};

inline CellField smooth_field(const Grid& g, std::mt19937_64& rng, double amplitude) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int modes = 3;
    std::vector<double> cx(modes), cy(modes), phase(modes);
    for (int k = 0; k < modes; ++k) {
        cx[k] = unit(rng);
        cy[k] = unit(rng);
        phase[k] = unit(rng);
    }
    CellField f = make_cell_field(g);
    for (int i = 0; i < g.total_cells(); ++i) {
        const auto x = g.cell_center(i);
        double v = 0.0;
        for (int k = 0; k < modes; ++k) {
            double term = cx[k] * std::cos((k + 1) * M_PI * x[0] / g.extent[0]);
            if (g.dim == 2) term *= std::cos((k + 1) * M_PI * x[1] / g.extent[1] + 0.0);
            v += term + 0.1 * phase[k];
        }
        f[i] = amplitude * v;
    }
    return f;
}

inline FeasiblePoint random_feasible(const Grid& g, std::mt19937_64& rng) {
    FeasiblePoint out;
    out.m = smooth_field(g, rng, 0.15);
    const double base = 1.0 / g.domain_measure();
    for (double& v : out.m) v = std::min(0.9, std::max(0.1 * base, base + v * base));
    const double mass = integrate(g, out.m);
    for (double& v : out.m) v /= mass;
    out.w = gradient(g, out.m);
    out.u = smooth_field(g, rng, 0.5);
    const double mean = integrate(g, out.u) / g.domain_measure();
    for (double& v : out.u) v -= mean;
    std::uniform_real_distribution<double> lam(-2.0, 2.0);
    out.lambda = lam(rng);
    return out;
}

// RAII temporary directory under the system tmp dir.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("mfg_test_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

}  // namespace mfg::test
