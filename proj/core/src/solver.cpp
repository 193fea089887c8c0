#include "mfg/solver.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <thread>

namespace mfg {

namespace {

void parallel_for(int n, int threads, const std::function<void(int, int)>& body) {
    if (threads <= 1 || n < 4 * threads) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

void remove_mean(const Grid& g, CellField& x) {
    const double mean = integrate(g, x) / g.domain_measure();
    for (double& v : x) v -= mean;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(penalty > 0.0)) throw SpecError("solver penalty must be positive");
    if (max_iter < 1) throw SpecError("solver max_iter must be positive");
    if (!(tol_primal > 0.0) || !(tol_dual > 0.0) || !(tol_gap > 0.0) ||
        !(inner_tol > 0.0))
        throw SpecError("solver tolerances must be positive");
    if (check_every < 1) throw SpecError("solver check_every must be positive");
    if (threads < 1) throw SpecError("solver thread count must be positive");
    if (init_perturbation < 0.0)
        throw SpecError("init_perturbation must be nonnegative");
}

AffineProjector::AffineProjector(const Grid& g, double tol)
    : grid_(g), spectral_(g), tol_(tol) {}

AffineProjector::Result AffineProjector::project(const CellField& v1a,
                                                 const CellVecField& v1b,
                                                 const CellField& v2,
                                                 CellField& phi) const {
    const int n = grid_.total_cells();
    CellField r_m(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) r_m[i] = v1a[i] + v2[i];
    const FaceField r_w = face_to_cell_adjoint(grid_, v1b);

    // Schur complement in the PDE multiplier:
    //   [ (1/2) lap^2 - div (A^T A)^{-1} grad ] phi = -(1/2) lap r_m + div (A^T A)^{-1} r_w
    auto apply_schur = [&](const CellField& x) {
        CellField out = laplacian(grid_, laplacian(grid_, x));
        const CellField d = divergence(grid_, face_mass_solve(grid_, gradient(grid_, x)));
        for (int i = 0; i < n; ++i) out[i] = 0.5 * out[i] - d[i];
        return out;
    };

    CellField rhs = laplacian(grid_, r_m);
    {
        const CellField d = divergence(grid_, face_mass_solve(grid_, r_w));
        for (int i = 0; i < n; ++i) rhs[i] = -0.5 * rhs[i] + d[i];
    }
    remove_mean(grid_, rhs);

    if (phi.size() != static_cast<size_t>(n)) phi.assign(static_cast<size_t>(n), 0.0);
    remove_mean(grid_, phi);

    const double b_norm = norm_l2(grid_, rhs);
    int iterations = 0;
    if (b_norm > 0.0) {
        CellField r = apply_schur(phi);
        for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
        CellField z = spectral_.projection_preconditioner(r);
        CellField p = z;
        double rz = dot(grid_, r, z);
        const int cap = 500;
        while (norm_l2(grid_, r) > tol_ * b_norm) {
            if (++iterations > cap) throw NoConvergence("affine projection CG", cap);
            const CellField ap = apply_schur(p);
            const double alpha = rz / dot(grid_, p, ap);
            for (int i = 0; i < n; ++i) phi[i] += alpha * p[i];
            for (int i = 0; i < n; ++i) r[i] -= alpha * ap[i];
            z = spectral_.projection_preconditioner(r);
            const double rz_new = dot(grid_, r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
        remove_mean(grid_, phi);
    }

    Result out;
    out.nu = (integrate(grid_, r_m) - 2.0) / grid_.domain_measure();
    const CellField lphi = laplacian(grid_, phi);
    out.m.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out.m[i] = 0.5 * (r_m[i] + lphi[i] - out.nu);
    FaceField rw_g = gradient(grid_, phi);
    for (int k = 0; k < grid_.dim; ++k)
        for (size_t i = 0; i < rw_g.axis[k].size(); ++i)
            rw_g.axis[k][i] += r_w.axis[k][i];
    out.w = face_mass_solve(grid_, rw_g);
    out.cg_iterations = iterations;
    return out;
}

std::pair<CellField, FaceField> feasible_init(const ProblemSpec& spec) {
    const double m0 = 1.0 / spec.grid.domain_measure();
    return {make_cell_field(spec.grid, m0), make_face_field(spec.grid)};
}

ConsensusState initial_state(const ProblemSpec& spec, const SolverConfig& config) {
    config.validate();
    const Grid& g = spec.grid;
    ConsensusState s;
    auto [m, w] = feasible_init(spec);

    if (config.init_perturbation > 0.0) {
        std::mt19937_64 rng(config.seed);
        std::uniform_real_distribution<double> noise(-1.0, 1.0);
        const double amp = config.init_perturbation / g.domain_measure();
        CellField target = m;
        for (double& v : target) v += amp * noise(rng);
        AffineProjector projector(g, config.inner_tol);
        CellField phi = make_cell_field(g);
        auto proj = projector.project(target, make_cell_vec_field(g), target, phi);
        m = std::move(proj.m);
        w = std::move(proj.w);
    }

    s.m = std::move(m);
    s.w = std::move(w);
    s.zeta1a = s.m;
    s.zeta1b = face_to_cell(g, s.w);
    s.zeta2 = s.m;
    s.zeta1a_prev = s.zeta1a;
    s.zeta1b_prev = s.zeta1b;
    s.zeta2_prev = s.zeta2;
    s.y1a = make_cell_field(g);
    s.y1b = make_cell_vec_field(g);
    s.y2 = make_cell_field(g);
    s.phi = make_cell_field(g);
    s.nu = 0.0;
    s.rho = config.penalty;
    return s;
}

namespace {

struct StackedNorms {
    double iz = 0.0;
    double zeta = 0.0;
    double gap = 0.0;  // || I z - zeta ||
};

StackedNorms consensus_gap(const Grid& g, const ConsensusState& s,
                           const CellVecField& b) {
    StackedNorms out;
    double gap2 = 0.0, iz2 = 0.0, zeta2 = 0.0;
    const int n = g.total_cells();
    for (int i = 0; i < n; ++i) {
        const double d1 = s.m[i] - s.zeta1a[i];
        const double d2 = s.m[i] - s.zeta2[i];
        gap2 += d1 * d1 + d2 * d2;
        iz2 += 2.0 * s.m[i] * s.m[i];
        zeta2 += s.zeta1a[i] * s.zeta1a[i] + s.zeta2[i] * s.zeta2[i];
    }
    for (int k = 0; k < g.dim; ++k)
        for (int i = 0; i < n; ++i) {
            const double d = b.comp[k][i] - s.zeta1b.comp[k][i];
            gap2 += d * d;
            iz2 += b.comp[k][i] * b.comp[k][i];
            zeta2 += s.zeta1b.comp[k][i] * s.zeta1b.comp[k][i];
        }
    out.gap = std::sqrt(g.cell_volume * gap2);
    out.iz = std::sqrt(g.cell_volume * iz2);
    out.zeta = std::sqrt(g.cell_volume * zeta2);
    return out;
}

// || I^T (da, db, d2) || for the dual residual and its scaling.
double stacked_adjoint_norm(const Grid& g, const CellField& da, const CellVecField& db,
                            const CellField& d2) {
    const int n = g.total_cells();
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = da[i] + d2[i];
        s2 += v * v;
    }
    const FaceField f = face_to_cell_adjoint(g, db);
    for (int k = 0; k < g.dim; ++k)
        for (double v : f.axis[k]) s2 += v * v;
    return std::sqrt(g.cell_volume * s2);
}

}  // namespace

Residuals compute_residuals(const ProblemSpec& spec, const ConsensusState& s) {
    const Grid& g = spec.grid;
    Residuals r;
    const CellVecField b = face_to_cell(g, s.w);
    const StackedNorms norms = consensus_gap(g, s, b);
    r.primal = norms.gap / (1.0 + std::max(norms.iz, norms.zeta));

    CellField da(s.m.size()), d2(s.m.size());
    CellVecField db = make_cell_vec_field(g);
    for (size_t i = 0; i < s.m.size(); ++i) {
        da[i] = s.zeta1a[i] - s.zeta1a_prev[i];
        d2[i] = s.zeta2[i] - s.zeta2_prev[i];
    }
    for (int k = 0; k < g.dim; ++k)
        for (size_t i = 0; i < s.m.size(); ++i)
            db.comp[k][i] = s.zeta1b.comp[k][i] - s.zeta1b_prev.comp[k][i];
    const double dual_raw = s.rho * stacked_adjoint_norm(g, da, db, d2);
    const double dual_scale = s.rho * stacked_adjoint_norm(g, s.y1a, s.y1b, s.y2);
    r.dual = dual_raw / (1.0 + dual_scale);

    CellField pde = laplacian(g, s.m);
    const CellField dw = divergence(g, s.w);
    for (size_t i = 0; i < pde.size(); ++i) pde[i] = -pde[i] + dw[i];
    r.pde = norm_l2(g, pde);
    r.mass = std::abs(integrate(g, s.m) - 1.0);
    double box = 0.0;
    for (double v : s.m) box = std::max(box, std::max(-v, v - 1.0));
    r.box = std::max(box, 0.0);
    return r;
}

namespace {

class AdmmEngine {
public:
    AdmmEngine(const ProblemSpec& spec, const SolverConfig& config)
        : spec_(spec), cfg_(config), projector_(spec.grid, config.inner_tol),
          state_(initial_state(spec, config)) {}

    void set_eps(double eps) { spec_ = spec_.with_eps(eps); }

    Solution run(int stage = -1) {
        std::vector<IterationRecord> history;
        history.reserve(static_cast<size_t>(cfg_.max_iter));
        double gap_rel = std::numeric_limits<double>::quiet_NaN();
        Certificate cert;
        bool cert_fresh = false;

        for (int iter = 1; iter <= cfg_.max_iter; ++iter) {
            step();
            const Residuals res = compute_residuals(spec_, state_);
            const double objective = primal_value(spec_, state_.m, state_.w);

            const bool cadence = (iter % cfg_.check_every == 0);
            const bool residuals_ok = res.primal <= cfg_.tol_primal &&
                                      res.dual <= cfg_.tol_dual &&
                                      res.box <= cfg_.tol_primal;
            cert_fresh = false;
            if (cadence && residuals_ok) {
                cert = make_certificate();
                gap_rel = cert.gap / (1.0 + std::abs(cert.primal_value));
                cert_fresh = true;
            }

            history.push_back({iter, res.primal, res.dual, gap_rel, objective, res.mass});

            if (cert_fresh && residuals_ok && gap_rel <= cfg_.tol_gap)
                return finalize(iter, std::move(history), cert);

            if (cadence && !residuals_ok) balance_penalty(res);
        }

        Solution best = finalize(cfg_.max_iter, std::move(history), make_certificate());
        throw MaxIterExceeded(std::move(best), compute_residuals(spec_, state_), stage);
    }

    const ConsensusState& state() const { return state_; }

private:
    void step() {
        const Grid& g = spec_.grid;
        const int n = g.total_cells();
        CellField v1a(static_cast<size_t>(n)), v2(static_cast<size_t>(n));
        CellVecField v1b = make_cell_vec_field(g);
        for (int i = 0; i < n; ++i) {
            v1a[i] = state_.zeta1a[i] - state_.y1a[i];
            v2[i] = state_.zeta2[i] - state_.y2[i];
        }
        for (int k = 0; k < g.dim; ++k)
            for (int i = 0; i < n; ++i)
                v1b.comp[k][i] = state_.zeta1b.comp[k][i] - state_.y1b.comp[k][i];

        auto proj = projector_.project(v1a, v1b, v2, state_.phi);
        state_.m = std::move(proj.m);
        state_.w = std::move(proj.w);
        state_.nu = proj.nu;

        const CellVecField b = face_to_cell(g, state_.w);
        state_.zeta1a_prev = state_.zeta1a;
        state_.zeta1b_prev = state_.zeta1b;
        state_.zeta2_prev = state_.zeta2;

        const double tau = 1.0 / state_.rho;
        const auto& params = spec_.congestion;
        const auto& coup = spec_.coupling;
        auto sweep = [&](int lo, int hi) {
            for (int i = lo; i < hi; ++i) {
                const double a_in = state_.m[i] + state_.y1a[i];
                Vec b_in{b.comp[0][i] + state_.y1b.comp[0][i],
                         g.dim == 2 ? b.comp[1][i] + state_.y1b.comp[1][i] : 0.0};
                auto [a_out, b_out] = prox_ell(a_in, b_in, tau, params);
                state_.zeta1a[i] = a_out;
                state_.zeta1b.comp[0][i] = b_out[0];
                if (g.dim == 2) state_.zeta1b.comp[1][i] = b_out[1];
                state_.zeta2[i] =
                    prox_coupling_box(coup, state_.m[i] + state_.y2[i], i, tau);
            }
        };
        parallel_for(n, cfg_.threads, sweep);

        for (int i = 0; i < n; ++i) {
            state_.y1a[i] += state_.m[i] - state_.zeta1a[i];
            state_.y2[i] += state_.m[i] - state_.zeta2[i];
        }
        for (int k = 0; k < g.dim; ++k)
            for (int i = 0; i < n; ++i)
                state_.y1b.comp[k][i] += b.comp[k][i] - state_.zeta1b.comp[k][i];
    }

    void balance_penalty(const Residuals& res) {
        double factor = 1.0;
        if (res.primal > 10.0 * res.dual)
            factor = 2.0;
        else if (res.dual > 10.0 * res.primal)
            factor = 0.5;
        if (factor == 1.0) return;
        const double next = state_.rho * factor;
        if (next < 1e-6 || next > 1e8) return;
        state_.rho = next;
        const double rescale = 1.0 / factor;  // keep the unscaled dual rho*y fixed
        for (double& v : state_.y1a) v *= rescale;
        for (double& v : state_.y2) v *= rescale;
        for (int k = 0; k < spec_.grid.dim; ++k)
            for (double& v : state_.y1b.comp[k]) v *= rescale;
    }

    CellField current_u() const {
        CellField u = state_.phi;
        for (double& v : u) v *= -state_.rho;
        const double mean = integrate(spec_.grid, u) / spec_.grid.domain_measure();
        for (double& v : u) v -= mean;
        return u;
    }

    Certificate make_certificate() const {
        CertifyConfig cc;
        cc.tol_gap = cfg_.tol_gap;
        cc.tol_feasibility = std::max(cfg_.tol_primal, 1e-9);
        cc.tol_complementarity = 10.0 * cfg_.tol_gap;
        return certify(spec_, state_.m, state_.w, current_u(), state_.rho * state_.nu, cc);
    }

    Solution finalize(int iterations, std::vector<IterationRecord> history,
                      Certificate cert) const {
        Solution sol;
        sol.m = state_.m;
        sol.w = state_.w;
        sol.u = current_u();
        sol.lambda = state_.rho * state_.nu;
        sol.objective = cert.primal_value;
        sol.iterations = iterations;
        sol.certificate = cert;
        sol.history = std::move(history);
        return sol;
    }

    ProblemSpec spec_;
    SolverConfig cfg_;
    AffineProjector projector_;
    ConsensusState state_;
};

}  // namespace

Solution solve(const ProblemSpec& spec, const SolverConfig& config) {
    AdmmEngine engine(spec, config);
    return engine.run();
}

HomotopyResult homotopy_solve(const ProblemSpec& spec,
                              const std::vector<double>& eps_schedule,
                              const SolverConfig& config) {
    if (eps_schedule.empty()) throw SpecError("homotopy schedule is empty");
    for (size_t k = 0; k < eps_schedule.size(); ++k) {
        if (!(eps_schedule[k] > 0.0))
            throw SpecError("homotopy schedule entries must be positive");
        if (k > 0 && !(eps_schedule[k] < eps_schedule[k - 1]))
            throw SpecError("homotopy schedule must be strictly decreasing");
    }
    CongestionParams(spec.congestion.q, spec.congestion.r, eps_schedule.front())
        .validate_for_dim(spec.grid.dim);

    HomotopyResult out;
    AdmmEngine engine(spec.with_eps(eps_schedule.front()), config);
    for (size_t k = 0; k < eps_schedule.size(); ++k) {
        engine.set_eps(eps_schedule[k]);
        Solution sol = engine.run(static_cast<int>(k));
        if (k > 0) {
            CellField diff = sol.m;
            for (size_t i = 0; i < diff.size(); ++i) diff[i] -= out.stages.back().m[i];
            out.m_distances.push_back(norm_l2(spec.grid, diff));
        }
        out.stages.push_back(std::move(sol));
    }
    return out;
}

}  // namespace mfg
