// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mfg/certificates.hpp"
#include "mfg/field_io.hpp"
#include "mfg/run_config.hpp"
#include "mfg/runner.hpp"
#include "mfg/solver.hpp"
#include "test_support.hpp"

using namespace mfg;
using mfg::test::TempDir;

namespace {

struct Outcome {
    int id;
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

std::vector<Outcome> outcomes;

class Criterion {
public:
    Criterion(int id, std::string name) : id_(id), name_(std::move(name)) {
        start_ = std::chrono::steady_clock::now();
    }
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass_ = false;
            failures_ += (failures_.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& s) { notes_ += (notes_.empty() ? "" : " ") + s; }
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }
    ~Criterion() {
        const double t = elapsed();
        std::string detail = pass_ ? notes_ : failures_;
        outcomes.push_back({id_, name_, pass_, detail, t});
        std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n", pass_ ? "PASS" : "FAIL", id_,
                    name_.c_str(), t, detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
    }

private:
    int id_;
    std::string name_;
    bool pass_ = true;
    std::string failures_;
    std::string notes_;
    std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path write_text_file(const std::filesystem::path& p,
                                      const std::string& text) {
    std::ofstream out(p);
    out << text;
    return p;
}

std::string uniform_config(const std::string& out_dir) {
    std::ostringstream cfg;
    cfg << "domain.extent = 2 2\ndomain.cells = 64 64\n";
    cfg << "congestion.q = 2\ncongestion.r = 3\ncongestion.eps = 1e-3\n";
    cfg << "coupling.potential = uniform\ncoupling.v0 = 0\n";
    cfg << "coupling.rho = 1\ncoupling.theta = 1\n";
    cfg << "output.dir = " << out_dir << "\n";
    return cfg.str();
}

ProblemSpec cosine_well_spec() {
    const Grid g = Grid::make_2d(2.0, 2.0, 64, 64);
    return ProblemSpec(g, CongestionParams(2.0, 3.0, 1e-3),
                       Coupling(potential_cosine_well(g, 1.0, {1.0, 1.0}, 0.8), 0.1, 1.0));
}

ProblemSpec deep_well_spec() {
    // pressure-activating well: support area pi/4 < 1, depth far beyond the
    // kinetic scale, weakly increasing coupling rho = 0.05
    const Grid g = Grid::make_2d(2.0, 2.0, 64, 64);
    return ProblemSpec(g, CongestionParams(2.0, 3.0, 1e-3),
                       Coupling(potential_cosine_well(g, 60.0, {1.0, 1.0}, 0.5), 0.05, 1.0));
}

const CongestionParams kParamSets[4] = {
    CongestionParams::pure(2.0), CongestionParams(2.0, 3.0, 1.0),
    CongestionParams(1.5, 3.0, 0.1), CongestionParams::pure(4.0)};

}  // namespace

static void criterion_1_and_9(const TempDir& tmp) {
    std::filesystem::path run_dir = tmp.path / "uniform";
    {
        Criterion c(1, "analytic uniform equilibrium at 64x64");
        RunnerOptions opt;
        opt.config_path =
            write_text_file(tmp.path / "uniform.ini", uniform_config(run_dir.string()))
                .string();
        const int code = cmd_solve(opt);
        c.require(code == kExitOk, "cmd_solve exit " + std::to_string(code));

        const Grid g = Grid::make_2d(2.0, 2.0, 64, 64);
        const CellField m = read_cell_field(run_dir / "m.f64", g);
        const FaceField w = read_face_field(run_dir / "w.f64", g);
        const CellField p = read_cell_field(run_dir / "p.f64", g);
        const CellField mu = read_cell_field(run_dir / "mu.f64", g);
        double dev = 0.0;
        for (double v : m) dev = std::max(dev, std::abs(v - 0.25));
        c.require(dev <= 1e-4, "max|m - 1/4| = " + fmt(dev));
        const double wn = norm_l2(g, w);
        c.require(wn <= 1e-6, "|w|_2 = " + fmt(wn));
        const Certificate cert = certificate_from_text(slurp(run_dir / "certificate.txt"));
        c.require(std::abs(cert.lambda + 0.25) <= 1e-3,
                  "lambda = " + fmt(cert.lambda));
        c.require(cert.gap <= 1e-5, "gap = " + fmt(cert.gap));
        const double pm = integrate(g, p), mm = integrate(g, mu);
        c.require(pm <= 1e-6 && mm <= 1e-6,
                  "multiplier mass p = " + fmt(pm) + ", mu = " + fmt(mm));
        c.require(c.elapsed() <= 60.0, "runtime over 60 s");
        c.note("max|m-1/4|=" + fmt(dev) + " gap=" + fmt(cert.gap) +
               " lambda=" + fmt(cert.lambda));
    }
    {
        Criterion c(9, "round-trip certification and byte-identical rerun");
        const int code = cmd_certify(run_dir.string());
        c.require(code == kExitOk, "cmd_certify exit " + std::to_string(code));

        const std::filesystem::path rerun_dir = tmp.path / "uniform_rerun";
        RunnerOptions opt;
        opt.config_path = (tmp.path / "uniform.ini").string();
        opt.out_dir = rerun_dir.string();
        const int code2 = cmd_solve(opt);
        c.require(code2 == kExitOk, "rerun exit " + std::to_string(code2));
        c.require(slurp(run_dir / "m.f64") == slurp(rerun_dir / "m.f64"),
                  "m.f64 differs between reruns");
        c.require(slurp(run_dir / "u.f64") == slurp(rerun_dir / "u.f64"),
                  "u.f64 differs between reruns");
        c.require(slurp(run_dir / "certificate.txt") ==
                      slurp(rerun_dir / "certificate.txt"),
                  "certificate differs between reruns");
        c.note("certify=0, reruns byte-identical");
    }
}

static void criterion_2() {
    Criterion c(2, "strong duality at optima, weak duality on feasible points");
    const ProblemSpec uspec(Grid::make_2d(2.0, 2.0, 64, 64),
                            CongestionParams(2.0, 3.0, 1e-3),
                            Coupling(potential_uniform(Grid::make_2d(2.0, 2.0, 64, 64), 0.0),
                                     1.0, 1.0));
    const Solution usol = solve(uspec, SolverConfig{});
    const double ugap =
        usol.certificate.gap / (1.0 + std::abs(usol.certificate.primal_value));
    c.require(ugap <= 1e-5, "uniform relative gap = " + fmt(ugap));

    const ProblemSpec wspec = cosine_well_spec();
    const Solution wsol = solve(wspec, SolverConfig{});
    const double wgap =
        wsol.certificate.gap / (1.0 + std::abs(wsol.certificate.primal_value));
    c.require(wgap <= 1e-5, "well relative gap = " + fmt(wgap));

    std::mt19937_64 rng(2024);
    const Grid gsmall = Grid::make_2d(2.0, 2.0, 24, 24);
    const ProblemSpec fspec(gsmall, CongestionParams(2.0, 3.0, 1e-3),
                            Coupling(potential_cosine_well(gsmall, 1.0, {1.0, 1.0}, 0.8),
                                     0.1, 1.0));
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto pt = mfg::test::random_feasible(gsmall, rng);
        const Certificate cert = certify(fspec, pt.m, pt.w, pt.u, pt.lambda);
        const double margin = cert.gap / (1.0 + std::abs(cert.primal_value));
        worst = std::min(worst, margin);
    }
    c.require(worst >= -1e-10, "weak duality margin = " + fmt(worst));
    c.note("gap_rel uniform=" + fmt(ugap) + " well=" + fmt(wgap) +
           " fuzz_min=" + fmt(worst));
}

static void criterion_3(Solution& deep_sol) {
    Criterion c(3, "congestion activation on the deep well");
    const ProblemSpec spec = deep_well_spec();
    deep_sol = solve(spec, SolverConfig{});
    double mmax = 0.0;
    for (double v : deep_sol.m) mmax = std::max(mmax, v);
    c.require(mmax >= 1.0 - 1e-4, "max m = " + fmt(mmax));
    const Multipliers mult =
        extract_multipliers(spec, deep_sol.m, deep_sol.u, deep_sol.lambda);
    const double pmass = integrate(spec.grid, mult.p);
    c.require(pmass > 0.0, "pressure mass = " + fmt(pmass));
    const Certificate& cert = deep_sol.certificate;
    c.require(cert.compl_pressure <= 1e-4, "compl_p = " + fmt(cert.compl_pressure));
    c.require(cert.compl_exclusion <= 1e-4, "compl_mu = " + fmt(cert.compl_exclusion));
    c.require(cert.weak_concentration <= 1e-4,
              "weak concentration = " + fmt(cert.weak_concentration));
    c.require(c.elapsed() <= 300.0, "runtime over 5 min");
    c.note("max m=" + fmt(mmax) + " p mass=" + fmt(pmass) +
           " weak_conc=" + fmt(cert.weak_concentration));
}

static void criterion_4() {
    Criterion c(4, "kernel oracle equivalence");
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(0.0, 8.0);
    double worst_h = 0.0;
    for (const auto& p : kParamSets) {
        for (int i = 0; i < 1000; ++i) {
            const double s = mag(rng);
            worst_h = std::max(worst_h,
                               std::abs(hamiltonian_magnitude(s, p) -
                                        mfg::test::conjugate_oracle(s, p.q, p.r, p.eps)));
        }
    }
    c.require(worst_h <= 1e-8, "hamiltonian vs oracle = " + fmt(worst_h));

    std::uniform_real_distribution<double> coord(-3.0, 3.0), shift(0.0, 3.0),
        ang(0.0, 2.0 * M_PI);
    double worst_pj = 0.0;
    for (const auto& p : kParamSets) {
        for (int pt = 0; pt < 25; ++pt) {
            ConjugatePair x{std::abs(coord(rng)) + 0.05, {coord(rng), coord(rng)}};
            if (conjugate_slack(x, p) <= 0.0) x.alpha += hamiltonian(x.beta, p) + 0.5;
            const ConjugatePair pj = project_conjugate(x, p);
            auto dist2 = [&](const ConjugatePair& y) {
                const double da = y.alpha - x.alpha;
                const double d0 = y.beta[0] - x.beta[0], d1 = y.beta[1] - x.beta[1];
                return da * da + d0 * d0 + d1 * d1;
            };
            const double dp = dist2(pj);
            for (int s = 0; s < 10000; ++s) {
                const double a = ang(rng), tau = shift(rng);
                ConjugatePair y{0.0, {tau * std::cos(a), tau * std::sin(a)}};
                y.alpha = -hamiltonian(y.beta, p) - (s % 3 == 0 ? 0.0 : shift(rng));
                worst_pj = std::max(worst_pj, dp - dist2(y));
            }
        }
    }
    c.require(worst_pj <= 1e-9, "projection suboptimality = " + fmt(worst_pj));

    std::uniform_real_distribution<double> av(-1.5, 2.0), bv(0.0, 2.5), taus(0.3, 2.0);
    double worst_px = 0.0;
    for (const auto& p : kParamSets) {
        for (int i = 0; i < 250; ++i) {
            const double a0 = av(rng), s0 = bv(rng), tau = taus(rng), t = ang(rng);
            const Vec b0{s0 * std::cos(t), s0 * std::sin(t)};
            const auto [pa, pb] = prox_ell(a0, b0, tau, p);
            const auto [oa, os] = mfg::test::prox_oracle(a0, s0, tau, p);
            worst_px = std::max(worst_px, std::abs(pa - oa));
            worst_px = std::max(worst_px, std::abs(vec_norm(pb) - os));
        }
    }
    c.require(worst_px <= 1e-6, "prox vs brute force = " + fmt(worst_px));
    c.require(c.elapsed() <= 30.0, "runtime over 30 s");
    c.note("H err=" + fmt(worst_h) + " prox err=" + fmt(worst_px));
}

static void criterion_5() {
    Criterion c(5, "discrete operator exactness");
    const Grid g = Grid::make_2d(2.0, 2.0, 4, 4);
    const int n = g.total_cells();
    const int nf = g.face_count(0) + g.face_count(1);
    double adjoint_err = 0.0;
    for (int cidx = 0; cidx < n; ++cidx) {
        CellField e = make_cell_field(g);
        e[cidx] = 1.0;
        const FaceField gcol = gradient(g, e);
        int row = 0;
        for (int k = 0; k < 2; ++k)
            for (double gval : gcol.axis[k]) {
                FaceField ef = make_face_field(g);
                (row < g.face_count(0) ? ef.axis[0][row]
                                       : ef.axis[1][row - g.face_count(0)]) = 1.0;
                const CellField dcol = divergence(g, ef);
                adjoint_err = std::max(adjoint_err, std::abs(dcol[cidx] + gval));
                ++row;
            }
    }
    (void)nf;
    c.require(adjoint_err <= 1e-13, "adjointness = " + fmt(adjoint_err));

    double prev = 0.0;
    bool ratios_ok = true;
    std::string ratio_note;
    for (int ncells : {16, 32, 64, 128}) {
        const Grid g1 = Grid::make_1d(2.0, ncells);
        CellField rhs = make_cell_field(g1), exact = make_cell_field(g1);
        for (int i = 0; i < ncells; ++i) {
            const double x = g1.cell_center(i)[0];
            exact[i] = std::cos(0.5 * M_PI * x);
            rhs[i] = 0.25 * M_PI * M_PI * exact[i];
        }
        const CellField sol = neumann_poisson(g1, rhs, 0.0);
        double err = 0.0;
        for (int i = 0; i < ncells; ++i) err = std::max(err, std::abs(sol[i] - exact[i]));
        if (prev > 0.0) {
            const double ratio = prev / err;
            ratios_ok = ratios_ok && ratio >= 3.6 && ratio <= 4.4;
            ratio_note += (ratio_note.empty() ? "" : ",") + fmt(ratio);
        }
        prev = err;
    }
    c.require(ratios_ok, "convergence ratios " + ratio_note);
    c.note("adjointness=" + fmt(adjoint_err) + " ratios=" + ratio_note);
}

static void criterion_6() {
    Criterion c(6, "subdifferential Fenchel equality");
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mass(1e-3, 2.0), mom(-4.0, 4.0);
    double worst_eq = 0.0, worst_slack = 0.0;
    for (const auto& p : kParamSets) {
        for (int i = 0; i < 250; ++i) {
            const double m = mass(rng);
            const Vec w{mom(rng) * m, mom(rng) * m};
            const ConjugatePair sg = subdiff_element(m, w, p);
            const double fenchel = sg.alpha * m + sg.beta[0] * w[0] + sg.beta[1] * w[1];
            const double value = ell(m, w, p);
            worst_eq = std::max(worst_eq,
                                std::abs(fenchel - value) / (1.0 + std::abs(value)));
            worst_slack = std::max(worst_slack, conjugate_slack(sg, p));
        }
    }
    c.require(worst_eq <= 1e-10, "Fenchel equality error = " + fmt(worst_eq));
    c.require(worst_slack <= 1e-12, "admissibility slack = " + fmt(worst_slack));
    c.note("eq err=" + fmt(worst_eq));
}

static void criterion_7() {
    Criterion c(7, "homotopy stability over the eps schedule");
    const ProblemSpec spec = deep_well_spec();
    const HomotopyResult hr =
        homotopy_solve(spec, {1e-1, 1e-2, 1e-3, 1e-4}, SolverConfig{});
    std::string deltas;
    bool decreasing = true;
    for (size_t k = 0; k < hr.m_distances.size(); ++k) {
        if (k > 0) decreasing = decreasing && hr.m_distances[k] < hr.m_distances[k - 1];
        deltas += (deltas.empty() ? "" : ",") + fmt(hr.m_distances[k]);
    }
    c.require(decreasing, "stage distances not strictly decreasing: " + deltas);
    c.require(hr.stages.back().certificate.pass, "final-stage certificate failed");
    c.require(c.elapsed() <= 900.0, "runtime over 15 min");
    c.note("deltas=" + deltas);
}

static void criterion_8() {
    Criterion c(8, "uniqueness trace under different seeds");
    const ProblemSpec spec = cosine_well_spec();
    SolverConfig cfg;
    cfg.seed = 1;
    const Solution a = solve(spec, cfg);
    cfg.seed = 2;
    const Solution b = solve(spec, cfg);
    CellField diff = a.m;
    for (size_t i = 0; i < diff.size(); ++i) diff[i] -= b.m[i];
    const double d = norm_l2(spec.grid, diff);
    c.require(d <= 1e-5, "|m1 - m2|_2 = " + fmt(d));
    c.note("|m1-m2|_2=" + fmt(d));
}

int main() {
    TempDir tmp("acceptance");
    criterion_1_and_9(tmp);
    criterion_2();
    Solution deep_sol;
    criterion_3(deep_sol);
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();

    int failures = 0;
    for (const auto& o : outcomes)
        if (!o.pass) ++failures;
    std::printf("acceptance: %zu criteria, %d failed\n", outcomes.size(), failures);
    return failures == 0 ? 0 : 1;
}
