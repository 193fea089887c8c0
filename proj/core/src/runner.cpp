#include "mfg/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "mfg/certificates.hpp"
#include "mfg/field_io.hpp"
#include "mfg/run_config.hpp"
#include "mfg/solver.hpp"
#include "mfg/version.hpp"

namespace mfg {

namespace {

namespace fs = std::filesystem;

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int resolve_threads(const RunnerOptions& opt, int config_threads) {
    if (opt.threads > 0) return opt.threads;
    if (const char* env = std::getenv("MFG_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return config_threads;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("short write to " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string convergence_csv(const Solution& sol) {
    std::ostringstream out;
    out << "iter,primal_res,dual_res,gap,objective,mass_error\n";
    for (const auto& rec : sol.history)
        out << rec.iter << "," << g17(rec.primal_res) << "," << g17(rec.dual_res) << ","
            << g17(rec.gap) << "," << g17(rec.objective) << "," << g17(rec.mass_error)
            << "\n";
    return out.str();
}

void write_run_dir(const fs::path& dir, const ProblemSpec& spec, const RunConfig& cfg,
                   const Solution& sol, const std::string& command,
                   const std::string& status, std::optional<double> stage_eps) {
    fs::create_directories(dir);
    write_cell_field(dir / "m.f64", spec.grid, sol.m);
    write_face_field(dir / "w.f64", spec.grid, sol.w);
    write_cell_field(dir / "u.f64", spec.grid, sol.u);

    const Multipliers mult = extract_multipliers(spec, sol.m, sol.u, sol.lambda);
    write_cell_field(dir / "p.f64", spec.grid, mult.p);
    write_cell_field(dir / "mu.f64", spec.grid, mult.mu);

    write_text(dir / "convergence.csv", convergence_csv(sol));
    write_text(dir / "certificate.txt", certificate_to_text(sol.certificate));

    RunConfig echo_cfg = cfg;
    if (stage_eps) {  // per-stage manifests pin the stage epsilon
        echo_cfg.eps = *stage_eps;
        echo_cfg.eps_schedule.clear();
    }
    if (cfg.potential == "file") {
        // keep run directories self-contained so certify can rebuild the spec
        write_cell_field(dir / "V.f64", spec.grid, spec.coupling.V);
        echo_cfg.potential_file = "V.f64";
    }

    std::ostringstream man;
    man << "run.tool = mfg " << kVersion << "\n";
    man << "run.command = " << command << "\n";
    man << "run.status = " << status << "\n";
    man << "run.seed = " << cfg.solver.seed << "\n";
    man << "run.lambda_solver = " << g17(sol.lambda) << "\n";
    man << "run.iterations = " << sol.iterations << "\n";
    man << echo_cfg.echo();
    write_text(dir / "manifest.ini", man.str());
}

struct LoadedRun {
    RunConfig cfg;
    std::map<std::string, std::string> run_keys;
};

LoadedRun load_manifest(const fs::path& dir) {
    const std::string text = read_text(dir / "manifest.ini");
    std::istringstream in(text);
    std::string line, config_part;
    LoadedRun out;
    while (std::getline(in, line)) {
        if (line.rfind("run.", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                const auto b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            out.run_keys[trim(line.substr(4, eq - 4))] = trim(line.substr(eq + 1));
        } else {
            config_part += line + "\n";
        }
    }
    out.cfg = RunConfig::parse_text(config_part, dir);
    return out;
}

int solve_into(const RunConfig& cfg, const fs::path& out_dir) {
    const ProblemSpec spec = cfg.make_spec(cfg.solve_eps());
    Solution sol;
    std::string status = "converged";
    int code = kExitOk;
    try {
        sol = solve(spec, cfg.solver);
    } catch (const MaxIterExceeded& e) {
        sol = e.best;
        status = "max_iter";
        code = kExitMaxIter;
    }
    write_run_dir(out_dir, spec, cfg, sol, "solve", status, std::nullopt);
    std::cout << "solve: iterations=" << sol.iterations
              << " objective=" << g17(sol.objective)
              << " gap=" << g17(sol.certificate.gap)
              << " lambda=" << g17(sol.lambda)
              << " verdict=" << (sol.certificate.pass ? "pass" : "fail") << "\n";
    if (code == kExitOk && !sol.certificate.pass) code = kExitVerdictFail;
    return code;
}

RunConfig configure(const RunnerOptions& opt) {
    RunConfig cfg = RunConfig::parse_file(opt.config_path);
    cfg.solver.threads = resolve_threads(opt, cfg.solver.threads);
    if (opt.seed) cfg.solver.seed = *opt.seed;
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (cfg.out_dir.empty())
        throw SpecError("no output directory (set output.dir or pass --out)");
    cfg.solver.validate();
    return cfg;
}

}  // namespace

int cmd_solve(const RunnerOptions& opt) {
    try {
        const RunConfig cfg = configure(opt);
        return solve_into(cfg, cfg.out_dir);
    } catch (const SpecError& e) {
        std::cout << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const IoError& e) {
        std::cout << "io error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cout << "error: " << e.what() << "\n";
        return kExitIoError;
    }
}

int cmd_certify(const std::string& run_dir) {
    try {
        const fs::path dir = run_dir;
        const LoadedRun run = load_manifest(dir);
        const ProblemSpec spec = run.cfg.make_spec(run.cfg.solve_eps());

        const CellField m = read_cell_field(dir / "m.f64", spec.grid);
        const FaceField w = read_face_field(dir / "w.f64", spec.grid);
        const CellField u = read_cell_field(dir / "u.f64", spec.grid);
        const CellField p_stored = read_cell_field(dir / "p.f64", spec.grid);
        const CellField mu_stored = read_cell_field(dir / "mu.f64", spec.grid);

        auto it = run.run_keys.find("lambda_solver");
        if (it == run.run_keys.end()) throw IoError("manifest missing run.lambda_solver");
        const double lambda = std::strtod(it->second.c_str(), nullptr);

        const Certificate fresh = certify(spec, m, w, u, lambda);
        const Certificate stored =
            certificate_from_text(read_text(dir / "certificate.txt"));

        bool match = true;
        auto check = [&](const char* key, double a, double b) {
            if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(b))) {
                std::cout << "certify: key " << key << " mismatch: recomputed " << g17(a)
                          << " vs stored " << g17(b) << "\n";
                match = false;
            }
        };
        check("primal_value", fresh.primal_value, stored.primal_value);
        check("dual_value", fresh.dual_value, stored.dual_value);
        check("gap", fresh.gap, stored.gap);
        check("hjb_residual", fresh.hjb_residual, stored.hjb_residual);
        check("fp_residual", fresh.fp_residual, stored.fp_residual);
        check("compl_p", fresh.compl_pressure, stored.compl_pressure);
        check("compl_mu", fresh.compl_exclusion, stored.compl_exclusion);
        check("weak_concentration", fresh.weak_concentration, stored.weak_concentration);
        check("lambda", fresh.lambda, stored.lambda);
        check("mass_error", fresh.mass_error, stored.mass_error);
        check("box_violation", fresh.box_violation, stored.box_violation);

        const Multipliers mult = extract_multipliers(spec, m, u, lambda);
        double field_diff = 0.0;
        for (size_t i = 0; i < mult.p.size(); ++i) {
            field_diff = std::max(field_diff, std::abs(mult.p[i] - p_stored[i]));
            field_diff = std::max(field_diff, std::abs(mult.mu[i] - mu_stored[i]));
        }
        if (field_diff > 1e-12) {
            std::cout << "certify: stored p/mu fields differ by " << g17(field_diff) << "\n";
            match = false;
        }

        std::cout << "certify: gap=" << g17(fresh.gap)
                  << " mass_error=" << g17(fresh.mass_error)
                  << " verdict=" << (fresh.pass ? "pass" : "fail")
                  << " match=" << (match ? "yes" : "no") << "\n";
        return (match && fresh.pass) ? kExitOk : kExitVerdictFail;
    } catch (const IoError& e) {
        std::cout << "io error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const SpecError& e) {
        std::cout << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cout << "error: " << e.what() << "\n";
        return kExitIoError;
    }
}

int cmd_sweep(const RunnerOptions& opt) {
    try {
        const RunConfig cfg = configure(opt);
        const std::vector<double>& schedule = cfg.sweep_schedule();
        const fs::path dir = cfg.out_dir;
        fs::create_directories(dir);

        const ProblemSpec spec = cfg.make_spec(schedule.front());
        HomotopyResult result;
        int code = kExitOk;
        try {
            result = homotopy_solve(spec, schedule, cfg.solver);
        } catch (const MaxIterExceeded& e) {
            std::cout << "sweep: " << e.what() << "\n";
            char name[32];
            std::snprintf(name, sizeof(name), "stage_%02d", std::max(e.stage, 0));
            write_run_dir(dir / name, spec.with_eps(schedule[std::max(e.stage, 0)]), cfg,
                          e.best, "sweep", "max_iter", schedule[std::max(e.stage, 0)]);
            return kExitMaxIter;
        }

        std::ostringstream csv;
        csv << "eps,delta_m_l2,gap\n";
        for (size_t k = 0; k < result.stages.size(); ++k) {
            const Solution& sol = result.stages[k];
            char name[32];
            std::snprintf(name, sizeof(name), "stage_%02zu", k);
            write_run_dir(dir / name, spec.with_eps(schedule[k]), cfg, sol, "sweep",
                          "converged", schedule[k]);
            const double delta =
                k == 0 ? std::numeric_limits<double>::quiet_NaN() : result.m_distances[k - 1];
            csv << g17(schedule[k]) << "," << g17(delta) << ","
                << g17(sol.certificate.gap) << "\n";
            if (!sol.certificate.pass) code = kExitVerdictFail;
            std::cout << "sweep stage " << k << ": eps=" << g17(schedule[k])
                      << " iterations=" << sol.iterations << " gap="
                      << g17(sol.certificate.gap) << " delta_m=" << g17(delta) << "\n";
        }
        write_text(dir / "sweep.csv", csv.str());

        std::ostringstream man;
        man << "run.tool = mfg " << kVersion << "\n";
        man << "run.command = sweep\n";
        man << "run.stages = " << result.stages.size() << "\n";
        man << "run.seed = " << cfg.solver.seed << "\n";
        man << cfg.echo();
        write_text(dir / "manifest.ini", man.str());
        return code;
    } catch (const SpecError& e) {
        std::cout << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const IoError& e) {
        std::cout << "io error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cout << "error: " << e.what() << "\n";
        return kExitIoError;
    }
}

namespace {

// Independent conjugate oracle: sup_{t >= 0} s t - t^q/q - eps t^r/r by
// golden-section search. Used only to cross-check the Hamiltonian kernels.
double conjugate_oracle(double s, double q, double r, double eps) {
    auto value = [&](double t) {
        double v = s * t - std::pow(t, q) / q;
        if (eps > 0.0) v -= eps * std::pow(t, r) / r;
        return v;
    };
    double hi = std::pow(s, 1.0 / (q - 1.0)) + 1.0;
    double lo = 0.0;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = value(x1), f2 = value(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = value(x1);
        }
    }
    return std::max(value(0.5 * (lo + hi)), 0.0);
}

struct SuiteResult {
    std::string name;
    double max_error;
    double threshold;
};

SuiteResult conjugacy_suite(double q, double r, double eps, bool inject) {
    const CongestionParams p = eps > 0.0 ? CongestionParams(q, r, eps)
                                         : CongestionParams::pure(q);
    std::mt19937_64 rng(20240u + static_cast<unsigned>(q * 100));
    std::uniform_real_distribution<double> mag(0.0, 8.0);
    double max_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double s = mag(rng);
        double h = hamiltonian_magnitude(s, p);
        if (inject) h += 1e-6;
        max_err = std::max(max_err, std::abs(h - conjugate_oracle(s, q, r, eps)));
    }
    std::ostringstream name;
    name << "conjugacy q=" << q << " eps=" << eps;
    if (eps > 0.0) name << " r=" << r;
    return {name.str(), max_err, 1e-8};
}

SuiteResult moreau_suite() {
    const CongestionParams p(2.0, 3.0, 0.5);
    std::mt19937_64 rng(7u);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    std::uniform_real_distribution<double> taus(0.2, 3.0);
    double max_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = coord(rng);
        const Vec b{coord(rng), coord(rng)};
        const double tau = taus(rng);
        const auto [pa, pb] = prox_ell(a, b, tau, p);
        const auto pj = project_conjugate({a / tau, {b[0] / tau, b[1] / tau}}, p);
        max_err = std::max(max_err, std::abs(pa + tau * pj.alpha - a));
        max_err = std::max(max_err, std::abs(pb[0] + tau * pj.beta[0] - b[0]));
        max_err = std::max(max_err, std::abs(pb[1] + tau * pj.beta[1] - b[1]));
    }
    return {"moreau identity", max_err, 1e-12};
}

SuiteResult adjointness_suite() {
    const Grid g = Grid::make_2d(2.0, 2.0, 4, 4);
    const int n = g.total_cells();
    const int nf = g.face_count(0) + g.face_count(1);
    // Assemble gradient (faces x cells) and divergence (cells x faces).
    std::vector<double> G(static_cast<size_t>(nf) * n, 0.0);
    std::vector<double> D(static_cast<size_t>(n) * nf, 0.0);
    for (int c = 0; c < n; ++c) {
        CellField e = make_cell_field(g);
        e[c] = 1.0;
        const FaceField col = gradient(g, e);
        int row = 0;
        for (int k = 0; k < g.dim; ++k)
            for (double v : col.axis[k]) G[static_cast<size_t>(row++) * n + c] = v;
    }
    for (int f = 0; f < nf; ++f) {
        FaceField e = make_face_field(g);
        if (f < g.face_count(0))
            e.axis[0][f] = 1.0;
        else
            e.axis[1][f - g.face_count(0)] = 1.0;
        const CellField col = divergence(g, e);
        for (int c = 0; c < n; ++c) D[static_cast<size_t>(c) * nf + f] = col[c];
    }
    double max_err = 0.0;
    for (int c = 0; c < n; ++c)
        for (int f = 0; f < nf; ++f)
            max_err = std::max(
                max_err, std::abs(D[static_cast<size_t>(c) * nf + f] +
                                  G[static_cast<size_t>(f) * n + c]));
    return {"gradient/divergence adjointness", max_err, 1e-13};
}

SuiteResult poisson_suite() {
    double prev_err = 0.0;
    double max_dev = 0.0;
    for (int n : {32, 64, 128}) {
        const Grid g = Grid::make_1d(2.0, n);
        CellField rhs = make_cell_field(g), exact = make_cell_field(g);
        const double k = 0.5 * M_PI;
        for (int i = 0; i < n; ++i) {
            const double x = g.cell_center(i)[0];
            exact[i] = std::cos(k * x);
            rhs[i] = k * k * exact[i];
        }
        const CellField sol = neumann_poisson(g, rhs, 0.0);
        double err = 0.0;
        for (int i = 0; i < n; ++i) err = std::max(err, std::abs(sol[i] - exact[i]));
        if (prev_err > 0.0) max_dev = std::max(max_dev, std::abs(prev_err / err - 4.0));
        prev_err = err;
    }
    return {"poisson manufactured convergence (ratio-4)", max_dev, 0.4};
}

}  // namespace

int cmd_selftest(bool debug_fail) {
    std::vector<SuiteResult> suites;
    suites.push_back(conjugacy_suite(2.0, 0.0, 0.0, debug_fail));
    suites.push_back(conjugacy_suite(2.0, 3.0, 1.0, false));
    suites.push_back(conjugacy_suite(1.5, 3.0, 0.1, false));
    suites.push_back(conjugacy_suite(4.0, 0.0, 0.0, false));
    suites.push_back(moreau_suite());
    suites.push_back(adjointness_suite());
    suites.push_back(poisson_suite());

    bool ok = true;
    std::printf("%-44s %12s %12s %s\n", "suite", "max_error", "threshold", "result");
    for (const auto& s : suites) {
        const bool pass = s.max_error <= s.threshold;
        ok = ok && pass;
        std::printf("%-44s %12.3e %12.3e %s\n", s.name.c_str(), s.max_error, s.threshold,
                    pass ? "pass" : "FAIL");
    }
    return ok ? kExitOk : kExitVerdictFail;
}

}  // namespace mfg
