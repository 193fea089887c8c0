#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "mfg/field_io.hpp"
#include "mfg/run_config.hpp"
#include "mfg/runner.hpp"
#include "test_support.hpp"

using namespace mfg;
using mfg::test::TempDir;

namespace {

std::string base_config(const std::string& out_dir, int cells = 12) {
    std::ostringstream cfg;
    cfg << "domain.extent = 2 2\n";
    cfg << "domain.cells = " << cells << " " << cells << "\n";
    cfg << "congestion.q = 2\ncongestion.r = 3\ncongestion.eps = 1e-3\n";
    cfg << "coupling.potential = uniform\ncoupling.v0 = 0\n";
    cfg << "coupling.rho = 1\ncoupling.theta = 1\n";
    cfg << "output.dir = " << out_dir << "\n";
    return cfg.str();
}

std::filesystem::path write_config(const TempDir& tmp, const std::string& text,
                                   const std::string& name = "run.ini") {
    const auto path = tmp.path / name;
    std::ofstream out(path);
    out << text;
    return path;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("config parser: sections, dotted keys, rejection rules") {
    const std::string text =
        "[domain]\nextent = 2 2\ncells = 8 8\n"
        "[congestion]\nq = 2\nr = 3\neps = 1e-3\n"
        "coupling.potential = uniform\ncoupling.rho = 1\n"
        "# a comment\noutput.dir = x\n";
    const RunConfig cfg = RunConfig::parse_text(text);
    CHECK(cfg.q == 2.0);
    CHECK(cfg.cells == std::vector<int>{8, 8});
    CHECK(cfg.solve_eps() == doctest::Approx(1e-3));

    CHECK_THROWS_AS(RunConfig::parse_text(text + "nonsense.key = 1\n"), SpecError);
    CHECK_THROWS_AS(RunConfig::parse_text(text + "domain.extent = 2 2\n"), SpecError);
    CHECK_THROWS_AS(
        RunConfig::parse_text(text + "congestion.eps_schedule = 1e-1 1e-2\n"),
        SpecError);
    CHECK_THROWS_AS(RunConfig::parse_text("domain.extent = 2 2\n"), SpecError);

    std::string sched = text;
    sched.replace(sched.find("eps = 1e-3"), 10, "eps_schedule = 1e-1 1e-2");
    const RunConfig scfg = RunConfig::parse_text(sched);
    CHECK_THROWS_AS(scfg.solve_eps(), SpecError);
    CHECK(scfg.sweep_schedule().size() == 2);
}

TEST_CASE("cmd_solve: domain measure and growth regime map to config errors") {
    TempDir tmp("cli_cfg");
    {
        std::string text = base_config((tmp.path / "out").string());
        text.replace(text.find("extent = 2 2"), 12, "extent = 1 1");
        RunnerOptions opt;
        opt.config_path = write_config(tmp, text, "bad_measure.ini").string();
        CHECK(cmd_solve(opt) == kExitConfigError);
    }
    {
        std::string text = base_config((tmp.path / "out").string());
        text.replace(text.find("eps = 1e-3"), 10, "eps = 0");
        RunnerOptions opt;
        opt.config_path = write_config(tmp, text, "bad_regime.ini").string();
        CHECK(cmd_solve(opt) == kExitConfigError);
    }
    {
        RunnerOptions opt;
        opt.config_path = (tmp.path / "does_not_exist.ini").string();
        CHECK(cmd_solve(opt) == kExitConfigError);
    }
}

TEST_CASE("cmd_solve + cmd_certify: round trip, artifacts, reproducibility") {
    TempDir tmp("cli_solve");
    const auto out1 = tmp.path / "run1";
    RunnerOptions opt;
    opt.config_path = write_config(tmp, base_config(out1.string())).string();
    CHECK(cmd_solve(opt) == kExitOk);

    for (const char* f :
         {"m.f64", "w_axis0.f64", "w_axis1.f64", "u.f64", "p.f64", "mu.f64",
          "convergence.csv", "certificate.txt", "manifest.ini"})
        CHECK(std::filesystem::exists(out1 / f));

    {
        std::ifstream csv(out1 / "convergence.csv");
        std::string header;
        std::getline(csv, header);
        CHECK(header == "iter,primal_res,dual_res,gap,objective,mass_error");
    }

    CHECK(cmd_certify(out1.string()) == kExitOk);

    // byte-identical rerun under the same seed
    const auto out2 = tmp.path / "run2";
    RunnerOptions opt2;
    opt2.config_path = write_config(tmp, base_config(out2.string()), "run2.ini").string();
    CHECK(cmd_solve(opt2) == kExitOk);
    CHECK(slurp(out1 / "m.f64") == slurp(out2 / "m.f64"));
    CHECK(slurp(out1 / "u.f64") == slurp(out2 / "u.f64"));
    CHECK(slurp(out1 / "certificate.txt") == slurp(out2 / "certificate.txt"));

    // seed override still certifies
    RunnerOptions opt3;
    opt3.config_path = opt2.config_path;
    opt3.out_dir = (tmp.path / "run3").string();
    opt3.seed = 99;
    CHECK(cmd_solve(opt3) == kExitOk);
}

TEST_CASE("cmd_certify: tamper and missing-file paths") {
    TempDir tmp("cli_certify");
    const auto out = tmp.path / "run";
    RunnerOptions opt;
    opt.config_path = write_config(tmp, base_config(out.string())).string();
    REQUIRE(cmd_solve(opt) == kExitOk);

    // value-level tamper through the writer: certificate keys change -> exit 1
    {
        const RunConfig cfg = RunConfig::parse_file(opt.config_path);
        const Grid g = cfg.make_grid();
        CellField m = read_cell_field(out / "m.f64", g);
        m[0] += 0.1;
        write_cell_field(out / "m.f64", g, m);
    }
    CHECK(cmd_certify(out.string()) == kExitVerdictFail);

    std::filesystem::remove(out / "m.f64");
    CHECK(cmd_certify(out.string()) == kExitIoError);
    CHECK(cmd_certify((tmp.path / "nowhere").string()) == kExitIoError);
}

TEST_CASE("cmd_sweep: stage artifacts and schedule validation") {
    TempDir tmp("cli_sweep");
    const auto out = tmp.path / "sweep";
    std::string text = base_config(out.string());
    text.replace(text.find("eps = 1e-3"), 10, "eps_schedule = 1e-2 1e-3");
    RunnerOptions opt;
    opt.config_path = write_config(tmp, text).string();
    CHECK(cmd_sweep(opt) == kExitOk);
    CHECK(std::filesystem::exists(out / "sweep.csv"));
    CHECK(std::filesystem::exists(out / "stage_00" / "certificate.txt"));
    CHECK(std::filesystem::exists(out / "stage_01" / "m.f64"));
    CHECK(cmd_certify((out / "stage_01").string()) == kExitOk);
    {
        std::ifstream csv(out / "sweep.csv");
        std::string header;
        std::getline(csv, header);
        CHECK(header == "eps,delta_m_l2,gap");
    }

    std::string bad = base_config((tmp.path / "bad").string());
    bad.replace(bad.find("eps = 1e-3"), 10, "eps_schedule = 1e-3 1e-2");
    RunnerOptions opt_bad;
    opt_bad.config_path = write_config(tmp, bad, "bad.ini").string();
    CHECK(cmd_sweep(opt_bad) == kExitConfigError);

    // single-entry schedule writes the same density as a direct solve
    std::string single = base_config((tmp.path / "single").string());
    single.replace(single.find("eps = 1e-3"), 10, "eps_schedule = 1e-2");
    RunnerOptions opt_single;
    opt_single.config_path = write_config(tmp, single, "single.ini").string();
    CHECK(cmd_sweep(opt_single) == kExitOk);
    std::string direct = base_config((tmp.path / "direct").string());
    direct.replace(direct.find("eps = 1e-3"), 10, "eps = 1e-2");
    RunnerOptions opt_direct;
    opt_direct.config_path = write_config(tmp, direct, "direct.ini").string();
    CHECK(cmd_solve(opt_direct) == kExitOk);
    CHECK(slurp(tmp.path / "single" / "stage_00" / "m.f64") ==
          slurp(tmp.path / "direct" / "m.f64"));
}

TEST_CASE("cmd_solve: max_iter writes artifacts and exits 3") {
    TempDir tmp("cli_maxiter");
    const auto out = tmp.path / "run";
    std::string text = base_config(out.string());
    text.replace(text.find("coupling.potential = uniform"), 28,
                 "coupling.potential = cosine_well");
    text += "coupling.depth = 8\ncoupling.radius = 0.6\nsolver.max_iter = 6\n";
    RunnerOptions opt;
    opt.config_path = write_config(tmp, text).string();
    CHECK(cmd_solve(opt) == kExitMaxIter);
    CHECK(std::filesystem::exists(out / "m.f64"));
    CHECK(std::filesystem::exists(out / "certificate.txt"));
}

TEST_CASE("cmd_solve: potential from a grid field file") {
    TempDir tmp("cli_vfile");
    const Grid g = Grid::make_2d(2.0, 2.0, 12, 12);
    CellField V = make_cell_field(g);
    for (int i = 0; i < g.total_cells(); ++i) {
        const auto x = g.cell_center(i);
        V[i] = -0.5 * std::cos(0.25 * M_PI * x[0]);
    }
    write_cell_field(tmp.path / "V.f64", g, V);
    std::string text = base_config((tmp.path / "run").string());
    text.replace(text.find("coupling.potential = uniform"), 28,
                 "coupling.potential = file");
    text += "coupling.file = V.f64\n";
    RunnerOptions opt;
    opt.config_path = write_config(tmp, text).string();
    CHECK(cmd_solve(opt) == kExitOk);
    // the run dir is self-contained: the potential is copied next to the fields
    CHECK(std::filesystem::exists(tmp.path / "run" / "V.f64"));
    CHECK(cmd_certify((tmp.path / "run").string()) == kExitOk);
}

TEST_CASE("cmd_solve: 1-D direct regime end to end") {
    TempDir tmp("cli_1d");
    std::ostringstream cfg;
    cfg << "domain.extent = 2\ndomain.cells = 48\n";
    cfg << "congestion.q = 3\ncongestion.eps = 0\n";
    cfg << "coupling.potential = two_well\ncoupling.depth = 2\n";
    cfg << "coupling.center = 0.5\ncoupling.radius = 0.4\n";
    cfg << "coupling.depth2 = 1\ncoupling.center2 = 1.5\ncoupling.radius2 = 0.3\n";
    cfg << "coupling.rho = 0.2\ncoupling.theta = 1\n";
    cfg << "output.dir = " << (tmp.path / "run").string() << "\n";
    RunnerOptions opt;
    opt.config_path = write_config(tmp, cfg.str()).string();
    CHECK(cmd_solve(opt) == kExitOk);
    CHECK(cmd_certify((tmp.path / "run").string()) == kExitOk);
}

TEST_CASE("selftest passes clean and fails under injection") {
    CHECK(cmd_selftest(false) == kExitOk);
    CHECK(cmd_selftest(true) == kExitVerdictFail);
}
