#include "mfg/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mfg/field_io.hpp"

namespace mfg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

std::vector<double> parse_doubles(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw SpecError("config key '" + key + "': bad number '" + tok + "'");
        out.push_back(v);
    }
    if (out.empty()) throw SpecError("config key '" + key + "' has no value");
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    const auto v = parse_doubles(key, value);
    if (v.size() != 1) throw SpecError("config key '" + key + "' expects one number");
    return v[0];
}

std::vector<int> parse_ints(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (double v : parse_doubles(key, value)) {
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw SpecError("config key '" + key + "' expects integers");
        out.push_back(i);
    }
    return out;
}

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_text(text.str(), path.has_parent_path() ? path.parent_path() : ".");
}

RunConfig RunConfig::parse_text(const std::string& text,
                                const std::filesystem::path& base_dir) {
    RunConfig cfg;
    cfg.base_dir = base_dir;

    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw SpecError("malformed section header: " + line);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw SpecError("malformed config line: " + line);
        std::string key = trim(line.substr(0, eq));
        // keys that carry their own section prefix bypass the open header
        if (!section.empty() && key.find('.') == std::string::npos)
            key = section + "." + key;
        if (kv.count(key)) throw SpecError("duplicate config key: " + key);
        kv[key] = trim(line.substr(eq + 1));
    }

    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto require = [&](const char* key) {
        auto v = take(key);
        if (!v) throw SpecError(std::string("config is missing required key '") + key + "'");
        return *v;
    };

    cfg.extent = parse_doubles("domain.extent", require("domain.extent"));
    cfg.cells = parse_ints("domain.cells", require("domain.cells"));
    cfg.q = parse_double("congestion.q", require("congestion.q"));
    if (auto v = take("congestion.r")) cfg.r = parse_double("congestion.r", *v);
    if (auto v = take("congestion.eps")) cfg.eps = parse_double("congestion.eps", *v);
    if (auto v = take("congestion.eps_schedule"))
        cfg.eps_schedule = parse_doubles("congestion.eps_schedule", *v);

    cfg.potential = require("coupling.potential");
    if (auto v = take("coupling.v0")) cfg.v0 = parse_double("coupling.v0", *v);
    if (auto v = take("coupling.depth")) cfg.depth = parse_double("coupling.depth", *v);
    if (auto v = take("coupling.center")) cfg.center = parse_doubles("coupling.center", *v);
    if (auto v = take("coupling.radius")) cfg.radius = parse_double("coupling.radius", *v);
    if (auto v = take("coupling.depth2")) cfg.depth2 = parse_double("coupling.depth2", *v);
    if (auto v = take("coupling.center2"))
        cfg.center2 = parse_doubles("coupling.center2", *v);
    if (auto v = take("coupling.radius2")) cfg.radius2 = parse_double("coupling.radius2", *v);
    if (auto v = take("coupling.file")) cfg.potential_file = *v;
    if (auto v = take("coupling.rho")) cfg.rho = parse_double("coupling.rho", *v);
    if (auto v = take("coupling.theta")) cfg.theta = parse_double("coupling.theta", *v);

    if (auto v = take("solver.tol_primal"))
        cfg.solver.tol_primal = parse_double("solver.tol_primal", *v);
    if (auto v = take("solver.tol_dual"))
        cfg.solver.tol_dual = parse_double("solver.tol_dual", *v);
    if (auto v = take("solver.tol_gap"))
        cfg.solver.tol_gap = parse_double("solver.tol_gap", *v);
    if (auto v = take("solver.max_iter"))
        cfg.solver.max_iter = parse_ints("solver.max_iter", *v).at(0);
    if (auto v = take("solver.penalty"))
        cfg.solver.penalty = parse_double("solver.penalty", *v);
    if (auto v = take("solver.inner_tol"))
        cfg.solver.inner_tol = parse_double("solver.inner_tol", *v);
    if (auto v = take("solver.seed")) {
        const double s = parse_double("solver.seed", *v);
        if (s < 0) throw SpecError("solver.seed must be nonnegative");
        cfg.solver.seed = static_cast<std::uint64_t>(s);
    }
    if (auto v = take("solver.init_perturbation"))
        cfg.solver.init_perturbation = parse_double("solver.init_perturbation", *v);
    if (auto v = take("solver.check_every"))
        cfg.solver.check_every = parse_ints("solver.check_every", *v).at(0);
    if (auto v = take("solver.threads"))
        cfg.solver.threads = parse_ints("solver.threads", *v).at(0);

    if (auto v = take("output.dir")) cfg.out_dir = *v;

    if (!kv.empty()) throw SpecError("unknown config key: " + kv.begin()->first);

    if (cfg.extent.size() != cfg.cells.size())
        throw SpecError("domain.extent and domain.cells must have the same length");
    if (cfg.extent.empty() || cfg.extent.size() > 2)
        throw SpecError("domain must be 1-D or 2-D");
    if (cfg.eps && !cfg.eps_schedule.empty())
        throw SpecError("give either congestion.eps or congestion.eps_schedule, not both");
    if ((cfg.eps && *cfg.eps > 0.0) || !cfg.eps_schedule.empty()) {
        if (!cfg.r) throw SpecError("congestion.r is required when eps > 0");
    }
    const bool is_well = cfg.potential == "cosine_well" || cfg.potential == "two_well";
    if (is_well && !cfg.radius) throw SpecError("coupling.radius is required for wells");
    if (cfg.potential == "two_well" && (!cfg.center2 || !cfg.radius2))
        throw SpecError("coupling.center2 and coupling.radius2 are required for two_well");
    if (cfg.potential == "file" && cfg.potential_file.empty())
        throw SpecError("coupling.file is required for potential = file");
    return cfg;
}

Grid RunConfig::make_grid() const {
    const int dim = static_cast<int>(cells.size());
    if (dim == 1) return Grid::make_1d(extent[0], cells[0]);
    return Grid::make_2d(extent[0], extent[1], cells[0], cells[1]);
}

ProblemSpec RunConfig::make_spec(double eps_value) const {
    Grid grid = make_grid();
    const double r_value = r.value_or(q);
    CongestionParams cong(q, r_value, eps_value);

    std::array<double, 2> c{};
    if (center) {
        if (center->size() != extent.size())
            throw SpecError("coupling.center dimension does not match the domain");
        for (size_t k = 0; k < center->size(); ++k) c[k] = (*center)[k];
    } else {
        for (size_t k = 0; k < extent.size(); ++k) c[k] = 0.5 * extent[k];
    }

    CellField V;
    if (potential == "uniform") {
        V = potential_uniform(grid, v0);
    } else if (potential == "cosine_well") {
        V = potential_cosine_well(grid, depth, c, *radius);
    } else if (potential == "two_well") {
        std::array<double, 2> c2{};
        if (center2->size() != extent.size())
            throw SpecError("coupling.center2 dimension does not match the domain");
        for (size_t k = 0; k < center2->size(); ++k) c2[k] = (*center2)[k];
        V = potential_two_well(grid, depth, c, *radius, depth2, c2, *radius2);
    } else if (potential == "file") {
        std::filesystem::path p = potential_file;
        if (p.is_relative()) p = base_dir / p;
        V = read_cell_field(p, grid);
    } else {
        throw SpecError("unknown coupling.potential '" + potential + "'");
    }

    return ProblemSpec(std::move(grid), cong, Coupling(std::move(V), rho, theta));
}

double RunConfig::solve_eps() const {
    if (!eps_schedule.empty())
        throw SpecError("config has congestion.eps_schedule; use the sweep command");
    if (!eps) throw SpecError("config is missing congestion.eps");
    return *eps;
}

const std::vector<double>& RunConfig::sweep_schedule() const {
    if (eps_schedule.empty())
        throw SpecError("sweep needs congestion.eps_schedule in the config");
    return eps_schedule;
}

std::string RunConfig::echo() const {
    std::ostringstream out;
    auto list_d = [&](const std::vector<double>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + g17(v[i]);
        return s;
    };
    out << "domain.extent = " << list_d(extent) << "\n";
    out << "domain.cells =";
    for (int c : cells) out << " " << c;
    out << "\n";
    out << "congestion.q = " << g17(q) << "\n";
    if (r) out << "congestion.r = " << g17(*r) << "\n";
    if (eps) out << "congestion.eps = " << g17(*eps) << "\n";
    if (!eps_schedule.empty())
        out << "congestion.eps_schedule = " << list_d(eps_schedule) << "\n";
    out << "coupling.potential = " << potential << "\n";
    if (potential == "uniform") out << "coupling.v0 = " << g17(v0) << "\n";
    if (potential == "cosine_well" || potential == "two_well") {
        out << "coupling.depth = " << g17(depth) << "\n";
        if (center) out << "coupling.center = " << list_d(*center) << "\n";
        out << "coupling.radius = " << g17(*radius) << "\n";
    }
    if (potential == "two_well") {
        out << "coupling.depth2 = " << g17(depth2) << "\n";
        out << "coupling.center2 = " << list_d(*center2) << "\n";
        out << "coupling.radius2 = " << g17(*radius2) << "\n";
    }
    if (potential == "file") out << "coupling.file = " << potential_file << "\n";
    out << "coupling.rho = " << g17(rho) << "\n";
    out << "coupling.theta = " << g17(theta) << "\n";
    out << "solver.tol_primal = " << g17(solver.tol_primal) << "\n";
    out << "solver.tol_dual = " << g17(solver.tol_dual) << "\n";
    out << "solver.tol_gap = " << g17(solver.tol_gap) << "\n";
    out << "solver.max_iter = " << solver.max_iter << "\n";
    out << "solver.penalty = " << g17(solver.penalty) << "\n";
    out << "solver.inner_tol = " << g17(solver.inner_tol) << "\n";
    out << "solver.seed = " << solver.seed << "\n";
    out << "solver.init_perturbation = " << g17(solver.init_perturbation) << "\n";
    out << "solver.check_every = " << solver.check_every << "\n";
    out << "solver.threads = " << solver.threads << "\n";
    return out.str();
}

}  // namespace mfg
