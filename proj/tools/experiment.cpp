#include "experiment.hpp"

#include "lgt/error.hpp"
#include "lgt/exact_solver.hpp"
#include "lgt/observables.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

namespace lgt::cli {

namespace {

void check_keys(const toml::table &t, const std::set<std::string> &allowed, const std::string &where)
{
    for (auto &&[k, v] : t) {
        (void)v;
        if (!allowed.count(std::string(k.str())))
            throw ConfigError("unknown key '" + std::string(k.str()) + "' in " + where);
    }
}

const toml::table *sub(const toml::table &t, const char *key)
{
    auto *n = t.get(key);
    if (!n)
        return nullptr;
    auto *tab = n->as_table();
    if (!tab)
        throw ConfigError(std::string("'") + key + "' must be a table");
    return tab;
}

double get_num(const toml::table &t, const char *key, double def)
{
    auto *n = t.get(key);
    if (!n)
        return def;
    if (auto v = n->value<double>(); v && (n->is_integer() || n->is_floating_point()))
        return *v;
    throw ConfigError(std::string("'") + key + "' must be a number");
}

std::int64_t get_int(const toml::table &t, const char *key, std::int64_t def)
{
    auto *n = t.get(key);
    if (!n)
        return def;
    if (!n->is_integer())
        throw ConfigError(std::string("'") + key + "' must be an integer");
    return *n->value<std::int64_t>();
}

bool get_bool(const toml::table &t, const char *key, bool def)
{
    auto *n = t.get(key);
    if (!n)
        return def;
    if (!n->is_boolean())
        throw ConfigError(std::string("'") + key + "' must be a boolean");
    return *n->value<bool>();
}

std::string get_str(const toml::table &t, const char *key, const std::string &def)
{
    auto *n = t.get(key);
    if (!n)
        return def;
    if (!n->is_string())
        throw ConfigError(std::string("'") + key + "' must be a string");
    return *n->value<std::string>();
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v;
    for (int i = 0; i < n; ++i)
        v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return v;
}

const std::set<std::string> axis_names = {"t",           "m",           "g_e_sq", "g_m_sq",
                                          "g_e_sq_half", "g_m_sq_half", "g_sq",   "Q"};

struct Point {
    Couplings couplings;
    int charge;
    LatticeGeometry geometry;
};

Point resolve(const ExperimentConfig &cfg, const std::vector<double> &params)
{
    Couplings c = cfg.couplings;
    int q = cfg.charge;
    double g_sq = cfg.g_sq;
    for (size_t i = 0; i < cfg.axes.size(); ++i) {
        const std::string &n = cfg.axes[i].name;
        double v = params.at(i);
        if (n == "t")
            c.t = v;
        else if (n == "m")
            c.m = v;
        else if (n == "g_e_sq")
            c.g_e_sq = v;
        else if (n == "g_m_sq")
            c.g_m_sq = v;
        else if (n == "g_e_sq_half")
            c.g_e_sq = 2 * v;
        else if (n == "g_m_sq_half")
            c.g_m_sq = 2 * v;
        else if (n == "g_sq")
            g_sq = v;
        else if (n == "Q") {
            if (v != std::round(v))
                throw ConfigError("charge axis values must be integers");
            q = int(std::lround(v));
        }
    }
    if (cfg.spacing) {
        Couplings p = physical_line(g_sq, *cfg.spacing, c.m);
        c.t = p.t;
        c.g_e_sq = p.g_e_sq;
        c.g_m_sq = p.g_m_sq;
    }
    return {c, q, LatticeGeometry(cfg.lx, cfg.ly, cfg.boundary)};
}

Json params_json(const ExperimentConfig &cfg, const std::vector<double> &params)
{
    Json p = Json::object();
    for (size_t i = 0; i < cfg.axes.size(); ++i)
        p[cfg.axes[i].name] = params[i];
    return p;
}

std::string point_file(int index, const char *suffix)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "point_%04d%s", index, suffix);
    return buf;
}

Json density_summary(const ObservableReport &r)
{
    return {{"energy", r.energy},
            {"energy_density", r.energy_density},
            {"average_density", r.average_density},
            {"xi_full", r.xi_full ? Json(*r.xi_full) : Json(nullptr)},
            {"xi_connected", r.xi_connected ? Json(*r.xi_connected) : Json(nullptr)},
            {"surface_charge", r.surface_charge},
            {"max_link_violation", r.max_link_violation}};
}

} // namespace

ExperimentConfig parse_config(const toml::table &t)
{
    ExperimentConfig cfg;
    check_keys(t, {"name", "lattice", "couplings", "sector", "solver", "sweep", "physical_line", "output", "extras"},
               "top level");
    cfg.name = get_str(t, "name", cfg.name);

    if (auto *l = sub(t, "lattice")) {
        check_keys(*l, {"L", "lx", "ly", "boundary"}, "[lattice]");
        int L = int(get_int(*l, "L", 0));
        if (L && (l->get("lx") || l->get("ly")))
            throw ConfigError("give either L or lx/ly");
        cfg.lx = L ? L : int(get_int(*l, "lx", cfg.lx));
        cfg.ly = L ? L : int(get_int(*l, "ly", cfg.ly));
        cfg.boundary = boundary_from_string(get_str(*l, "boundary", to_string(cfg.boundary)));
    }
    if (auto *c = sub(t, "couplings")) {
        check_keys(*c, {"t", "m", "g_e_sq", "g_m_sq", "spin", "boundary_term", "j_b", "pinned"}, "[couplings]");
        auto &k = cfg.couplings;
        k.t = get_num(*c, "t", k.t);
        k.m = get_num(*c, "m", k.m);
        k.g_e_sq = get_num(*c, "g_e_sq", k.g_e_sq);
        k.g_m_sq = get_num(*c, "g_m_sq", k.g_m_sq);
        k.spin = int(get_int(*c, "spin", k.spin));
        std::string bt = get_str(*c, "boundary_term", "none");
        if (bt == "dirichlet")
            k.boundary_term = BoundaryTerm::dirichlet;
        else if (bt != "none")
            throw ConfigError("boundary_term must be 'none' or 'dirichlet'");
        k.j_b = get_num(*c, "j_b", k.j_b);
        if (auto *n = c->get("pinned")) {
            auto *arr = n->as_array();
            if (!arr)
                throw ConfigError("'pinned' must be an array of tables");
            for (auto &e : *arr) {
                auto *pt = e.as_table();
                if (!pt)
                    throw ConfigError("'pinned' must be an array of tables");
                check_keys(*pt, {"site", "shift"}, "[[couplings.pinned]]");
                if (!pt->get("site"))
                    throw ConfigError("pinned charge needs a site");
                k.pinned.push_back({int(get_int(*pt, "site", 0)), get_num(*pt, "shift", 0.0)});
            }
        }
    }
    if (auto *s = sub(t, "sector")) {
        check_keys(*s, {"Q"}, "[sector]");
        cfg.charge = int(get_int(*s, "Q", 0));
    }
    if (auto *s = sub(t, "solver")) {
        check_keys(*s, {"kind", "nev", "chi", "seeds", "n_seeds", "schedule", "tolerances"}, "[solver]");
        auto &sv = cfg.solver;
        sv.kind = get_str(*s, "kind", sv.kind);
        sv.nev = int(get_int(*s, "nev", sv.nev));
        sv.chi = int(get_int(*s, "chi", sv.chi));
        if (s->get("seeds") && s->get("n_seeds"))
            throw ConfigError("give either seeds or n_seeds");
        if (auto *n = s->get("seeds")) {
            auto *arr = n->as_array();
            if (!arr)
                throw ConfigError("'seeds' must be an array of integers");
            sv.seeds.clear();
            for (auto &e : *arr) {
                if (!e.is_integer() || *e.value<std::int64_t>() < 0)
                    throw ConfigError("'seeds' must be an array of non-negative integers");
                sv.seeds.push_back(std::uint64_t(*e.value<std::int64_t>()));
            }
        }
        if (s->get("n_seeds")) {
            int n = int(get_int(*s, "n_seeds", 5));
            if (n < 1)
                throw ConfigError("n_seeds must be positive");
            sv.seeds.clear();
            for (int i = 1; i <= n; ++i)
                sv.seeds.push_back(std::uint64_t(i));
        }
        if (auto *p = sub(*s, "schedule")) {
            check_keys(*p, {"nu0", "delta", "beta", "nu_max"}, "[solver.schedule]");
            PenaltySchedule ps;
            ps.nu0 = get_num(*p, "nu0", ps.nu0);
            ps.delta = get_num(*p, "delta", ps.delta);
            ps.beta = get_num(*p, "beta", ps.beta);
            ps.nu_max = get_num(*p, "nu_max", ps.nu_max);
            sv.schedule = ps;
        }
        if (auto *p = sub(*s, "tolerances")) {
            check_keys(*p,
                       {"tol_energy", "tol_penalty", "max_sweeps", "min_sweeps", "eps0", "eps_ratio", "eps_min",
                        "local_max_matvecs", "pad_fraction", "pad_min", "max_seconds"},
                       "[solver.tolerances]");
            auto &tl = sv.tol;
            tl.tol_energy = get_num(*p, "tol_energy", tl.tol_energy);
            tl.tol_penalty = get_num(*p, "tol_penalty", tl.tol_penalty);
            tl.max_sweeps = int(get_int(*p, "max_sweeps", tl.max_sweeps));
            tl.min_sweeps = int(get_int(*p, "min_sweeps", tl.min_sweeps));
            tl.eps0 = get_num(*p, "eps0", tl.eps0);
            tl.eps_ratio = get_num(*p, "eps_ratio", tl.eps_ratio);
            tl.eps_min = get_num(*p, "eps_min", tl.eps_min);
            tl.local_max_matvecs = int(get_int(*p, "local_max_matvecs", tl.local_max_matvecs));
            tl.pad_fraction = get_num(*p, "pad_fraction", tl.pad_fraction);
            tl.pad_min = int(get_int(*p, "pad_min", tl.pad_min));
            tl.max_seconds = get_num(*p, "max_seconds", tl.max_seconds);
        }
    }
    if (auto *n = t.get("sweep")) {
        auto *arr = n->as_array();
        if (!arr)
            throw ConfigError("'sweep' must be an array of tables ([[sweep]])");
        for (auto &e : *arr) {
            auto *a = e.as_table();
            if (!a)
                throw ConfigError("'sweep' must be an array of tables ([[sweep]])");
            check_keys(*a, {"name", "values", "start", "stop", "steps"}, "[[sweep]]");
            Axis ax;
            ax.name = get_str(*a, "name", "");
            if (a->get("values")) {
                if (a->get("start") || a->get("stop") || a->get("steps"))
                    throw ConfigError("axis '" + ax.name + "': give values or start/stop/steps");
                auto *vals = a->get("values")->as_array();
                if (!vals)
                    throw ConfigError("axis values must be an array");
                for (auto &v : *vals) {
                    auto d = v.value<double>();
                    if (!d || !(v.is_integer() || v.is_floating_point()))
                        throw ConfigError("axis values must be numbers");
                    ax.values.push_back(*d);
                }
            } else {
                if (!a->get("start") || !a->get("stop") || !a->get("steps"))
                    throw ConfigError("axis '" + ax.name + "' needs start, stop and steps");
                int steps = int(get_int(*a, "steps", 0));
                if (steps < 1)
                    throw ConfigError("axis steps must be positive");
                ax.values = linspace(get_num(*a, "start", 0), get_num(*a, "stop", 0), steps);
            }
            cfg.axes.push_back(std::move(ax));
        }
    }
    if (auto *p = sub(t, "physical_line")) {
        check_keys(*p, {"spacing", "g_sq"}, "[physical_line]");
        cfg.spacing = get_num(*p, "spacing", 1.0);
        cfg.g_sq = get_num(*p, "g_sq", cfg.g_sq);
    }
    if (auto *o = sub(t, "output")) {
        check_keys(*o, {"dir", "correlations", "exclude_rings", "field_plots"}, "[output]");
        cfg.output_dir = get_str(*o, "dir", cfg.output_dir);
        cfg.correlations = get_bool(*o, "correlations", cfg.correlations);
        cfg.exclude_rings = int(get_int(*o, "exclude_rings", cfg.exclude_rings));
        cfg.field_plots = get_bool(*o, "field_plots", cfg.field_plots);
    }
    if (auto *x = sub(t, "extras")) {
        check_keys(*x, {"overlap", "fidelity", "delta_m"}, "[extras]");
        cfg.overlap = get_bool(*x, "overlap", cfg.overlap);
        cfg.fidelity = get_bool(*x, "fidelity", cfg.fidelity);
        cfg.delta_m = get_num(*x, "delta_m", cfg.delta_m);
    }

    // validation
    if (cfg.solver.kind != "ed" && cfg.solver.kind != "ttn")
        throw ConfigError("solver kind must be 'ed' or 'ttn'");
    if (cfg.solver.nev < 1)
        throw ConfigError("nev must be at least 1");
    if (cfg.solver.chi < 2)
        throw ConfigError("chi must be at least 2");
    if (cfg.solver.seeds.empty())
        throw ConfigError("at least one seed is required");
    if ((cfg.fidelity || cfg.overlap) && cfg.solver.kind != "ed")
        throw ConfigError("overlap and fidelity extras need the ed solver");
    if (cfg.delta_m <= 0)
        throw ConfigError("delta_m must be positive");
    if (cfg.exclude_rings < 0)
        throw ConfigError("exclude_rings must be non-negative");
    std::set<std::string> seen;
    for (auto &a : cfg.axes) {
        if (!axis_names.count(a.name))
            throw ConfigError("unknown sweep axis '" + a.name + "'");
        if (!seen.insert(a.name).second)
            throw ConfigError("sweep axis '" + a.name + "' given twice");
        if (a.name == "g_sq" && !cfg.spacing)
            throw ConfigError("axis g_sq needs a [physical_line] table");
    }
    if (cfg.spacing && (seen.count("t") || seen.count("g_e_sq") || seen.count("g_m_sq") ||
                        seen.count("g_e_sq_half") || seen.count("g_m_sq_half")))
        throw ConfigError("physical line fixes t, g_e and g_m; sweep g_sq or m instead");
    for (auto &p : grid_points(cfg)) {
        Point pt = resolve(cfg, p);
        int n = pt.geometry.num_sites();
        if (2 * std::abs(pt.charge) > n)
            throw ConfigError("charge sector beyond half filling");
        assemble_hamiltonian(pt.geometry, pt.couplings);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string &path)
{
    if (!std::filesystem::exists(path))
        throw IoError("config file " + path + " not found");
    toml::table t;
    try {
        t = toml::parse_file(path);
    } catch (const toml::parse_error &e) {
        throw ConfigError(path + ": " + std::string(e.description()));
    }
    return parse_config(t);
}

std::vector<std::string> preset_names()
{
    return {"fig3-grid", "2x2-exact-sweep", "fig6-magnetic", "fig10-density", "physical-line"};
}

std::optional<ExperimentConfig> preset(const std::string &name)
{
    ExperimentConfig c;
    c.name = name;
    c.output_dir = name;
    c.couplings.t = 1;
    if (name == "fig3-grid") {
        c.lx = c.ly = 4;
        c.boundary = BoundaryPolicy::periodic;
        c.solver.kind = "ttn";
        c.solver.chi = 20;
        c.axes = {{"m", linspace(-4, 0, 9)}, {"g_e_sq_half", linspace(0, 8, 9)}};
    } else if (name == "2x2-exact-sweep") {
        c.lx = c.ly = 2;
        c.boundary = BoundaryPolicy::open_frozen_zero_flux;
        c.solver.kind = "ed";
        c.overlap = c.fidelity = true;
        c.axes = {{"g_e_sq_half", {1, 2, 4}}, {"m", linspace(-3, 1, 41)}};
    } else if (name == "fig6-magnetic") {
        c.lx = c.ly = 4;
        c.boundary = BoundaryPolicy::periodic;
        c.solver.kind = "ttn";
        c.solver.chi = 20;
        c.couplings.m = -2;
        c.axes = {{"g_e_sq_half", {2, 6}}, {"g_m_sq_half", linspace(0, 4, 9)}};
    } else if (name == "fig10-density") {
        c.lx = c.ly = 4;
        c.boundary = BoundaryPolicy::open_free;
        c.charge = -2;
        c.solver.kind = "ttn";
        c.solver.chi = 20;
        c.axes = {{"g_e_sq_half", {0.5, 2}}, {"m", linspace(-4, 0, 9)}};
    } else if (name == "physical-line") {
        c.lx = c.ly = 4;
        c.boundary = BoundaryPolicy::periodic;
        c.solver.kind = "ttn";
        c.solver.chi = 20;
        c.spacing = 1.0;
        c.axes = {{"m", {-3.0, -0.3}}, {"g_sq", linspace(0.5, 8, 16)}};
    } else {
        return std::nullopt;
    }
    return c;
}

std::vector<std::vector<double>> grid_points(const ExperimentConfig &cfg)
{
    std::vector<std::vector<double>> out{{}};
    for (auto &a : cfg.axes) {
        std::vector<std::vector<double>> next;
        for (auto &p : out)
            for (double v : a.values) {
                auto q = p;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        out = std::move(next);
    }
    return out;
}

PointOutcome run_point(const ExperimentConfig &cfg, const std::vector<double> &params, int index)
{
    PointOutcome out;
    Json params_j = params_json(cfg, params);
    out.summary = {{"index", index}, {"params", params_j}};
    out.report = {{"point", {{"index", index}, {"params", params_j}}}};
    Point pt = resolve(cfg, params);
    ReportOptions ro;
    ro.correlations = cfg.correlations;
    ro.exclude_rings = cfg.exclude_rings;
    try {
        HamiltonianSpec h = assemble_hamiltonian(pt.geometry, pt.couplings);
        if (cfg.solver.kind == "ed") {
            ConstrainedBasis basis(h, pt.charge);
            EdOptions eo;
            eo.nev = cfg.solver.nev;
            SpectrumResult sp = ed_ground_state(h, basis, eo);
            EdView view(h, basis, sp.vectors.col(0));
            ObservableReport r = make_report(view, pt.charge, ro);
            r.solver_stats = {{"basis_size", double(basis.size())}, {"multiplet", double(sp.energies.size())}};
            out.report["report"] = to_json(r);
            out.report["spectrum"] = to_json(sp, false);
            Json multiplet = Json::array();
            for (Index k = 1; k < sp.vectors.cols(); ++k) {
                EdView vk(h, basis, sp.vectors.col(k));
                auto [dens, avg] = particle_density(vk);
                multiplet.push_back({{"energy", sp.energies(k)}, {"average_density", avg}, {"density", dens}});
            }
            out.report["multiplet"] = multiplet;
            out.summary.update(density_summary(r));
            out.summary["multiplet"] = int(sp.energies.size());
            if (cfg.overlap) {
                std::vector<std::uint8_t> vac(h.num_sites());
                for (int s = 0; s < h.num_sites(); ++s)
                    vac[s] = std::uint8_t(h.basis(s).vacuum_index());
                std::int64_t at = basis.find(vac.data());
                Json ov = Json::array();
                for (Index k = 0; k < sp.vectors.cols(); ++k)
                    ov.push_back(at < 0 ? 0.0 : sp.vectors(at, k) * sp.vectors(at, k));
                out.report["vacuum_overlap"] = ov;
                out.summary["vacuum_overlap"] = ov;
            }
            if (cfg.fidelity) {
                try {
                    auto f = fidelity_susceptibility(pt.geometry, pt.couplings, pt.charge, cfg.delta_m);
                    out.summary["chi_F"] = f.chi;
                    out.summary["gap"] = f.gap;
                } catch (const SolverError &e) {
                    out.summary["chi_F"] = nullptr;
                    out.summary["chi_F_note"] = e.what();
                }
                out.report["chi_F"] = out.summary["chi_F"];
            }
            out.ok = true;
            out.summary["status"] = "ok";
        } else {
            MultiSeedResult ms = search_seeds(h, pt.charge, cfg.solver.chi, cfg.solver.seeds, cfg.solver.tol,
                                              cfg.solver.schedule ? &*cfg.solver.schedule : nullptr);
            TtnView view(h, ms.best.state);
            ObservableReport r = make_report(view, pt.charge, ro);
            r.solver_stats = {{"chi", double(cfg.solver.chi)},
                              {"winning_seed", double(ms.winning_seed)},
                              {"penalty", ms.best.penalty},
                              {"variational_energy", ms.best.energy},
                              {"sweeps", double(ms.best.state.history.size())}};
            Json runs = Json::array();
            for (auto &s : ms.runs)
                runs.push_back({{"seed", s.seed},
                                {"converged", s.converged},
                                {"energy", s.energy},
                                {"penalty", s.penalty},
                                {"sweeps", s.sweeps},
                                {"winner", s.seed == ms.winning_seed}});
            Json hist = Json::array();
            for (auto &s : ms.best.state.history)
                hist.push_back({{"sweep", s.sweep},
                                {"energy", s.energy},
                                {"penalty", s.penalty},
                                {"nu", s.nu},
                                {"eps", s.eps},
                                {"max_entropy", s.max_entropy}});
            out.report["report"] = to_json(r);
            out.report["ttn"] = {{"winning_seed", ms.winning_seed},
                                 {"converged", ms.best.converged},
                                 {"message", ms.best.message},
                                 {"runs", runs},
                                 {"history", hist}};
            out.summary.update(density_summary(r));
            out.summary["winning_seed"] = ms.winning_seed;
            out.summary["seeds"] = runs;
            out.ok = ms.best.converged;
            out.summary["status"] = out.ok ? "ok" : "not_converged";
            if (!out.ok)
                out.summary["error"] = ms.best.message;
        }
    } catch (const SolverError &e) {
        out.ok = false;
        out.summary["status"] = "failed";
        out.summary["error"] = e.what();
    }
    out.report["status"] = out.summary["status"];
    if (out.summary.contains("error"))
        out.report["error"] = out.summary["error"];
    return out;
}

int worker_threads()
{
    if (const char *env = std::getenv("LGT_THREADS")) {
        char *end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (end == env || *end || n < 1)
            throw ConfigError("LGT_THREADS must be a positive integer");
        return int(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int run_experiment(const ExperimentConfig &cfg, int threads, std::ostream &log)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec)
        throw IoError("cannot create " + cfg.output_dir + ": " + ec.message());

    const auto points = grid_points(cfg);
    std::vector<PointOutcome> results(points.size());
    std::atomic<size_t> next{0};
    std::mutex log_mutex;
    std::string io_error;
    auto worker = [&] {
        while (true) {
            size_t i = next++;
            if (i >= points.size())
                return;
            results[i] = run_point(cfg, points[i], int(i));
            try {
                write_json((fs::path(cfg.output_dir) / point_file(int(i), ".json")).string(), results[i].report);
                if (cfg.field_plots && results[i].report.contains("report")) {
                    auto rep = report_from_json(results[i].report["report"]);
                    write_json((fs::path(cfg.output_dir) / point_file(int(i), ".field.json")).string(),
                               to_json(field_plot(rep)));
                }
            } catch (const IoError &e) {
                std::lock_guard lock(log_mutex);
                io_error = e.what();
            }
            std::lock_guard lock(log_mutex);
            log << "point " << i + 1 << "/" << points.size() << " " << results[i].summary["params"].dump() << " "
                << results[i].summary["status"].get<std::string>();
            if (results[i].summary.contains("average_density"))
                log << " <n>=" << results[i].summary["average_density"].get<double>();
            log << "\n";
        }
    };
    int nt = std::max(1, std::min<int>(threads, int(points.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < nt; ++i)
        pool.emplace_back(worker);
    worker();
    for (auto &t : pool)
        t.join();

    Json axes = Json::array();
    for (auto &a : cfg.axes)
        axes.push_back({{"name", a.name}, {"values", a.values}});
    Json pts = Json::array();
    bool all_ok = true;
    for (auto &r : results) {
        pts.push_back(r.summary);
        all_ok = all_ok && r.ok;
    }
    Json summary = {{"name", cfg.name},
                    {"lattice", {{"lx", cfg.lx}, {"ly", cfg.ly}, {"boundary", to_string(cfg.boundary)}}},
                    {"couplings", to_json(cfg.couplings)},
                    {"Q", cfg.charge},
                    {"solver", {{"kind", cfg.solver.kind}, {"chi", cfg.solver.chi}, {"seeds", cfg.solver.seeds}}},
                    {"axes", axes},
                    {"points", pts}};
    if (cfg.spacing)
        summary["physical_line"] = {{"spacing", *cfg.spacing}};
    write_json((fs::path(cfg.output_dir) / "summary.json").string(), summary);
    if (!io_error.empty()) {
        log << "error: " << io_error << "\n";
        return 3;
    }
    return all_ok ? 0 : 2;
}

} // namespace lgt::cli
