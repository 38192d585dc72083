#include "experiment.hpp"

#include "lgt/error.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace lgt;
using namespace lgt::cli;

namespace {

struct PointFlags {
    int L = 2, lx = 0, ly = 0;
    std::string boundary = "periodic";
    double t = 1, m = 0, ge2 = 1, gm2 = 0;
    int spin = 1, Q = 0, nev = 1, chi = 20, n_seeds = 5;
    std::string out = "lgt-out";
    bool no_corr = false, field_plot = false, overlap = false, fidelity = false;
};

void add_point_flags(CLI::App *app, PointFlags &f, bool ttn)
{
    app->add_option("--L", f.L, "linear size (square lattice)");
    app->add_option("--lx", f.lx, "width, overrides --L");
    app->add_option("--ly", f.ly, "height, overrides --L");
    app->add_option("--boundary", f.boundary, "periodic | open_frozen_zero_flux | open_free");
    app->add_option("--t", f.t, "hopping");
    app->add_option("--m", f.m, "bare mass");
    app->add_option("--ge2", f.ge2, "electric coupling g_e^2");
    app->add_option("--gm2", f.gm2, "magnetic coupling g_m^2");
    app->add_option("--spin", f.spin, "link spin");
    app->add_option("--Q", f.Q, "total charge sector");
    app->add_option("-o,--out", f.out, "output directory");
    app->add_flag("--no-correlations", f.no_corr, "skip the correlation functions");
    app->add_flag("--field-plot", f.field_plot, "also write the field-plot JSON");
    if (ttn) {
        app->add_option("--chi", f.chi, "bond dimension");
        app->add_option("--seeds", f.n_seeds, "number of seeds (1..n)");
    } else {
        app->add_option("--nev", f.nev, "eigenpairs");
        app->add_flag("--overlap", f.overlap, "bare-vacuum overlap");
        app->add_flag("--fidelity", f.fidelity, "fidelity susceptibility");
    }
}

// Single-point configs go through the TOML validator as well.
ExperimentConfig from_flags(const PointFlags &f, const std::string &kind)
{
    toml::table t;
    t.insert("name", kind + "-point");
    t.insert("lattice", toml::table{{"lx", f.lx ? f.lx : f.L}, {"ly", f.ly ? f.ly : f.L}, {"boundary", f.boundary}});
    t.insert("couplings",
             toml::table{{"t", f.t}, {"m", f.m}, {"g_e_sq", f.ge2}, {"g_m_sq", f.gm2}, {"spin", f.spin}});
    t.insert("sector", toml::table{{"Q", f.Q}});
    toml::table s{{"kind", kind}, {"nev", f.nev}, {"chi", f.chi}, {"n_seeds", f.n_seeds}};
    t.insert("solver", s);
    t.insert("output", toml::table{{"dir", f.out}, {"correlations", !f.no_corr}, {"field_plots", f.field_plot}});
    if (kind == "ed")
        t.insert("extras", toml::table{{"overlap", f.overlap}, {"fidelity", f.fidelity}});
    return parse_config(t);
}

ExperimentConfig sweep_config(const std::string &what, const std::string &out)
{
    ExperimentConfig c;
    if (auto p = preset(what))
        c = *p;
    else if (std::filesystem::exists(what))
        c = load_config(what);
    else {
        std::string names;
        for (auto &n : preset_names())
            names += " " + n;
        throw ConfigError("'" + what + "' is neither a preset nor a config file (presets:" + names + ")");
    }
    if (!out.empty())
        c.output_dir = out;
    return c;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Quantum link lattice QED: exact diagonalization and tree tensor networks"};
    app.require_subcommand(1);

    std::string run_path, run_out;
    auto *run = app.add_subcommand("run", "run the experiment described by a TOML config");
    run->add_option("config", run_path)->required();
    run->add_option("-o,--out", run_out, "override the output directory");

    PointFlags ed_flags, ttn_flags;
    auto *ed = app.add_subcommand("ed", "exact ground state of one coupling point");
    add_point_flags(ed, ed_flags, false);
    auto *ttn = app.add_subcommand("ttn", "tree tensor network ground state of one coupling point");
    add_point_flags(ttn, ttn_flags, true);

    std::string sweep_what, sweep_out;
    auto *sweep = app.add_subcommand("sweep", "run a preset or a config sweep");
    sweep->add_option("preset_or_config", sweep_what, "preset name or TOML file");
    sweep->add_option("-o,--out", sweep_out, "override the output directory");
    bool list = false;
    sweep->add_flag("--list", list, "print the preset names");

    std::string validate_path;
    auto *validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", validate_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        ExperimentConfig cfg;
        if (*validate) {
            cfg = sweep_config(validate_path, "");
            std::cout << "ok: " << cfg.name << ", " << grid_points(cfg).size() << " point(s), solver "
                      << cfg.solver.kind << "\n";
            return 0;
        }
        if (*sweep && list) {
            for (auto &n : preset_names())
                std::cout << n << "\n";
            return 0;
        }
        if (*run) {
            cfg = load_config(run_path);
            if (!run_out.empty())
                cfg.output_dir = run_out;
        } else if (*ed) {
            cfg = from_flags(ed_flags, "ed");
        } else if (*ttn) {
            cfg = from_flags(ttn_flags, "ttn");
        } else {
            if (sweep_what.empty())
                throw ConfigError("sweep needs a preset name or a config file");
            cfg = sweep_config(sweep_what, sweep_out);
        }
        int threads = worker_threads();
        return run_experiment(cfg, threads, std::cerr);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const IoError &e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const SolverError &e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    }
}
