#pragma once

#include "lgt/serialization.hpp"
#include "lgt/ttn.hpp"

#include <toml.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lgt::cli {

// Sweep axis over one parameter. Names: t, m, g_e_sq, g_m_sq, g_e_sq_half, g_m_sq_half, g_sq, Q.
struct Axis {
    std::string name;
    std::vector<double> values;
};

struct SolverConfig {
    std::string kind = "ed"; // ed | ttn
    int nev = 1;
    int chi = 20;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::optional<PenaltySchedule> schedule; // unset: per-point defaults
    SweepTolerances tol;
};

struct ExperimentConfig {
    std::string name = "experiment";
    int lx = 2, ly = 2;
    BoundaryPolicy boundary = BoundaryPolicy::periodic;
    Couplings couplings;
    int charge = 0;
    SolverConfig solver;
    std::vector<Axis> axes;
    // physical line: t, g_e, g_m follow from g^2 and the lattice spacing
    std::optional<double> spacing;
    double g_sq = 1.0;
    std::string output_dir = "lgt-out";
    bool correlations = true;
    int exclude_rings = 0;
    bool field_plots = false;
    bool overlap = false;
    bool fidelity = false;
    double delta_m = 1e-4;
};

ExperimentConfig parse_config(const toml::table &t);
ExperimentConfig load_config(const std::string &path);
std::vector<std::string> preset_names();
std::optional<ExperimentConfig> preset(const std::string &name);

// Parameter tuples of the grid, last axis fastest.
std::vector<std::vector<double>> grid_points(const ExperimentConfig &cfg);

struct PointOutcome {
    Json report;  // full per-point document
    Json summary; // compact entry for the sweep summary
    bool ok = false;
};

PointOutcome run_point(const ExperimentConfig &cfg, const std::vector<double> &params, int index);

// Runs every grid point with up to `threads` workers and writes the artifacts.
// Returns the process exit status.
int run_experiment(const ExperimentConfig &cfg, int threads, std::ostream &log);

// LGT_THREADS if set, otherwise the hardware concurrency.
int worker_threads();

} // namespace lgt::cli
