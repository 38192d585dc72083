#pragma once

#include "lgt/exact_solver.hpp"
#include "lgt/observables.hpp"
#include "lgt/ttn.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace lgt {

using Json = nlohmann::json;

constexpr int field_plot_version = 1;

std::string direction_name(Direction d);
Direction direction_from_name(const std::string &s);

Json to_json(const Couplings &c);
Couplings couplings_from_json(const Json &j);

Json to_json(const ObservableReport &r);
ObservableReport report_from_json(const Json &j);

struct FieldPlotSite {
    int i, j, parity;
    double density, charge;
};

struct FieldPlotLink {
    int i, j;
    std::string dir;
    double E;
};

struct FieldPlot {
    int version = field_plot_version;
    int lx = 0, ly = 0;
    std::vector<FieldPlotSite> sites;
    std::vector<FieldPlotLink> links;
    Couplings couplings;
    int charge = 0;
    std::string solver;
};

FieldPlot field_plot(const ObservableReport &r);
Json to_json(const FieldPlot &f);
FieldPlot field_plot_from_json(const Json &j);

Json to_json(const DressedBasis &b);
// Terms with dense per-site factor matrices.
Json to_json(const HamiltonianSpec &h);
Json to_json(const SpectrumResult &r, bool with_vectors);
Json to_json(const Eigen::MatrixXd &m);

// Full state including seed, schedule and sweep history; doubles round-trip exactly.
Json checkpoint_to_json(const TtnState &st, const HamiltonianSpec &h);
TtnState checkpoint_from_json(const Json &j, const HamiltonianSpec &h);

Json read_json(const std::string &path);
// Two-space indented, trailing newline.
void write_json(const std::string &path, const Json &j);

} // namespace lgt
