#pragma once

#include "lgt/exact_solver.hpp"
#include "lgt/ttn.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lgt {

// Anything that can evaluate products of single-site operators on distinct sites.
class StateView {
public:
    virtual ~StateView() = default;
    virtual const HamiltonianSpec &spec() const = 0;
    virtual double expectation(const FactorList &factors) const = 0;
    // <H> without penalty terms
    virtual double energy() const = 0;
    virtual std::string solver() const = 0;
};

class EdView : public StateView {
public:
    // vector must be normalized and live in basis
    EdView(const HamiltonianSpec &h, const ConstrainedBasis &basis, Eigen::VectorXd vector);

    const HamiltonianSpec &spec() const override { return h_; }
    double expectation(const FactorList &factors) const override;
    double energy() const override;
    std::string solver() const override { return "ed"; }
    const Eigen::VectorXd &vector() const { return v_; }

private:
    const HamiltonianSpec &h_;
    const ConstrainedBasis &basis_;
    Eigen::VectorXd v_;
};

class TtnView : public StateView {
public:
    TtnView(const HamiltonianSpec &h, const TtnState &st) : h_(h), st_(st) {}

    const HamiltonianSpec &spec() const override { return h_; }
    double expectation(const FactorList &factors) const override { return lgt::expectation(st_, h_, factors); }
    double energy() const override;
    std::string solver() const override { return "ttn"; }

private:
    const HamiltonianSpec &h_;
    const TtnState &st_;
};

// <n_x> per site, and the lattice average.
std::pair<std::vector<double>, double> particle_density(const StateView &s);

std::vector<double> charge_profile(const StateView &s);

struct LinkField {
    int site;
    Direction dir;
    int partner; // -1 on a boundary half-link
    double field;          // on the owner half-link
    double partner_field;  // estimate from the partner half-link, equal to field without partner
    double violation;      // |field - partner_field|
};

// Links in lattice order, then boundary half-links.
std::vector<LinkField> electric_field_map(const StateView &s);

struct CorrelationPoint {
    int dx, dy;
    double value;
};

struct CorrelationOptions {
    bool connected = false;
    // drop x (and x + v) lying in the outermost rings of an open lattice
    int exclude_rings = 0;
};

// Cbar(v) = N^-1 sum_x <O_x O_{x+v}>, O_x = (-1)^x (2 psi^dag psi - 1).
// Torus: minimal image displacements. Open: every v, pairs outside the lattice count as zero.
std::vector<CorrelationPoint> correlation_matrix(const StateView &s, const CorrelationOptions &opt = {});

enum class XiVariant { full, connected };

// Throws std::domain_error on a non-positive normalization.
double correlation_length_estimate(const std::vector<CorrelationPoint> &cbar, XiVariant variant);

// Square ring of depth l (1 = outermost) on an L x L lattice.
std::vector<int> ring_sites(int L, int l);

// Ring averages of a per-site quantity, l = 1 .. L/2.
std::vector<double> surface_charge_profile(const std::vector<double> &per_site, int L);

struct ObservableReport {
    int lx = 0, ly = 0;
    BoundaryPolicy boundary = BoundaryPolicy::periodic;
    Couplings couplings;
    int charge = 0;
    std::string solver;
    std::vector<std::pair<std::string, double>> solver_stats;
    std::vector<double> density;
    double average_density = 0;
    std::vector<double> site_charge;
    std::vector<LinkField> fields;
    double max_link_violation = 0;
    double energy = 0;
    double energy_density = 0;
    std::vector<double> surface_charge; // empty unless open and square with even L
    std::vector<CorrelationPoint> correlation;
    std::vector<CorrelationPoint> connected_correlation;
    std::optional<double> xi_full;
    std::optional<double> xi_connected;
    std::vector<std::string> warnings;
};

struct ReportOptions {
    bool correlations = true;
    int exclude_rings = 0;
    double link_tolerance = 1e-6;
};

ObservableReport make_report(const StateView &s, int charge, const ReportOptions &opt = {});

} // namespace lgt
