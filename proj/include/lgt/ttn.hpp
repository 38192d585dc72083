#pragma once

#include "lgt/block_tensor.hpp"
#include "lgt/operators.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lgt {

// Binary tree over the lattice sites from recursive bisection of the rectangle.
// children[i] >= 0 is a node, < 0 encodes site -(child + 1). Node 0 is the root.
struct TreeNode {
    std::array<int, 2> children;
    int parent = -1;
    int slot = 0; // position among the parent's children
    std::vector<int> sites;
};

class TreeLayout {
public:
    TreeLayout() = default;
    explicit TreeLayout(const LatticeGeometry &g);

    int size() const { return int(nodes_.size()); }
    const TreeNode &node(int n) const { return nodes_[n]; }
    const std::vector<TreeNode> &nodes() const { return nodes_; }
    std::vector<int> post_order() const;
    // Node visits of a depth-first walk from the root back to the root.
    std::vector<int> euler_tour() const;

private:
    std::vector<TreeNode> nodes_;
};

inline bool is_leaf(int child) { return child < 0; }
inline int leaf_site(int child) { return -child - 1; }

// nu_k = nu0 + k delta until the energy first rises at k*, then
// nu(k*) + beta (k - k*)^2, capped at nu_max.
struct PenaltySchedule {
    double nu0 = 1.0;
    double delta = 1.0;
    double beta = 0.25;
    double nu_max = 10.0;
    int k = 0;
    int k_star = -1;
    double nu_star = 0.0;
    double last_energy = 0.0;
    bool has_energy = false;

    static PenaltySchedule defaults(const Couplings &c);
    double nu() const;
    // Record the energy of sweep k and step to k + 1.
    void advance(double sweep_energy);
};

struct SweepTolerances {
    double tol_energy = 1e-8;  // relative change between sweeps
    double tol_penalty = 1e-6;
    int max_sweeps = 200;
    int min_sweeps = 3;
    // local eigensolver tolerance max(eps_min, eps0 * ratio^k)
    double eps0 = 1e-4;
    double eps_ratio = 0.3;
    double eps_min = 1e-11;
    int local_max_matvecs = 400;
    double pad_fraction = 0.2;
    int pad_min = 2;
    double max_seconds = 0.0; // wall-clock budget per run, 0 = none
};

struct SweepReport {
    int sweep = 0;
    double energy = 0.0;          // <H_sim>
    double physical_energy = 0.0; // <H>
    double penalty = 0.0;         // <sum_links (1 - delta)>
    double nu = 0.0;
    double max_entropy = 0.0;
    double max_truncation = 0.0;
    double eps = 0.0;
    double seconds = 0.0;
};

struct TtnState {
    TreeLayout tree;
    std::vector<BondSpace> physical; // per site
    std::vector<BlockTensor<double>> tensors;
    int charge = 0;
    int chi = 0;
    std::uint64_t seed = 0;
    int center = 0;
    PenaltySchedule schedule;
    std::vector<SweepReport> history;
};

BondSpace physical_space(const DressedBasis &b);
BlockMatrix<double> to_block(const DressedBasis &b, const LocalOperator &op);

TtnState init_random(const HamiltonianSpec &h, int charge, int chi, std::uint64_t seed);

struct SearchResult {
    TtnState state;
    bool converged = false;
    double energy = 0.0;
    double physical_energy = 0.0;
    double penalty = 0.0;
    std::string message;
};

// Variational sweeps with the driven link penalty. The penalty strength of the
// spec is ignored; the schedule stored in the state drives it instead.
SearchResult ground_state_search(TtnState state, const HamiltonianSpec &h, const SweepTolerances &tol = {});

struct SeedRun {
    std::uint64_t seed;
    bool converged;
    double energy;
    double penalty;
    int sweeps;
};

struct MultiSeedResult {
    SearchResult best;
    std::vector<SeedRun> runs;
    std::uint64_t winning_seed = 0;
};

// Independent runs from several seeds; the winner has the lowest energy among
// penalty-converged runs (or among all runs if none converged).
MultiSeedResult search_seeds(const HamiltonianSpec &h, int charge, int chi, const std::vector<std::uint64_t> &seeds,
                             const SweepTolerances &tol = {}, const PenaltySchedule *schedule = nullptr);

using FactorList = std::vector<std::pair<int, const LocalOperator *>>;

// <psi| prod factors |psi> / <psi|psi> by a full bottom-up contraction.
double expectation(const TtnState &st, const HamiltonianSpec &h, const FactorList &factors);

// <H> summed over every term of h.
double energy_expectation(const TtnState &st, const HamiltonianSpec &h);

} // namespace lgt
