#pragma once

#include "lgt/ttn.hpp"

#include <map>
#include <vector>

namespace lgt {

// Operators of one side of a bond, expressed on that bond.
struct SideOps {
    BlockMatrix<double> h_phys; // sum of physical terms entirely on this side
    BlockMatrix<double> h_pen;  // same for the unit-strength penalty
    std::map<int, BlockMatrix<double>> partial; // raw factor products of crossing terms
};

struct TermInfo {
    double coefficient;
    bool penalty;
    std::vector<Factor> factors;
};

// Renormalized operators on every bond of a tree tensor network.
class Environment {
public:
    Environment(const TtnState &st, const HamiltonianSpec &h);

    const HamiltonianSpec &hamiltonian() const { return h_; }
    const std::vector<TermInfo> &terms() const { return terms_; }

    // Rebuild the data of the bond above node n from its tensor.
    void update_below(int n, const BlockTensor<double> &t);
    // Rebuild the data of the bond above child node c from its parent's tensor.
    void update_above(int c, const BlockTensor<double> &parent);
    // Data of the bond between a and its neighbour b, seen from a's side.
    SideOps &bond_side(int a, int b);

    // w_phys * H + w_pen * P applied to the tensor of node n.
    BlockTensor<double> apply(int n, const BlockTensor<double> &x, double w_phys, double w_pen) const;

private:
    const SideOps &leg_side(int n, int leg) const;
    // 0, 1 for the children subtrees, 2 outside node n
    int region(int n, int site) const { return region_[n * sites_ + site]; }
    std::array<bool, 3> touches(int n, const TermInfo &t) const;

    const TreeLayout &tree_;
    const HamiltonianSpec &h_;
    int sites_;
    std::vector<TermInfo> terms_;
    double const_phys_ = 0, const_pen_ = 0;
    std::vector<signed char> region_;
    std::vector<std::vector<int>> crossing_bond_; // per node: terms crossing its parent bond
    std::vector<std::vector<int>> crossing_node_; // per node: terms touching >= 2 of its legs
    std::vector<SideOps> leaf_, below_, above_;
    SideOps empty_;
};

} // namespace lgt
