#pragma once

#include "lgt/operators.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <vector>

namespace lgt {

// Gauge-invariant product configurations of a fixed total charge.
class ConstrainedBasis {
public:
    ConstrainedBasis(const HamiltonianSpec &h, int charge, std::int64_t max_size = 10'000'000);

    std::int64_t size() const { return std::int64_t(data_.size()) / sites_; }
    int num_sites() const { return sites_; }
    int charge() const { return charge_; }
    // Dressed-state index of each site in configuration c.
    const std::uint8_t *config(std::int64_t c) const { return data_.data() + c * sites_; }
    // Position of a configuration or -1.
    std::int64_t find(const std::uint8_t *cfg) const;

private:
    int sites_, charge_;
    std::vector<std::uint8_t> data_; // lexicographically sorted
};

Eigen::SparseMatrix<double> build_sparse_hamiltonian(const HamiltonianSpec &h, const ConstrainedBasis &basis);

struct SpectrumResult {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors; // columns
    Eigen::VectorXd residuals;
    int iterations = 0;
    bool converged = false;
};

struct EdOptions {
    int nev = 1;
    double tol = 1e-10;
    int max_iterations = 10000;
    // Widen the result to the whole multiplet within this window of the ground energy.
    double degeneracy_window = 1e-8;
    // Below this dimension use a dense eigensolver.
    int dense_limit = 1500;
};

SpectrumResult ed_ground_state(const HamiltonianSpec &h, const ConstrainedBasis &basis, const EdOptions &opt = {});

// Hamiltonian of the single 2x2 plaquette with frozen zero boundary flux, in the
// zero-charge configuration basis ordered by number of particles.
// Spin 1 gives the tabulated 13x13 blocks, spin 2 the 25x25 matrix.
Eigen::MatrixXd analytic_2x2_hamiltonian(const Couplings &c);

// Same plaquette built from Jordan-Wigner matter and spin-s link ladders, any spin.
Eigen::MatrixXd plaquette_2x2_hamiltonian(const Couplings &c);

struct FidelityResult {
    double chi;
    double gap;
};

// chi_F = <d psi|d psi> - |<psi|d psi>|^2 by a central difference in m.
FidelityResult fidelity_susceptibility(const LatticeGeometry &g, const Couplings &c, int charge,
                                       double delta_m = 1e-4);

} // namespace lgt
