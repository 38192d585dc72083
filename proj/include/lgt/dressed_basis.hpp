#pragma once

#include "lgt/lattice.hpp"

#include <array>
#include <optional>
#include <vector>

namespace lgt {

// Matter occupation plus the four rishon numbers of one site, k in [0, 2s].
// Half-link order: -x, -y, +x, +y.
struct DressedState {
    int phi;
    std::array<int, 4> k;
    // Basis sign: the state is sign * (psi^dag)^phi H1 H2 H3 H4 |0>.
    int sign;

    bool operator==(const DressedState &o) const { return phi == o.phi && k == o.k; }
};

// Frozen rishon number per half-link, nullopt when free.
using FrozenMask = std::array<std::optional<int>, 4>;

class DressedBasis {
public:
    DressedBasis(int spin, int parity, FrozenMask frozen = {});

    int spin() const { return spin_; }
    int parity() const { return parity_; }
    const FrozenMask &frozen() const { return frozen_; }
    int dim() const { return int(states_.size()); }
    const DressedState &state(int i) const { return states_[i]; }
    const std::vector<DressedState> &states() const { return states_; }

    // Position of (phi, k) or -1 if not an allowed state.
    int index_of(int phi, const std::array<int, 4> &k) const;

    int charge(int i) const { return states_[i].phi - (1 - parity_) / 2; }
    // Staggered occupation: phi on even sites, 1 - phi on odd sites.
    int occupation(int i) const { return parity_ > 0 ? states_[i].phi : 1 - states_[i].phi; }
    int vacuum_index() const;

private:
    int spin_, parity_;
    FrozenMask frozen_;
    std::vector<DressedState> states_;
    std::vector<int> lookup_; // dense table over (phi, k1..k4)
};

// E = s - k on the half-link.
constexpr int half_link_electric_value(int k, int spin) { return spin - k; }

// Sign making each link state |k_out, 2s - k_out> real positive in the
// electric-field basis built from U acting on the lowest flux.
int rishon_sign(int k);

} // namespace lgt
