#include "lgt/dressed_basis.hpp"

#include "lgt/error.hpp"

namespace lgt {

int rishon_sign(int k) { return (k / 2) % 2 == 0 ? 1 : -1; }

namespace {

int table_size(int spin) { return 2 * (2 * spin + 1) * (2 * spin + 1) * (2 * spin + 1) * (2 * spin + 1); }

int table_key(int spin, int phi, const std::array<int, 4> &k)
{
    int n = 2 * spin + 1;
    return (((phi * n + k[0]) * n + k[1]) * n + k[2]) * n + k[3];
}

} // namespace

DressedBasis::DressedBasis(int spin, int parity, FrozenMask frozen)
    : spin_(spin), parity_(parity), frozen_(frozen)
{
    if (spin != 1 && spin != 2)
        throw ConfigError("link spin must be 1 or 2");
    if (parity != 1 && parity != -1)
        throw ConfigError("site parity must be +1 or -1");
    const int kmax = 2 * spin;
    for (auto &f : frozen_)
        if (f && (*f < 0 || *f > kmax))
            throw ConfigError("frozen rishon number out of range");

    const int total = 4 * spin + (1 - parity) / 2;
    lookup_.assign(table_size(spin), -1);
    std::array<int, 4> k{};
    for (int phi = 0; phi <= 1; ++phi)
        for (k[0] = 0; k[0] <= kmax; ++k[0])
            for (k[1] = 0; k[1] <= kmax; ++k[1])
                for (k[2] = 0; k[2] <= kmax; ++k[2])
                    for (k[3] = 0; k[3] <= kmax; ++k[3]) {
                        if (phi + k[0] + k[1] + k[2] + k[3] != total)
                            continue;
                        bool ok = true;
                        for (int d = 0; d < 4; ++d)
                            if (frozen_[d] && *frozen_[d] != k[d])
                                ok = false;
                        if (!ok)
                            continue;
                        lookup_[table_key(spin, phi, k)] = int(states_.size());
                        // incoming half-links carry the link-state sign
                        states_.push_back({phi, k, rishon_sign(k[0]) * rishon_sign(k[1])});
                    }
}

int DressedBasis::index_of(int phi, const std::array<int, 4> &k) const
{
    if (phi < 0 || phi > 1)
        return -1;
    for (int v : k)
        if (v < 0 || v > 2 * spin_)
            return -1;
    return lookup_[table_key(spin_, phi, k)];
}

int DressedBasis::vacuum_index() const
{
    int phi = parity_ > 0 ? 0 : 1;
    return index_of(phi, {spin_, spin_, spin_, spin_});
}

} // namespace lgt
