#include "lgt/lattice.hpp"

#include "lgt/error.hpp"

#include <cstdlib>

namespace lgt {

std::string to_string(BoundaryPolicy b)
{
    switch (b) {
    case BoundaryPolicy::periodic: return "periodic";
    case BoundaryPolicy::open_frozen_zero_flux: return "open_frozen_zero_flux";
    case BoundaryPolicy::open_free: return "open_free";
    }
    return "?";
}

BoundaryPolicy boundary_from_string(const std::string &s)
{
    if (s == "periodic")
        return BoundaryPolicy::periodic;
    if (s == "open_frozen_zero_flux" || s == "open_frozen")
        return BoundaryPolicy::open_frozen_zero_flux;
    if (s == "open_free" || s == "open")
        return BoundaryPolicy::open_free;
    throw ConfigError("unknown boundary policy '" + s + "'");
}

LatticeGeometry::LatticeGeometry(int lx, int ly, BoundaryPolicy boundary)
    : lx_(lx), ly_(ly), boundary_(boundary)
{
    if (lx < 2 || ly < 2)
        throw ConfigError("lattice dimensions must be at least 2");
    // staggering needs a bipartite torus
    if (boundary == BoundaryPolicy::periodic && (lx % 2 || ly % 2))
        throw ConfigError("periodic lattice needs even dimensions");

    link_index_.assign(num_sites(), {-1, -1, -1, -1});
    for (int s = 0; s < num_sites(); ++s) {
        for (Direction d : {plus_x, plus_y}) {
            auto n = neighbor(s, d);
            if (!n)
                continue;
            int id = int(links_.size());
            links_.push_back({s, *n, d});
            link_index_[s][d] = id;
            link_index_[*n][opposite(d)] = id;
        }
    }
    for (int s = 0; s < num_sites(); ++s) {
        auto b = neighbor(s, plus_x);
        auto d = neighbor(s, plus_y);
        if (!b || !d)
            continue;
        plaquettes_.push_back({{s, *b, *neighbor(*b, plus_y), *d}});
    }
    if (!periodic())
        for (int s = 0; s < num_sites(); ++s)
            for (Direction d : {minus_x, minus_y, plus_x, plus_y})
                if (!neighbor(s, d))
                    edge_.push_back({s, d});
}

std::optional<int> LatticeGeometry::neighbor(int s, Direction d) const
{
    int i = x_of(s), j = y_of(s);
    switch (d) {
    case minus_x: --i; break;
    case plus_x: ++i; break;
    case minus_y: --j; break;
    case plus_y: ++j; break;
    }
    if (periodic()) {
        i = (i + lx_) % lx_;
        j = (j + ly_) % ly_;
    } else if (i < 0 || i >= lx_ || j < 0 || j >= ly_) {
        return std::nullopt;
    }
    return site(i, j);
}

std::optional<int> LatticeGeometry::link_of(int s, Direction d) const
{
    int id = link_index_[s][d];
    if (id < 0)
        return std::nullopt;
    return id;
}

std::array<int, 2> LatticeGeometry::displacement(int a, int b) const
{
    int dx = x_of(b) - x_of(a), dy = y_of(b) - y_of(a);
    if (periodic()) {
        auto fold = [](int v, int l) {
            v = ((v % l) + l) % l;
            return v > l / 2 ? v - l : v;
        };
        dx = fold(dx, lx_);
        dy = fold(dy, ly_);
    }
    return {dx, dy};
}

} // namespace lgt
