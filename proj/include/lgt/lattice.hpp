#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace lgt {

enum class BoundaryPolicy { periodic, open_frozen_zero_flux, open_free };

std::string to_string(BoundaryPolicy b);
BoundaryPolicy boundary_from_string(const std::string &s);

// Half-link directions in the order used by the dressed-site labels k1..k4.
enum Direction : int { minus_x = 0, minus_y = 1, plus_x = 2, plus_y = 3 };

constexpr Direction opposite(Direction d) { return Direction((d + 2) % 4); }
constexpr bool is_positive(Direction d) { return d >= plus_x; }

struct Link {
    int site;      // tail x
    int partner;   // head x + mu
    Direction dir; // plus_x or plus_y
};

// Corners listed counter-clockwise starting from the lower-left site.
struct Plaquette {
    std::array<int, 4> corners;
};

struct HalfLink {
    int site;
    Direction dir;
};

class LatticeGeometry {
public:
    LatticeGeometry(int lx, int ly, BoundaryPolicy boundary);

    int lx() const { return lx_; }
    int ly() const { return ly_; }
    int num_sites() const { return lx_ * ly_; }
    BoundaryPolicy boundary() const { return boundary_; }
    bool periodic() const { return boundary_ == BoundaryPolicy::periodic; }

    // Row-major: site = i + lx * j.
    int site(int i, int j) const { return i + lx_ * j; }
    int x_of(int site) const { return site % lx_; }
    int y_of(int site) const { return site / lx_; }
    // +1 on even sites, -1 on odd sites.
    int parity(int site) const { return (x_of(site) + y_of(site)) % 2 == 0 ? 1 : -1; }

    std::optional<int> neighbor(int site, Direction d) const;

    const std::vector<Link> &links() const { return links_; }
    const std::vector<Plaquette> &plaquettes() const { return plaquettes_; }
    // Half-links pointing out of an open lattice; empty when periodic.
    const std::vector<HalfLink> &boundary_half_links() const { return edge_; }

    // Link carried by the half-link (site, d), if any.
    std::optional<int> link_of(int site, Direction d) const;

    // Shortest displacement from a to b, folded into the torus when periodic.
    std::array<int, 2> displacement(int a, int b) const;

private:
    int lx_, ly_;
    BoundaryPolicy boundary_;
    std::vector<Link> links_;
    std::vector<Plaquette> plaquettes_;
    std::vector<HalfLink> edge_;
    std::vector<std::array<int, 4>> link_index_; // per site, per direction, -1 if none
};

} // namespace lgt
