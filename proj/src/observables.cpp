#include "lgt/observables.hpp"

#include "lgt/error.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <map>
#include <stdexcept>

namespace lgt {

EdView::EdView(const HamiltonianSpec &h, const ConstrainedBasis &basis, Eigen::VectorXd vector)
    : h_(h), basis_(basis), v_(std::move(vector))
{
    if (v_.size() != basis.size())
        throw ConfigError("state vector does not match the basis");
}

double EdView::expectation(const FactorList &factors) const
{
    const int n = basis_.num_sites();
    bool diagonal = true;
    for (auto &[s, op] : factors)
        diagonal = diagonal && op->matrix.isDiagonal(0.0);
    double acc = 0;
    if (diagonal) {
        for (std::int64_t c = 0; c < basis_.size(); ++c) {
            if (v_(c) == 0)
                continue;
            const std::uint8_t *cfg = basis_.config(c);
            double p = 1;
            for (auto &[s, op] : factors)
                p *= op->matrix(cfg[s], cfg[s]);
            acc += v_(c) * v_(c) * p;
        }
        return acc;
    }
    std::vector<std::uint8_t> out(n);
    for (std::int64_t c = 0; c < basis_.size(); ++c) {
        if (v_(c) == 0)
            continue;
        const std::uint8_t *cfg = basis_.config(c);
        std::memcpy(out.data(), cfg, n);
        std::function<void(size_t, double)> rec = [&](size_t f, double amp) {
            if (f == factors.size()) {
                std::int64_t r = basis_.find(out.data());
                if (r >= 0)
                    acc += v_(r) * amp * v_(c);
                return;
            }
            auto [s, op] = factors[f];
            for (int row = 0; row < op->matrix.rows(); ++row) {
                double x = op->matrix(row, cfg[s]);
                if (x == 0)
                    continue;
                out[s] = std::uint8_t(row);
                rec(f + 1, amp * x);
            }
            out[s] = cfg[s];
        };
        rec(0, 1.0);
    }
    return acc;
}

double EdView::energy() const
{
    Eigen::SparseMatrix<double> H = build_sparse_hamiltonian(h_, basis_);
    return v_.dot(H * v_);
}

double TtnView::energy() const
{
    double e = 0;
    for (auto &t : h_.terms) {
        if (t.kind == TermKind::penalty)
            continue;
        if (t.factors.empty()) {
            e += t.coefficient;
            continue;
        }
        FactorList f;
        for (auto &fa : t.factors)
            f.push_back({fa.site, &h_.operators[fa.op]});
        e += t.coefficient * lgt::expectation(st_, h_, f);
    }
    return e;
}

namespace {

std::vector<double> site_values(const StateView &s, LocalOperator (*make)(const DressedBasis &))
{
    const auto &h = s.spec();
    std::vector<double> out(h.num_sites());
    for (int x = 0; x < h.num_sites(); ++x) {
        LocalOperator op = make(h.basis(x));
        out[x] = s.expectation({{x, &op}});
    }
    return out;
}

LocalOperator order_parameter(const DressedBasis &b)
{
    // (-1)^x (2 psi^dag psi - 1) = 2 n_x - 1 on both sublattices
    LocalOperator op = occupation(b);
    op.matrix = 2 * op.matrix - Eigen::MatrixXd::Identity(b.dim(), b.dim());
    return op;
}

int ring_depth(const LatticeGeometry &g, int x)
{
    int i = g.x_of(x), j = g.y_of(x);
    return std::min(std::min(i, g.lx() - 1 - i), std::min(j, g.ly() - 1 - j)) + 1;
}

struct PairData {
    Eigen::MatrixXd c;     // <O_x O_y>
    Eigen::VectorXd mean;  // <O_x>
};

PairData pair_correlations(const StateView &s)
{
    const auto &h = s.spec();
    const int n = h.num_sites();
    std::vector<LocalOperator> ops;
    for (int x = 0; x < n; ++x)
        ops.push_back(order_parameter(h.basis(x)));
    PairData d;
    d.c.resize(n, n);
    d.mean.resize(n);
    for (int x = 0; x < n; ++x) {
        d.mean(x) = s.expectation({{x, &ops[x]}});
        // O_x^2 = 1, measured anyway
        LocalOperator sq = ops[x];
        sq.matrix = ops[x].matrix * ops[x].matrix;
        d.c(x, x) = s.expectation({{x, &sq}});
        for (int y = x + 1; y < n; ++y)
            d.c(x, y) = d.c(y, x) = s.expectation({{x, &ops[x]}, {y, &ops[y]}});
    }
    return d;
}

std::vector<CorrelationPoint> average_pairs(const LatticeGeometry &g, const PairData &d, const CorrelationOptions &opt)
{
    const int n = g.num_sites();
    const int lx = g.lx(), ly = g.ly();
    auto excluded = [&](int x) { return !g.periodic() && opt.exclude_rings > 0 && ring_depth(g, x) <= opt.exclude_rings; };
    int count = 0;
    for (int x = 0; x < n; ++x)
        count += !excluded(x);
    if (count == 0)
        throw ConfigError("ring exclusion removes every site");
    std::map<std::pair<int, int>, double> acc;
    if (g.periodic()) {
        for (int dy = -(ly - 1) / 2; dy <= ly / 2; ++dy)
            for (int dx = -(lx - 1) / 2; dx <= lx / 2; ++dx)
                acc[{dx, dy}] = 0;
    } else {
        for (int dy = -(ly - 1); dy <= ly - 1; ++dy)
            for (int dx = -(lx - 1); dx <= lx - 1; ++dx)
                acc[{dx, dy}] = 0;
    }
    for (int x = 0; x < n; ++x) {
        if (excluded(x))
            continue;
        for (int y = 0; y < n; ++y) {
            if (excluded(y))
                continue;
            int dx = g.x_of(y) - g.x_of(x), dy = g.y_of(y) - g.y_of(x);
            if (g.periodic()) {
                dx = ((dx % lx) + lx) % lx;
                dy = ((dy % ly) + ly) % ly;
                if (dx > lx / 2)
                    dx -= lx;
                if (dy > ly / 2)
                    dy -= ly;
            }
            double v = d.c(x, y);
            if (opt.connected)
                v -= d.mean(x) * d.mean(y);
            acc[{dx, dy}] += v;
        }
    }
    std::vector<CorrelationPoint> out;
    for (auto &[k, v] : acc)
        out.push_back({k.first, k.second, v / count});
    return out;
}

} // namespace

std::pair<std::vector<double>, double> particle_density(const StateView &s)
{
    auto d = site_values(s, occupation);
    double avg = 0;
    for (double v : d)
        avg += v;
    return {d, avg / double(d.size())};
}

std::vector<double> charge_profile(const StateView &s)
{
    return site_values(s, local_charge);
}

std::vector<LinkField> electric_field_map(const StateView &s)
{
    const auto &h = s.spec();
    const auto &g = h.geometry;
    std::vector<LinkField> out;
    auto half = [&](int site, Direction d) {
        LocalOperator e = electric_field(h.basis(site), d);
        return s.expectation({{site, &e}});
    };
    for (auto &l : g.links()) {
        LinkField f{l.site, l.dir, l.partner, half(l.site, l.dir), 0, 0};
        f.partner_field = -half(l.partner, opposite(l.dir));
        f.violation = std::abs(f.field - f.partner_field);
        out.push_back(f);
    }
    for (auto &b : g.boundary_half_links()) {
        double e = half(b.site, b.dir);
        out.push_back({b.site, b.dir, -1, e, e, 0});
    }
    return out;
}

std::vector<CorrelationPoint> correlation_matrix(const StateView &s, const CorrelationOptions &opt)
{
    return average_pairs(s.spec().geometry, pair_correlations(s), opt);
}

double correlation_length_estimate(const std::vector<CorrelationPoint> &cbar, XiVariant variant)
{
    double num = 0, den = 0;
    for (auto &p : cbar) {
        num += double(p.dx * p.dx + p.dy * p.dy) * p.value;
        den += p.value;
    }
    if (variant == XiVariant::connected)
        den *= 6;
    if (!(den > 0))
        throw std::domain_error("correlator sum is not positive");
    if (num < 0)
        throw std::domain_error("negative second moment of the correlator");
    return std::sqrt(num / den);
}

std::vector<int> ring_sites(int L, int l)
{
    if (l < 1 || 2 * l > L)
        throw ConfigError("ring depth out of range");
    std::vector<int> out;
    for (int j = 0; j < L; ++j)
        for (int i = 0; i < L; ++i)
            if (std::min(std::min(i, L - 1 - i), std::min(j, L - 1 - j)) == l - 1)
                out.push_back(i + L * j);
    return out;
}

std::vector<double> surface_charge_profile(const std::vector<double> &per_site, int L)
{
    if (L < 2 || L % 2)
        throw ConfigError("surface profile needs an even lattice size");
    if (int(per_site.size()) != L * L)
        throw ConfigError("per-site data does not match the lattice");
    std::vector<double> out;
    for (int l = 1; l <= L / 2; ++l) {
        auto ring = ring_sites(L, l);
        double acc = 0;
        for (int x : ring)
            acc += per_site[x];
        out.push_back(acc / double(ring.size()));
    }
    return out;
}

ObservableReport make_report(const StateView &s, int charge, const ReportOptions &opt)
{
    const auto &h = s.spec();
    const auto &g = h.geometry;
    ObservableReport r;
    r.lx = g.lx();
    r.ly = g.ly();
    r.boundary = g.boundary();
    r.couplings = h.couplings;
    r.charge = charge;
    r.solver = s.solver();
    std::tie(r.density, r.average_density) = particle_density(s);
    r.site_charge = charge_profile(s);
    r.fields = electric_field_map(s);
    for (auto &f : r.fields)
        r.max_link_violation = std::max(r.max_link_violation, f.violation);
    if (r.max_link_violation > opt.link_tolerance)
        r.warnings.push_back("link symmetry violated by " + std::to_string(r.max_link_violation));
    r.energy = s.energy();
    r.energy_density = r.energy / g.num_sites();
    if (!g.periodic() && g.lx() == g.ly() && g.lx() % 2 == 0)
        r.surface_charge = surface_charge_profile(r.density, g.lx());
    if (opt.correlations) {
        PairData d = pair_correlations(s);
        CorrelationOptions co;
        co.exclude_rings = opt.exclude_rings;
        r.correlation = average_pairs(g, d, co);
        co.connected = true;
        r.connected_correlation = average_pairs(g, d, co);
        try {
            r.xi_full = correlation_length_estimate(r.correlation, XiVariant::full);
        } catch (const std::domain_error &e) {
            r.warnings.push_back(std::string("xi_full: ") + e.what());
        }
        try {
            r.xi_connected = correlation_length_estimate(r.connected_correlation, XiVariant::connected);
        } catch (const std::domain_error &e) {
            r.warnings.push_back(std::string("xi_connected: ") + e.what());
        }
    }
    return r;
}

} // namespace lgt
