#include "lgt/operators.hpp"

#include "lgt/error.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace lgt {

namespace {

// Raw occupation (phi, k) acted on by one mode operator; false if annihilated.
bool apply_mode(int spin, const ModeOp &op, int &phi, std::array<int, 4> &k, int &sign)
{
    if (op.mode == Mode::psi) {
        int target = op.dagger ? 1 : 0;
        if (phi == target)
            return false;
        phi = target;
        return true;
    }
    int d = int(op.mode);
    int next = k[d] + (op.dagger ? 1 : -1);
    if (next < 0 || next > 2 * spin)
        return false;
    int left = phi;
    for (int i = 0; i < d; ++i)
        left += k[i];
    if (left % 2)
        sign = -sign;
    k[d] = next;
    return true;
}

} // namespace

LocalOperator site_word(const DressedBasis &basis, const std::vector<ModeOp> &word)
{
    if (word.size() % 2)
        throw ConfigError("site operator words must contain an even number of fermions");
    const int n = basis.dim();
    LocalOperator out;
    out.matrix = Eigen::MatrixXd::Zero(n, n);
    int dphi = 0;
    for (auto &op : word)
        if (op.mode == Mode::psi)
            dphi += op.dagger ? 1 : -1;
    out.charge_shift = dphi;
    for (int col = 0; col < n; ++col) {
        const auto &st = basis.state(col);
        int phi = st.phi, sign = 1;
        auto k = st.k;
        bool alive = true;
        for (auto it = word.rbegin(); it != word.rend() && alive; ++it)
            alive = apply_mode(basis.spin(), *it, phi, k, sign);
        if (!alive)
            continue;
        int row = basis.index_of(phi, k);
        if (row < 0)
            continue;
        out.matrix(row, col) += sign * basis.state(row).sign * st.sign;
    }
    return out;
}

LocalOperator building_block(const DressedBasis &basis, int which)
{
    auto e = [](Direction d, bool dag) { return ModeOp{eta(d), dag}; };
    const ModeOp psi{Mode::psi, false};
    switch (which) {
    case 1: return site_word(basis, {e(plus_x, true), psi});
    case 2: return site_word(basis, {e(plus_y, true), psi});
    case 3: return site_word(basis, {e(minus_x, true), psi});
    case 4: return site_word(basis, {e(minus_y, true), psi});
    case 5: return site_word(basis, {e(plus_y, true), e(plus_x, false)});
    case 6: return site_word(basis, {e(minus_x, true), e(plus_y, false)});
    case 7: return site_word(basis, {e(minus_y, true), e(minus_x, false)});
    case 8: return site_word(basis, {e(plus_x, true), e(minus_y, false)});
    }
    throw ConfigError("building block index must be in 1..8");
}

namespace {

template <typename F>
LocalOperator diagonal(const DressedBasis &basis, F f)
{
    LocalOperator out;
    out.matrix = Eigen::MatrixXd::Zero(basis.dim(), basis.dim());
    for (int i = 0; i < basis.dim(); ++i)
        out.matrix(i, i) = f(i);
    return out;
}

} // namespace

LocalOperator projector(const DressedBasis &basis, Direction d, int k)
{
    return diagonal(basis, [&](int i) { return basis.state(i).k[d] == k ? 1.0 : 0.0; });
}

LocalOperator electric_field(const DressedBasis &basis, Direction d)
{
    return diagonal(basis, [&](int i) { return double(half_link_electric_value(basis.state(i).k[d], basis.spin())); });
}

LocalOperator occupation(const DressedBasis &basis)
{
    return diagonal(basis, [&](int i) { return double(basis.occupation(i)); });
}

LocalOperator local_charge(const DressedBasis &basis)
{
    return diagonal(basis, [&](int i) { return double(basis.charge(i)); });
}

LocalOperator identity(const DressedBasis &basis)
{
    return diagonal(basis, [](int) { return 1.0; });
}

Couplings physical_line(double g_sq, double a, double m)
{
    if (g_sq <= 0 || a <= 0)
        throw ConfigError("physical line needs g^2 > 0 and a > 0");
    Couplings c;
    c.t = 1.0 / a;
    c.g_e_sq = g_sq / a;
    c.g_m_sq = 8.0 / (g_sq * a);
    c.m = m;
    return c;
}

LocalOperator build_diagonal_ops(const DressedBasis &basis, const Couplings &c, double pin_shift)
{
    const int s = basis.spin();
    return diagonal(basis, [&](int i) {
        const auto &st = basis.state(i);
        double e2 = 0;
        for (int v : st.k) {
            int e = half_link_electric_value(v, s);
            e2 += e * e;
        }
        return (c.m + pin_shift) * basis.occupation(i) + 0.25 * c.g_e_sq * e2;
    });
}

std::vector<std::shared_ptr<const DressedBasis>> site_bases(const LatticeGeometry &g, int spin)
{
    std::map<std::tuple<int, int, int, int, int>, std::shared_ptr<const DressedBasis>> cache;
    std::vector<std::shared_ptr<const DressedBasis>> out;
    const bool frozen = g.boundary() == BoundaryPolicy::open_frozen_zero_flux;
    for (int s = 0; s < g.num_sites(); ++s) {
        FrozenMask mask{};
        std::array<int, 4> key{-1, -1, -1, -1};
        if (frozen)
            for (Direction d : {minus_x, minus_y, plus_x, plus_y})
                if (!g.neighbor(s, d)) {
                    mask[d] = spin;
                    key[d] = spin;
                }
        auto ck = std::make_tuple(g.parity(s), key[0], key[1], key[2], key[3]);
        auto it = cache.find(ck);
        if (it == cache.end())
            it = cache.emplace(ck, std::make_shared<DressedBasis>(spin, g.parity(s), mask)).first;
        out.push_back(it->second);
    }
    return out;
}

namespace {

int add_operator(HamiltonianSpec &h, LocalOperator op)
{
    for (int i = 0; i < int(h.operators.size()); ++i) {
        const auto &o = h.operators[i];
        if (o.matrix.rows() == op.matrix.rows() && o.charge_shift == op.charge_shift && o.matrix == op.matrix)
            return i;
    }
    h.operators.push_back(std::move(op));
    return int(h.operators.size()) - 1;
}

bool add_single_word(HamiltonianSpec &h, TermKind kind, double coefficient, const std::vector<WordOp> &word)
{
    // Stable sort by site; every swap of two fermion operators flips the sign.
    std::vector<int> order(word.size());
    for (size_t i = 0; i < word.size(); ++i)
        order[i] = int(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return word[a].site < word[b].site; });
    int inversions = 0;
    for (size_t i = 0; i < word.size(); ++i)
        for (size_t j = i + 1; j < word.size(); ++j)
            if (word[i].site > word[j].site)
                ++inversions;
    Term term{kind, inversions % 2 ? -coefficient : coefficient, {}};
    size_t i = 0;
    while (i < order.size()) {
        int site = word[order[i]].site;
        std::vector<ModeOp> local;
        while (i < order.size() && word[order[i]].site == site) {
            local.push_back({word[order[i]].mode, word[order[i]].dagger});
            ++i;
        }
        if (local.size() % 2)
            throw ConfigError("operator word has an odd number of fermions on site " + std::to_string(site));
        LocalOperator op = site_word(h.basis(site), local);
        if (op.matrix.isZero(0.0))
            return false;
        term.factors.push_back({site, add_operator(h, std::move(op))});
    }
    h.terms.push_back(std::move(term));
    return true;
}

} // namespace

bool add_word_term(HamiltonianSpec &h, TermKind kind, double coefficient, const std::vector<WordOp> &word,
                   bool with_conjugate)
{
    if (!add_single_word(h, kind, coefficient, word))
        return false;
    if (with_conjugate) {
        std::vector<WordOp> adj(word.rbegin(), word.rend());
        for (auto &w : adj)
            w.dagger = !w.dagger;
        add_single_word(h, kind, coefficient, adj);
    }
    return true;
}

std::vector<WordOp> link_raise_word(const LatticeGeometry &g, int site, Direction d)
{
    std::vector<WordOp> w{{site, eta(d), false}};
    if (auto n = g.neighbor(site, d))
        w.push_back({*n, eta(opposite(d)), true});
    return w;
}

std::vector<WordOp> link_lower_word(const LatticeGeometry &g, int site, Direction d)
{
    std::vector<WordOp> w;
    if (auto n = g.neighbor(site, d))
        w.push_back({*n, eta(opposite(d)), false});
    w.push_back({site, eta(d), true});
    return w;
}

void build_link_penalty(HamiltonianSpec &h, double nu)
{
    const int s = h.couplings.spin;
    for (const auto &l : h.geometry.links()) {
        h.terms.push_back({TermKind::penalty, nu, {}});
        const Direction din = opposite(l.dir);
        for (int k = 0; k <= 2 * s; ++k) {
            LocalOperator a = projector(h.basis(l.site), l.dir, k);
            LocalOperator b = projector(h.basis(l.partner), din, 2 * s - k);
            if (a.matrix.isZero(0.0) || b.matrix.isZero(0.0))
                continue;
            Term t{TermKind::penalty, -nu, {}};
            t.factors.push_back({l.site, add_operator(h, std::move(a))});
            t.factors.push_back({l.partner, add_operator(h, std::move(b))});
            if (t.factors[0].site > t.factors[1].site)
                std::swap(t.factors[0], t.factors[1]);
            h.terms.push_back(std::move(t));
        }
    }
}

namespace {

std::vector<WordOp> concat(std::initializer_list<std::vector<WordOp>> parts)
{
    std::vector<WordOp> out;
    for (auto &p : parts)
        out.insert(out.end(), p.begin(), p.end());
    return out;
}

void add_boundary_terms(HamiltonianSpec &h)
{
    const auto &g = h.geometry;
    const int lx = g.lx(), ly = g.ly();
    auto U = [&](int i, int j, Direction d) { return link_raise_word(g, g.site(i, j), d); };
    auto Ud = [&](int i, int j, Direction d) { return link_lower_word(g, g.site(i, j), d); };
    const double jb = h.couplings.j_b;
    const int L = lx - 1, T = ly - 1;
    for (int j = 0; j + 1 < ly; ++j) {
        add_word_term(h, TermKind::boundary, jb, concat({Ud(0, j, minus_x), U(0, j, plus_y), U(0, j + 1, minus_x)}));
        add_word_term(h, TermKind::boundary, jb, concat({Ud(L, j + 1, plus_x), Ud(L, j, plus_y), U(L, j, plus_x)}));
    }
    for (int i = 0; i + 1 < lx; ++i) {
        add_word_term(h, TermKind::boundary, jb, concat({Ud(i, T, plus_y), U(i, T, plus_x), U(i + 1, T, plus_y)}));
        add_word_term(h, TermKind::boundary, jb, concat({Ud(i + 1, 0, minus_y), Ud(i, 0, plus_x), U(i, 0, minus_y)}));
    }
    add_word_term(h, TermKind::boundary, jb, concat({Ud(0, T, minus_x), U(0, T, plus_y)}));
    add_word_term(h, TermKind::boundary, jb, concat({Ud(L, T, plus_y), U(L, T, plus_x)}));
    add_word_term(h, TermKind::boundary, jb, concat({U(L, 0, plus_x), Ud(L, 0, minus_y)}));
    add_word_term(h, TermKind::boundary, jb, concat({Ud(0, 0, minus_y), U(0, 0, minus_x)}));
}

} // namespace

HamiltonianSpec assemble_hamiltonian(const LatticeGeometry &g, const Couplings &c)
{
    if (c.spin != 1 && c.spin != 2)
        throw ConfigError("link spin must be 1 or 2");
    if (c.nu < 0)
        throw ConfigError("penalty strength must be non-negative");
    if (c.boundary_term == BoundaryTerm::dirichlet && g.boundary() != BoundaryPolicy::open_free)
        throw ConfigError("Dirichlet boundary term needs open_free boundaries");
    for (auto &p : c.pinned)
        if (p.site < 0 || p.site >= g.num_sites())
            throw ConfigError("pinned charge site out of range");

    HamiltonianSpec h{g, c, site_bases(g, c.spin), {}, {}};

    std::vector<double> pin(g.num_sites(), 0.0);
    for (auto &p : c.pinned)
        pin[p.site] += p.shift;
    for (int s = 0; s < g.num_sites(); ++s) {
        int op = add_operator(h, build_diagonal_ops(h.basis(s), c, pin[s]));
        h.terms.push_back({TermKind::local, 1.0, {{s, op}}});
    }

    if (c.t != 0.0)
        for (const auto &l : g.links()) {
            std::vector<WordOp> w{{l.site, Mode::psi, true},
                                  {l.site, eta(l.dir), false},
                                  {l.partner, eta(opposite(l.dir)), true},
                                  {l.partner, Mode::psi, false}};
            add_word_term(h, TermKind::hopping, -c.t, w);
        }

    if (c.g_m_sq != 0.0)
        for (const auto &p : g.plaquettes()) {
            auto [x, b, cc, d] = p.corners;
            (void)cc;
            auto w = concat({link_raise_word(g, x, plus_x), link_raise_word(g, b, plus_y),
                             link_lower_word(g, d, plus_x), link_lower_word(g, x, plus_y)});
            add_word_term(h, TermKind::plaquette, -0.5 * c.g_m_sq, w);
        }

    if (c.boundary_term == BoundaryTerm::dirichlet && c.j_b != 0.0)
        add_boundary_terms(h);

    if (c.nu > 0)
        build_link_penalty(h, c.nu);
    return h;
}

std::string to_string(TermKind k)
{
    switch (k) {
    case TermKind::local: return "local";
    case TermKind::hopping: return "hopping";
    case TermKind::plaquette: return "plaquette";
    case TermKind::boundary: return "boundary";
    case TermKind::penalty: return "penalty";
    }
    return "?";
}

} // namespace lgt
