#include "lgt/ttn.hpp"

#include "lgt/error.hpp"
#include "lgt/lanczos.hpp"
#include "ttn_environment.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace lgt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Tensor = BlockTensor<double>;

// ---------------------------------------------------------------- tree

TreeLayout::TreeLayout(const LatticeGeometry &g)
{
    struct Rect {
        int x0, x1, y0, y1;
    };
    std::function<int(Rect, int, int)> build = [&](Rect r, int parent, int slot) -> int {
        int w = r.x1 - r.x0, h = r.y1 - r.y0;
        if (w == 1 && h == 1)
            return -(g.site(r.x0, r.y0) + 1);
        int id = int(nodes_.size());
        nodes_.push_back({});
        nodes_[id].parent = parent;
        nodes_[id].slot = slot;
        Rect a = r, b = r;
        if (w >= h) {
            a.x1 = b.x0 = r.x0 + (w + 1) / 2;
        } else {
            a.y1 = b.y0 = r.y0 + (h + 1) / 2;
        }
        int ca = build(a, id, 0);
        int cb = build(b, id, 1);
        nodes_[id].children = {ca, cb};
        for (int c : {ca, cb}) {
            if (is_leaf(c))
                nodes_[id].sites.push_back(leaf_site(c));
            else
                nodes_[id].sites.insert(nodes_[id].sites.end(), nodes_[c].sites.begin(), nodes_[c].sites.end());
        }
        return id;
    };
    build({0, g.lx(), 0, g.ly()}, -1, 0);
}

std::vector<int> TreeLayout::post_order() const
{
    std::vector<int> out;
    std::function<void(int)> rec = [&](int n) {
        for (int c : nodes_[n].children)
            if (!is_leaf(c))
                rec(c);
        out.push_back(n);
    };
    rec(0);
    return out;
}

std::vector<int> TreeLayout::euler_tour() const
{
    std::vector<int> out;
    std::function<void(int)> rec = [&](int n) {
        out.push_back(n);
        for (int c : nodes_[n].children)
            if (!is_leaf(c)) {
                rec(c);
                out.push_back(n);
            }
    };
    rec(0);
    return out;
}

// ---------------------------------------------------------------- schedule

PenaltySchedule PenaltySchedule::defaults(const Couplings &c)
{
    double scale = std::max({std::abs(c.t), std::abs(c.m), c.g_e_sq / 2, c.g_m_sq / 2, 1e-3});
    PenaltySchedule s;
    s.nu0 = scale / 4;
    s.delta = s.nu0;
    s.beta = s.nu0 / 4;
    s.nu_max = 10 * scale;
    return s;
}

double PenaltySchedule::nu() const
{
    double v = k_star < 0 ? nu0 + k * delta : nu_star + beta * double(k - k_star) * double(k - k_star);
    return std::min(v, nu_max);
}

void PenaltySchedule::advance(double sweep_energy)
{
    if (k_star < 0 && has_energy && sweep_energy > last_energy) {
        nu_star = nu();
        k_star = k;
    }
    last_energy = sweep_energy;
    has_energy = true;
    ++k;
}

// ---------------------------------------------------------------- leaves

BondSpace physical_space(const DressedBasis &b)
{
    BondSpace s;
    int prev = std::numeric_limits<int>::min();
    for (int i = 0; i < b.dim(); ++i) {
        int q = b.charge(i);
        if (q < prev)
            throw SolverError("dressed basis not grouped by charge");
        prev = q;
        s.set(q, s.dim(q) + 1);
    }
    return s;
}

BlockMatrix<double> to_block(const DressedBasis &b, const LocalOperator &op)
{
    BondSpace s = physical_space(b);
    std::vector<Index> start;
    Index off = 0;
    for (Index d : s.dims) {
        start.push_back(off);
        off += d;
    }
    BlockMatrix<double> out;
    for (size_t r = 0; r < s.charges.size(); ++r)
        for (size_t c = 0; c < s.charges.size(); ++c) {
            Matrix m = op.matrix.block(start[r], start[c], s.dims[r], s.dims[c]);
            if (!m.isZero(0.0))
                out.blocks.emplace(std::make_pair(s.charges[r], s.charges[c]), std::move(m));
        }
    return out;
}

// ---------------------------------------------------------------- init

namespace {

BondSpace child_space(const TtnState &st, int c)
{
    return is_leaf(c) ? st.physical[leaf_site(c)] : st.tensors[c].legs[2];
}

// Random matrix with orthonormal columns.
Matrix random_isometry(Index rows, Index cols, std::mt19937_64 &rng)
{
    std::normal_distribution<double> g;
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i)
        m.data()[i] = g(rng);
    Eigen::HouseholderQR<Matrix> qr(m);
    return qr.householderQ() * Matrix::Identity(rows, cols);
}

} // namespace

TtnState init_random(const HamiltonianSpec &h, int charge, int chi, std::uint64_t seed)
{
    if (chi < 1)
        throw ConfigError("bond dimension must be positive");
    TtnState st;
    st.tree = TreeLayout(h.geometry);
    st.charge = charge;
    st.chi = chi;
    st.seed = seed;
    st.center = 0;
    st.schedule = PenaltySchedule::defaults(h.couplings);
    const int ns = h.num_sites();
    for (int s = 0; s < ns; ++s)
        st.physical.push_back(physical_space(h.basis(s)));

    // charge range of every site, for the reachability window
    std::vector<int> qlo(ns), qhi(ns);
    int total_lo = 0, total_hi = 0;
    for (int s = 0; s < ns; ++s) {
        qlo[s] = st.physical[s].charges.front();
        qhi[s] = st.physical[s].charges.back();
        total_lo += qlo[s];
        total_hi += qhi[s];
    }
    if (charge < total_lo || charge > total_hi)
        throw ConfigError("total charge " + std::to_string(charge) + " outside the reachable range");

    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 20; ++attempt) {
        st.tensors.assign(st.tree.size(), Tensor{});
        bool ok = true;
        for (int n : st.tree.post_order()) {
            const auto &node = st.tree.node(n);
            Tensor t;
            t.legs[0] = child_space(st, node.children[0]);
            t.legs[1] = child_space(st, node.children[1]);
            BondSpace fused = fuse(t.legs[0], t.legs[1]);
            BondSpace up;
            if (n == 0) {
                if (fused.dim(charge) == 0) {
                    ok = false;
                    break;
                }
                up.set(charge, 1);
            } else {
                int lo = 0, hi = 0;
                for (int s : node.sites) {
                    lo += qlo[s];
                    hi += qhi[s];
                }
                // the complement must be able to supply the rest of the charge
                int clo = total_lo - lo, chi_ = total_hi - hi;
                std::vector<int> qs;
                std::vector<Index> cap;
                for (size_t i = 0; i < fused.charges.size(); ++i) {
                    int q = fused.charges[i];
                    if (charge - q < clo || charge - q > chi_)
                        continue;
                    qs.push_back(q);
                    cap.push_back(fused.dims[i]);
                }
                if (qs.empty()) {
                    ok = false;
                    break;
                }
                // random allocation of chi states over the admissible sectors
                std::vector<Index> alloc(qs.size(), 0);
                Index budget = chi, room = 0;
                for (Index c : cap)
                    room += c;
                budget = std::min<Index>(budget, room);
                std::vector<size_t> order(qs.size());
                for (size_t i = 0; i < qs.size(); ++i)
                    order[i] = i;
                std::shuffle(order.begin(), order.end(), rng);
                for (size_t i : order)
                    if (budget > 0 && alloc[i] < cap[i]) {
                        ++alloc[i];
                        --budget;
                    }
                while (budget > 0) {
                    std::vector<double> w;
                    for (size_t i = 0; i < qs.size(); ++i)
                        w.push_back(double(cap[i] - alloc[i]));
                    std::discrete_distribution<size_t> pick(w.begin(), w.end());
                    ++alloc[pick(rng)];
                    --budget;
                }
                for (size_t i = 0; i < qs.size(); ++i)
                    if (alloc[i] > 0)
                        up.set(qs[i], alloc[i]);
            }
            t.legs[2] = up;
            std::map<int, Matrix> mats;
            for (size_t i = 0; i < up.charges.size(); ++i) {
                int q = up.charges[i];
                mats[q] = random_isometry(sector_rows(t, 2, q), up.dims[i], rng);
            }
            st.tensors[n] = join_leg(t.legs, 2, mats);
        }
        if (ok) {
            auto &root = st.tensors[0];
            root.scale(1.0 / root.norm());
            return st;
        }
    }
    throw ConfigError("could not build a network in charge sector " + std::to_string(charge));
}

// ---------------------------------------------------------------- sweeps

namespace {

struct Sweeper {
    TtnState &st;
    Environment &env;
    const SweepTolerances &tol;
    std::mt19937_64 rng;
    double nu = 0, eps = 1e-6;
    double max_entropy = 0, max_trunc = 0;
    double last_energy = 0;

    // Leg of a pointing to b and of b pointing to a.
    std::pair<int, int> legs_between(int a, int b) const
    {
        if (st.tree.node(a).parent == b)
            return {2, st.tree.node(a).slot};
        return {st.tree.node(b).slot, 2};
    }

    // Charges the bond may carry as seen from b's other two legs.
    std::vector<int> admissible(const Tensor &t, int leg) const
    {
        std::vector<int> out;
        if (leg == 2) {
            out = fuse(t.legs[0], t.legs[1]).charges;
        } else {
            const auto &o = t.legs[1 - leg];
            for (int q2 : t.legs[2].charges)
                for (int qo : o.charges)
                    out.push_back(q2 - qo);
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
        }
        return out;
    }

    void optimize(int n)
    {
        Tensor &t = st.tensors[n];
        Tensor shape = t;
        auto apply = [&](const Vector &v) -> Vector {
            Tensor x = shape;
            x.unpack(v);
            return env.apply(n, x, 1.0, nu).pack();
        };
        KrylovOptions ko;
        ko.nev = 1;
        ko.tol = eps;
        ko.max_matvecs = tol.local_max_matvecs;
        ko.max_basis = 24;
        ko.probes = 0;
        ko.seed = unsigned(rng());
        Vector v0 = t.pack();
        if (v0.norm() == 0)
            v0 = Vector::Ones(v0.size());
        auto r = lowest_eigenpairs<double>(apply, v0, ko);
        t.unpack(r.vectors.col(0));
        last_energy = r.values(0);
    }

    void move(int a, int b)
    {
        auto [la, lb] = legs_between(a, b);
        Tensor &ta = st.tensors[a];
        Tensor &tb = st.tensors[b];

        // 1. split a over the bond, keep its full rank, pad with random directions
        auto split = split_leg(ta, la);
        std::map<int, Matrix> umats;
        BlockMatrix<double> carry;
        double smax = 0;
        std::map<int, Eigen::BDCSVD<Matrix>> svds;
        for (auto &[q, m] : split.sectors) {
            auto &svd = svds.emplace(q, Eigen::BDCSVD<Matrix>(m, Eigen::ComputeThinU | Eigen::ComputeThinV)).first->second;
            if (svd.singularValues().size())
                smax = std::max(smax, svd.singularValues()(0));
        }
        for (auto &[q, svd] : svds) {
            const auto &s = svd.singularValues();
            Index r = 0;
            while (r < s.size() && s(r) > 1e-14 * smax)
                ++r;
            umats[q] = svd.matrixU().leftCols(r);
            if (r > 0)
                carry.blocks.emplace(std::make_pair(q, q), s.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose());
        }

        const int want = std::max(tol.pad_min, int(std::lround(tol.pad_fraction * st.chi)));
        std::vector<int> cand;
        for (int q : admissible(tb, lb))
            if (sector_rows(ta, la, q) > (umats.count(q) ? umats[q].cols() : 0))
                cand.push_back(q);
        std::map<int, Index> pad;
        for (int i = 0; i < want && !cand.empty(); ++i) {
            std::vector<double> w;
            for (int q : cand)
                w.push_back(double(sector_rows(ta, la, q) - (umats.count(q) ? umats[q].cols() : 0) - pad[q]));
            double tot = 0;
            for (double x : w)
                tot += x;
            if (tot <= 0)
                break;
            std::discrete_distribution<size_t> pick(w.begin(), w.end());
            ++pad[cand[pick(rng)]];
        }
        std::normal_distribution<double> gauss;
        for (auto &[q, p] : pad) {
            if (p == 0)
                continue;
            Index rows = sector_rows(ta, la, q);
            Matrix u = umats.count(q) ? umats[q] : Matrix(rows, 0);
            Matrix x(rows, p);
            for (Index i = 0; i < x.size(); ++i)
                x.data()[i] = gauss(rng);
            for (int pass = 0; pass < 2; ++pass)
                if (u.cols())
                    x -= u * (u.transpose() * x);
            // x is orthogonal to u, so is its orthonormalized span
            Eigen::HouseholderQR<Matrix> qr(x);
            Matrix joined(rows, u.cols() + p);
            joined << u, Matrix(qr.householderQ() * Matrix::Identity(rows, p));
            umats[q] = joined;
            auto it = carry.blocks.find({q, q});
            if (it != carry.blocks.end()) {
                Matrix c = Matrix::Zero(u.cols() + p, it->second.cols());
                c.topRows(u.cols()) = it->second;
                it->second = c;
            }
        }
        ta = join_leg(ta.legs, la, umats);
        tb = apply_leg(carry, lb, tb, ta.legs[la]);

        // 2. bond data from a's side, then optimize b
        if (la == 2)
            env.update_below(a, ta);
        else
            env.update_above(b, ta);
        optimize(b);

        // 3. truncate the bond by b's singular values
        truncate(a, b, la, lb);
        st.center = b;
    }

    void truncate(int a, int b, int la, int lb)
    {
        Tensor &ta = st.tensors[a];
        Tensor &tb = st.tensors[b];
        auto split = split_leg(tb, lb);
        struct Sv {
            double s;
            int q;
            Index i;
        };
        std::vector<Sv> all;
        std::map<int, Eigen::BDCSVD<Matrix>> svds;
        for (auto &[q, m] : split.sectors) {
            auto &svd = svds.emplace(q, Eigen::BDCSVD<Matrix>(m, Eigen::ComputeThinU | Eigen::ComputeThinV)).first->second;
            for (Index i = 0; i < svd.singularValues().size(); ++i)
                all.push_back({svd.singularValues()(i), q, i});
        }
        std::stable_sort(all.begin(), all.end(), [](const Sv &x, const Sv &y) {
            if (x.s != y.s)
                return x.s > y.s;
            return x.q < y.q;
        });
        double norm2 = 0;
        for (auto &v : all)
            norm2 += v.s * v.s;
        const double smax = all.empty() ? 0 : all.front().s;
        std::map<int, Index> keep;
        double kept2 = 0, entropy = 0;
        for (size_t i = 0; i < all.size() && int(i) < st.chi; ++i) {
            if (all[i].s <= 1e-14 * smax)
                break;
            ++keep[all[i].q];
            kept2 += all[i].s * all[i].s;
        }
        if (norm2 > 0)
            for (auto &v : all) {
                double p = v.s * v.s / norm2;
                if (p > 0)
                    entropy -= p * std::log(p);
            }
        max_entropy = std::max(max_entropy, entropy);
        if (norm2 > 0)
            max_trunc = std::max(max_trunc, 1 - kept2 / norm2);

        std::map<int, Matrix> bm;
        BlockMatrix<double> w;
        for (auto &[q, svd] : svds) {
            Index k = keep.count(q) ? keep[q] : 0;
            if (k == 0)
                continue;
            bm[q] = svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal();
            w.blocks.emplace(std::make_pair(q, q), svd.matrixV().leftCols(k).transpose());
        }
        tb = join_leg(tb.legs, lb, bm);
        tb.scale(1.0 / tb.norm());
        ta = apply_leg(w, la, ta, tb.legs[lb]);
        SideOps &side = env.bond_side(a, b);
        side.h_phys = project(side.h_phys, w);
        side.h_pen = project(side.h_pen, w);
        for (auto &[i, op] : side.partial)
            op = project(op, w);
    }
};

// Work copy of the Hamiltonian with a unit-strength link penalty.
HamiltonianSpec unit_penalty(const HamiltonianSpec &h)
{
    HamiltonianSpec w = h;
    w.terms.erase(std::remove_if(w.terms.begin(), w.terms.end(),
                                 [](const Term &t) { return t.kind == TermKind::penalty; }),
                  w.terms.end());
    build_link_penalty(w, 1.0);
    return w;
}

// Move the orthogonality center to the root by QR steps, without truncation.
void center_to_root(TtnState &st)
{
    while (st.center != 0) {
        int a = st.center, b = st.tree.node(a).parent;
        int la = 2, lb = st.tree.node(a).slot;
        auto split = split_leg(st.tensors[a], la);
        std::map<int, Matrix> qm;
        BlockMatrix<double> r;
        for (auto &[q, m] : split.sectors) {
            Eigen::HouseholderQR<Matrix> qr(m);
            Index k = std::min(m.rows(), m.cols());
            qm[q] = qr.householderQ() * Matrix::Identity(m.rows(), k);
            Matrix rr = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
            r.blocks.emplace(std::make_pair(q, q), rr);
        }
        st.tensors[a] = join_leg(st.tensors[a].legs, la, qm);
        st.tensors[b] = apply_leg(r, lb, st.tensors[b], st.tensors[a].legs[la]);
        st.center = b;
    }
}

} // namespace

SearchResult ground_state_search(TtnState state, const HamiltonianSpec &h, const SweepTolerances &tol)
{
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    SearchResult res;
    HamiltonianSpec work = unit_penalty(h);
    center_to_root(state);
    state.tensors[0].scale(1.0 / state.tensors[0].norm());
    Environment env(state, work);
    for (int n : state.tree.post_order())
        if (n != 0)
            env.update_below(n, state.tensors[n]);

    Sweeper sw{state, env, tol, std::mt19937_64(state.seed * 7919 + state.schedule.k + 1)};
    const auto tour = state.tree.euler_tour();
    bool converged = false;
    double prev = 0;
    bool has_prev = false;
    int sweeps_here = 0;
    while (state.schedule.k < tol.max_sweeps) {
        const auto t0 = clock::now();
        const int k = state.schedule.k;
        sw.nu = state.schedule.nu();
        sw.eps = std::max(tol.eps_min, tol.eps0 * std::pow(tol.eps_ratio, k));
        sw.max_entropy = 0;
        sw.max_trunc = 0;
        sw.optimize(0);
        for (size_t i = 1; i < tour.size(); ++i)
            sw.move(tour[i - 1], tour[i]);

        Tensor &c = state.tensors[0];
        c.scale(1.0 / c.norm());
        double e_sim = inner(c, env.apply(0, c, 1.0, sw.nu));
        double pen = inner(c, env.apply(0, c, 0.0, 1.0));
        SweepReport rep;
        rep.sweep = k;
        rep.energy = e_sim;
        rep.penalty = pen;
        rep.physical_energy = e_sim - sw.nu * pen;
        rep.nu = sw.nu;
        rep.max_entropy = sw.max_entropy;
        rep.max_truncation = sw.max_trunc;
        rep.eps = sw.eps;
        rep.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        state.history.push_back(rep);
        state.schedule.advance(e_sim);
        ++sweeps_here;

        bool energy_ok = has_prev && std::abs(e_sim - prev) <= tol.tol_energy * std::max(1.0, std::abs(e_sim));
        prev = e_sim;
        has_prev = true;
        if (energy_ok && pen < tol.tol_penalty && sweeps_here >= tol.min_sweeps) {
            converged = true;
            break;
        }
        if (tol.max_seconds > 0 && std::chrono::duration<double>(clock::now() - start).count() > tol.max_seconds)
            break;
    }
    const auto &last = state.history.back();
    res.converged = converged;
    res.energy = last.energy;
    res.physical_energy = last.physical_energy;
    res.penalty = last.penalty;
    std::ostringstream msg;
    if (converged)
        msg << "converged after " << state.schedule.k << " sweeps";
    else
    {
        const auto &h2 = state.history;
        double de = h2.size() > 1 ? std::abs(h2[h2.size() - 1].energy - h2[h2.size() - 2].energy) : 0.0;
        msg << "not converged after " << state.schedule.k << " sweeps (dE " << de << ", penalty " << last.penalty
            << ")";
    }
    res.message = msg.str();
    res.state = std::move(state);
    return res;
}

MultiSeedResult search_seeds(const HamiltonianSpec &h, int charge, int chi, const std::vector<std::uint64_t> &seeds,
                             const SweepTolerances &tol, const PenaltySchedule *schedule)
{
    if (seeds.empty())
        throw ConfigError("at least one seed is required");
    MultiSeedResult out;
    bool have = false;
    for (auto seed : seeds) {
        TtnState st = init_random(h, charge, chi, seed);
        if (schedule)
            st.schedule = *schedule;
        SearchResult r = ground_state_search(std::move(st), h, tol);
        out.runs.push_back({seed, r.converged, r.energy, r.penalty, r.state.schedule.k});
        bool ok = r.penalty < tol.tol_penalty;
        bool best_ok = have && out.best.penalty < tol.tol_penalty;
        bool better = !have || (ok && !best_ok) || (ok == best_ok && r.energy < out.best.energy);
        if (better) {
            out.best = std::move(r);
            out.winning_seed = seed;
            have = true;
        }
    }
    return out;
}

// ---------------------------------------------------------------- measurement

double expectation(const TtnState &st, const HamiltonianSpec &h, const FactorList &factors)
{
    const int nn = st.tree.size();
    std::vector<const LocalOperator *> site_op(h.num_sites(), nullptr);
    for (auto &[s, op] : factors) {
        if (site_op[s])
            throw ConfigError("one factor per site in an expectation value");
        site_op[s] = op;
    }
    std::vector<BlockMatrix<double>> norm(nn), val(nn);
    std::vector<bool> touched(nn, false);
    auto ident = [](const BondSpace &s) {
        BlockMatrix<double> m;
        for (size_t i = 0; i < s.charges.size(); ++i)
            m.blocks.emplace(std::make_pair(s.charges[i], s.charges[i]), Matrix::Identity(s.dims[i], s.dims[i]));
        return m;
    };
    for (int n : st.tree.post_order()) {
        const auto &node = st.tree.node(n);
        const Tensor &t = st.tensors[n];
        Tensor kn = t, kv = t;
        bool any = false;
        for (int leg = 0; leg < 2; ++leg) {
            int c = node.children[leg];
            BlockMatrix<double> nm, vm;
            bool has_op;
            if (is_leaf(c)) {
                int s = leaf_site(c);
                nm = ident(st.physical[s]);
                has_op = site_op[s] != nullptr;
                vm = has_op ? to_block(h.basis(s), *site_op[s]) : nm;
            } else {
                nm = norm[c];
                has_op = touched[c];
                vm = has_op ? val[c] : nm;
            }
            any = any || has_op;
            kn = apply_leg(nm, leg, kn);
            kv = apply_leg(vm, leg, kv);
        }
        norm[n] = contract_except(2, t, kn);
        touched[n] = any;
        val[n] = any ? contract_except(2, t, kv) : norm[n];
    }
    auto scalar = [&](const BlockMatrix<double> &m) {
        auto it = m.blocks.find({st.charge, st.charge});
        return it == m.blocks.end() ? 0.0 : it->second(0, 0);
    };
    double nrm = scalar(norm[0]);
    if (nrm <= 0)
        throw SolverError("network has zero norm");
    return scalar(val[0]) / nrm;
}

double energy_expectation(const TtnState &st, const HamiltonianSpec &h)
{
    double e = 0;
    for (auto &t : h.terms) {
        if (t.factors.empty()) {
            e += t.coefficient;
            continue;
        }
        FactorList f;
        for (auto &fa : t.factors)
            f.push_back({fa.site, &h.operators[fa.op]});
        e += t.coefficient * expectation(st, h, f);
    }
    return e;
}

} // namespace lgt
