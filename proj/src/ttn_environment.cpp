#include "ttn_environment.hpp"

namespace lgt {

Environment::Environment(const TtnState &st, const HamiltonianSpec &h)
    : tree_(st.tree), h_(h), sites_(h.num_sites())
{
    const int nn = tree_.size();
    for (auto &t : h.terms) {
        bool pen = t.kind == TermKind::penalty;
        if (t.factors.empty()) {
            (pen ? const_pen_ : const_phys_) += t.coefficient;
            continue;
        }
        terms_.push_back({t.coefficient, pen, t.factors});
    }

    region_.assign(size_t(nn) * sites_, 2);
    for (int n = 0; n < nn; ++n)
        for (int leg = 0; leg < 2; ++leg) {
            int c = tree_.node(n).children[leg];
            if (is_leaf(c))
                region_[n * sites_ + leaf_site(c)] = leg;
            else
                for (int s : tree_.node(c).sites)
                    region_[n * sites_ + s] = leg;
        }

    crossing_bond_.resize(nn);
    crossing_node_.resize(nn);
    for (int n = 0; n < nn; ++n)
        for (int i = 0; i < int(terms_.size()); ++i) {
            auto tc = touches(n, terms_[i]);
            bool inside = tc[0] || tc[1];
            if (inside && tc[2])
                crossing_bond_[n].push_back(i);
            if (int(tc[0]) + int(tc[1]) + int(tc[2]) >= 2)
                crossing_node_[n].push_back(i);
        }

    leaf_.resize(sites_);
    for (int s = 0; s < sites_; ++s) {
        const auto &b = h.basis(s);
        for (int i = 0; i < int(terms_.size()); ++i) {
            const auto &t = terms_[i];
            for (auto &f : t.factors) {
                if (f.site != s)
                    continue;
                auto blk = to_block(b, h.operators[f.op]);
                if (t.factors.size() == 1)
                    (t.penalty ? leaf_[s].h_pen : leaf_[s].h_phys).add(blk, t.coefficient);
                else
                    leaf_[s].partial.emplace(i, std::move(blk));
            }
        }
    }
    below_.resize(nn);
    above_.resize(nn);
}

std::array<bool, 3> Environment::touches(int n, const TermInfo &t) const
{
    std::array<bool, 3> out{false, false, false};
    for (auto &f : t.factors)
        out[region(n, f.site)] = true;
    return out;
}

const SideOps &Environment::leg_side(int n, int leg) const
{
    if (leg == 2)
        return n == 0 ? empty_ : above_[n];
    int c = tree_.node(n).children[leg];
    return is_leaf(c) ? leaf_[leaf_site(c)] : below_[c];
}

SideOps &Environment::bond_side(int a, int b)
{
    if (tree_.node(a).parent == b)
        return below_[a];
    return above_[b];
}

namespace {

void apply_h(const SideOps &side, int leg, const BlockTensor<double> &x, BlockTensor<double> &out, double w_phys,
             double w_pen)
{
    if (w_phys != 0 && !side.h_phys.empty())
        apply_leg_add(side.h_phys, leg, x, out, w_phys);
    if (w_pen != 0 && !side.h_pen.empty())
        apply_leg_add(side.h_pen, leg, x, out, w_pen);
}

// Product of the partial operators of term i on the chosen legs, times w.
void apply_term(int i, const std::array<const SideOps *, 3> &sides, const std::array<bool, 3> &use,
                const BlockTensor<double> &x, BlockTensor<double> &out, double w)
{
    int last = -1;
    for (int leg = 0; leg < 3; ++leg)
        if (use[leg])
            last = leg;
    BlockTensor<double> cur;
    const BlockTensor<double> *src = &x;
    for (int leg = 0; leg < 3; ++leg) {
        if (!use[leg])
            continue;
        const auto &op = sides[leg]->partial.at(i);
        if (leg == last) {
            apply_leg_add(op, leg, *src, out, w);
        } else {
            cur = apply_leg(op, leg, *src);
            src = &cur;
        }
    }
}

} // namespace

void Environment::update_below(int n, const BlockTensor<double> &t)
{
    const SideOps &s0 = leg_side(n, 0), &s1 = leg_side(n, 1);
    SideOps out;
    BlockTensor<double> kp, kq;
    kp.legs = kq.legs = t.legs;
    apply_h(s0, 0, t, kp, 1, 0);
    apply_h(s1, 1, t, kp, 1, 0);
    apply_h(s0, 0, t, kq, 0, 1);
    apply_h(s1, 1, t, kq, 0, 1);
    std::array<const SideOps *, 3> sides{&s0, &s1, nullptr};
    for (int i : crossing_node_[n]) {
        auto tc = touches(n, terms_[i]);
        if (tc[2])
            continue;
        apply_term(i, sides, tc, t, terms_[i].penalty ? kq : kp, terms_[i].coefficient);
    }
    out.h_phys = contract_except(2, t, kp);
    out.h_pen = contract_except(2, t, kq);
    for (int i : crossing_bond_[n]) {
        auto tc = touches(n, terms_[i]);
        tc[2] = false;
        BlockTensor<double> k;
        k.legs = t.legs;
        apply_term(i, sides, tc, t, k, 1.0);
        out.partial.emplace(i, contract_except(2, t, k));
    }
    below_[n] = std::move(out);
}

void Environment::update_above(int c, const BlockTensor<double> &t)
{
    const int w = tree_.node(c).parent;
    const int j = tree_.node(c).slot, o = 1 - j;
    const SideOps &so = leg_side(w, o), &sp = leg_side(w, 2);
    SideOps out;
    BlockTensor<double> kp, kq;
    kp.legs = kq.legs = t.legs;
    apply_h(so, o, t, kp, 1, 0);
    apply_h(sp, 2, t, kp, 1, 0);
    apply_h(so, o, t, kq, 0, 1);
    apply_h(sp, 2, t, kq, 0, 1);
    std::array<const SideOps *, 3> sides{nullptr, nullptr, &sp};
    sides[o] = &so;
    for (int i : crossing_node_[w]) {
        auto tc = touches(w, terms_[i]);
        if (tc[j])
            continue;
        apply_term(i, sides, tc, t, terms_[i].penalty ? kq : kp, terms_[i].coefficient);
    }
    out.h_phys = contract_except(j, t, kp);
    out.h_pen = contract_except(j, t, kq);
    for (int i : crossing_bond_[c]) {
        auto tc = touches(w, terms_[i]);
        tc[j] = false;
        BlockTensor<double> k;
        k.legs = t.legs;
        if (tc[0] || tc[1] || tc[2])
            apply_term(i, sides, tc, t, k, 1.0);
        out.partial.emplace(i, contract_except(j, t, k));
    }
    above_[c] = std::move(out);
}

BlockTensor<double> Environment::apply(int n, const BlockTensor<double> &x, double w_phys, double w_pen) const
{
    std::array<const SideOps *, 3> sides{&leg_side(n, 0), &leg_side(n, 1), &leg_side(n, 2)};
    BlockTensor<double> out;
    out.legs = x.legs;
    for (int leg = 0; leg < 3; ++leg)
        apply_h(*sides[leg], leg, x, out, w_phys, w_pen);
    for (int i : crossing_node_[n]) {
        const auto &t = terms_[i];
        double w = t.penalty ? w_pen : w_phys;
        if (w == 0)
            continue;
        apply_term(i, sides, touches(n, t), x, out, w * t.coefficient);
    }
    double c = w_phys * const_phys_ + w_pen * const_pen_;
    if (c != 0)
        out.axpy(c, x);
    return out;
}

} // namespace lgt
