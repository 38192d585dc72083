#pragma once

#include "lgt/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <map>
#include <utility>
#include <vector>

namespace lgt {

using Index = Eigen::Index;

// U(1) graded vector space: ascending charge sectors with their dimensions.
struct BondSpace {
    std::vector<int> charges;
    std::vector<Index> dims;

    int sector(int q) const
    {
        auto it = std::lower_bound(charges.begin(), charges.end(), q);
        return it != charges.end() && *it == q ? int(it - charges.begin()) : -1;
    }
    Index dim(int q) const
    {
        int s = sector(q);
        return s < 0 ? 0 : dims[s];
    }
    Index total() const
    {
        Index n = 0;
        for (Index d : dims)
            n += d;
        return n;
    }
    void set(int q, Index d)
    {
        auto it = std::lower_bound(charges.begin(), charges.end(), q);
        auto pos = it - charges.begin();
        if (it != charges.end() && *it == q) {
            dims[pos] = d;
        } else {
            charges.insert(it, q);
            dims.insert(dims.begin() + pos, d);
        }
    }
    void drop_empty()
    {
        BondSpace out;
        for (size_t i = 0; i < charges.size(); ++i)
            if (dims[i] > 0) {
                out.charges.push_back(charges[i]);
                out.dims.push_back(dims[i]);
            }
        *this = std::move(out);
    }
    bool operator==(const BondSpace &o) const { return charges == o.charges && dims == o.dims; }
};

// q0 + q1 = q2 fusion of two spaces, dimensions multiplied.
inline BondSpace fuse(const BondSpace &a, const BondSpace &b)
{
    std::map<int, Index> acc;
    for (size_t i = 0; i < a.charges.size(); ++i)
        for (size_t j = 0; j < b.charges.size(); ++j)
            acc[a.charges[i] + b.charges[j]] += a.dims[i] * b.dims[j];
    BondSpace out;
    for (auto [q, d] : acc) {
        out.charges.push_back(q);
        out.dims.push_back(d);
    }
    return out;
}

// Charge-diagonal or charge-shifting operator between bond spaces; key (q_row, q_col).
template <typename Scalar>
struct BlockMatrix {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    std::map<std::pair<int, int>, Matrix> blocks;

    bool empty() const { return blocks.empty(); }

    void add(int qr, int qc, const Matrix &m, Scalar w = Scalar(1))
    {
        auto it = blocks.find({qr, qc});
        if (it == blocks.end())
            blocks.emplace(std::make_pair(qr, qc), w * m);
        else
            it->second += w * m;
    }
    void add(const BlockMatrix &o, Scalar w = Scalar(1))
    {
        for (auto &[k, m] : o.blocks)
            add(k.first, k.second, m, w);
    }
    BlockMatrix adjoint() const
    {
        BlockMatrix out;
        for (auto &[k, m] : blocks)
            out.blocks.emplace(std::make_pair(k.second, k.first), m.adjoint());
        return out;
    }
};

// conj(W) R W^T: an operator expressed in a rotated bond basis.
template <typename Scalar>
BlockMatrix<Scalar> project(const BlockMatrix<Scalar> &r, const BlockMatrix<Scalar> &w)
{
    BlockMatrix<Scalar> out;
    for (auto &[k, m] : r.blocks) {
        auto a = w.blocks.find({k.first, k.first});
        auto b = w.blocks.find({k.second, k.second});
        if (a == w.blocks.end() || b == w.blocks.end())
            continue;
        out.blocks.emplace(k, a->second.conjugate() * m * b->second.transpose());
    }
    return out;
}

// Three-leg tensor with q0 + q1 = q2. Blocks are column-major d0 x d1 x d2.
template <typename Scalar>
struct BlockTensor {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Key = std::array<int, 3>;

    std::array<BondSpace, 3> legs;
    std::map<Key, Vector> blocks;

    std::array<Index, 3> shape(const Key &k) const
    {
        return {legs[0].dim(k[0]), legs[1].dim(k[1]), legs[2].dim(k[2])};
    }

    // Every allowed block of the current leg spaces.
    std::vector<Key> allowed_keys() const
    {
        std::vector<Key> out;
        for (int q0 : legs[0].charges)
            for (int q1 : legs[1].charges)
                if (legs[2].dim(q0 + q1) > 0)
                    out.push_back({q0, q1, q0 + q1});
        return out;
    }

    Index packed_size() const
    {
        Index n = 0;
        for (auto &k : allowed_keys()) {
            auto s = shape(k);
            n += s[0] * s[1] * s[2];
        }
        return n;
    }

    Vector pack() const
    {
        Vector v = Vector::Zero(packed_size());
        Index off = 0;
        for (auto &k : allowed_keys()) {
            auto s = shape(k);
            Index n = s[0] * s[1] * s[2];
            auto it = blocks.find(k);
            if (it != blocks.end())
                v.segment(off, n) = it->second;
            off += n;
        }
        return v;
    }

    void unpack(const Vector &v)
    {
        blocks.clear();
        Index off = 0;
        for (auto &k : allowed_keys()) {
            auto s = shape(k);
            Index n = s[0] * s[1] * s[2];
            blocks.emplace(k, v.segment(off, n));
            off += n;
        }
    }

    double norm() const
    {
        double n = 0;
        for (auto &[k, b] : blocks)
            n += b.squaredNorm();
        return std::sqrt(n);
    }

    void scale(Scalar w)
    {
        for (auto &[k, b] : blocks)
            b *= w;
    }

    void axpy(Scalar w, const BlockTensor &o)
    {
        for (auto &[k, b] : o.blocks) {
            auto it = blocks.find(k);
            if (it == blocks.end())
                blocks.emplace(k, w * b);
            else
                it->second += w * b;
        }
    }
};

namespace detail {

// Block data viewed as (other legs) x (leg k); other legs in increasing order.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
leg_matrix(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &x, const std::array<Index, 3> &s, int k)
{
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (k == 2)
        return Eigen::Map<const Matrix>(x.data(), s[0] * s[1], s[2]);
    if (k == 0)
        return Eigen::Map<const Matrix>(x.data(), s[0], s[1] * s[2]).transpose();
    Matrix out(s[0] * s[2], s[1]);
    for (Index c = 0; c < s[2]; ++c)
        out.middleRows(c * s[0], s[0]) = Eigen::Map<const Matrix>(x.data() + c * s[0] * s[1], s[0], s[1]);
    return out;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> from_leg_matrix(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> &m,
                                                        const std::array<Index, 3> &s, int k)
{
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Vector x(s[0] * s[1] * s[2]);
    if (k == 2) {
        Eigen::Map<Matrix>(x.data(), s[0] * s[1], s[2]) = m;
    } else if (k == 0) {
        Eigen::Map<Matrix>(x.data(), s[0], s[1] * s[2]) = m.transpose();
    } else {
        for (Index c = 0; c < s[2]; ++c)
            Eigen::Map<Matrix>(x.data() + c * s[0] * s[1], s[0], s[1]) = m.middleRows(c * s[0], s[0]);
    }
    return x;
}

} // namespace detail

// out = op applied on leg k of t; `space` is the new leg k space.
template <typename Scalar>
void apply_leg_add(const BlockMatrix<Scalar> &op, int k, const BlockTensor<Scalar> &t, BlockTensor<Scalar> &out,
                   Scalar weight = Scalar(1))
{
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    // index op blocks by column charge
    std::multimap<int, std::pair<int, const Matrix *>> by_col;
    for (auto &[key, m] : op.blocks)
        by_col.emplace(key.second, std::make_pair(key.first, &m));
    for (auto &[key, x] : t.blocks) {
        auto s = t.shape(key);
        auto range = by_col.equal_range(key[k]);
        for (auto it = range.first; it != range.second; ++it) {
            auto [qr, mp] = it->second;
            const Matrix &m = *mp;
            // intermediate products may carry net charge: no fusion rule enforced here
            typename BlockTensor<Scalar>::Key nk = key;
            nk[k] = qr;
            auto ns = s;
            ns[k] = out.legs[k].dim(qr);
            if (ns[k] == 0)
                continue;
            if (m.rows() != ns[k])
                throw SolverError("operator block does not match the bond space");
            auto slot = out.blocks.find(nk);
            if (slot == out.blocks.end())
                slot = out.blocks.emplace(nk, Vector::Zero(ns[0] * ns[1] * ns[2])).first;
            Vector &y = slot->second;
            if (k == 0) {
                Eigen::Map<Matrix>(y.data(), ns[0], ns[1] * ns[2]).noalias() +=
                    weight * m * Eigen::Map<const Matrix>(x.data(), s[0], s[1] * s[2]);
            } else if (k == 2) {
                Eigen::Map<Matrix>(y.data(), ns[0] * ns[1], ns[2]).noalias() +=
                    weight * Eigen::Map<const Matrix>(x.data(), s[0] * s[1], s[2]) * m.transpose();
            } else {
                for (Index c = 0; c < s[2]; ++c)
                    Eigen::Map<Matrix>(y.data() + c * ns[0] * ns[1], ns[0], ns[1]).noalias() +=
                        weight * Eigen::Map<const Matrix>(x.data() + c * s[0] * s[1], s[0], s[1]) * m.transpose();
            }
        }
    }
}

template <typename Scalar>
BlockTensor<Scalar> apply_leg(const BlockMatrix<Scalar> &op, int k, const BlockTensor<Scalar> &t,
                              const BondSpace &space)
{
    BlockTensor<Scalar> out;
    out.legs = t.legs;
    out.legs[k] = space;
    apply_leg_add(op, k, t, out);
    return out;
}

template <typename Scalar>
BlockTensor<Scalar> apply_leg(const BlockMatrix<Scalar> &op, int k, const BlockTensor<Scalar> &t)
{
    return apply_leg(op, k, t, t.legs[k]);
}

// R(a, b) = sum over the other legs of conj(A) B, an operator on leg k.
// Blocks are paired by the charges of the other two legs.
template <typename Scalar>
BlockMatrix<Scalar> contract_except(int k, const BlockTensor<Scalar> &a, const BlockTensor<Scalar> &b)
{
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const int o1 = k == 0 ? 1 : 0, o2 = k == 2 ? 1 : 2;
    std::multimap<std::pair<int, int>, const typename BlockTensor<Scalar>::Key *> by_other;
    for (auto &[key, y] : b.blocks)
        by_other.emplace(std::make_pair(key[o1], key[o2]), &key);
    BlockMatrix<Scalar> out;
    for (auto &[key, x] : a.blocks) {
        auto range = by_other.equal_range({key[o1], key[o2]});
        for (auto it = range.first; it != range.second; ++it) {
            const auto &kb = *it->second;
            const auto &y = b.blocks.at(kb);
            auto sa = a.shape(key), sb = b.shape(kb);
            Matrix r;
            if (k == 2) {
                r = Eigen::Map<const Matrix>(x.data(), sa[0] * sa[1], sa[2]).adjoint() *
                    Eigen::Map<const Matrix>(y.data(), sb[0] * sb[1], sb[2]);
            } else if (k == 0) {
                r = Eigen::Map<const Matrix>(x.data(), sa[0], sa[1] * sa[2]).conjugate() *
                    Eigen::Map<const Matrix>(y.data(), sb[0], sb[1] * sb[2]).transpose();
            } else {
                r = Matrix::Zero(sa[1], sb[1]);
                for (Index c = 0; c < sa[2]; ++c)
                    r.noalias() += Eigen::Map<const Matrix>(x.data() + c * sa[0] * sa[1], sa[0], sa[1]).adjoint() *
                                   Eigen::Map<const Matrix>(y.data() + c * sb[0] * sb[1], sb[0], sb[1]);
            }
            out.add(key[k], kb[k], r);
        }
    }
    return out;
}

template <typename Scalar>
Scalar inner(const BlockTensor<Scalar> &a, const BlockTensor<Scalar> &b)
{
    Scalar s(0);
    for (auto &[key, x] : a.blocks) {
        auto jt = b.blocks.find(key);
        if (jt != b.blocks.end())
            s += x.dot(jt->second);
    }
    return s;
}

// Per-sector matrices of t viewed as (other legs) x (leg k), stacked over blocks.
template <typename Scalar>
struct LegSplit {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    std::map<int, Matrix> sectors;
    // (block key, row offset) per sector, in stacking order
    std::map<int, std::vector<std::pair<typename BlockTensor<Scalar>::Key, Index>>> layout;
};

template <typename Scalar>
LegSplit<Scalar> split_leg(const BlockTensor<Scalar> &t, int k, bool all_keys = true)
{
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    LegSplit<Scalar> out;
    std::map<int, std::vector<Matrix>> parts;
    auto keys = all_keys ? t.allowed_keys() : std::vector<typename BlockTensor<Scalar>::Key>{};
    if (!all_keys)
        for (auto &[key, x] : t.blocks)
            keys.push_back(key);
    for (auto &key : keys) {
        auto s = t.shape(key);
        Index rows = s[0] * s[1] * s[2] / s[k];
        auto it = t.blocks.find(key);
        Matrix m = it == t.blocks.end() ? Matrix::Zero(rows, s[k]) : detail::leg_matrix<Scalar>(it->second, s, k);
        Index off = 0;
        for (auto &p : parts[key[k]])
            off += p.rows();
        out.layout[key[k]].push_back({key, off});
        parts[key[k]].push_back(std::move(m));
    }
    for (auto &[q, ps] : parts) {
        Index rows = 0;
        for (auto &p : ps)
            rows += p.rows();
        Matrix m(rows, ps.front().cols());
        Index off = 0;
        for (auto &p : ps) {
            m.middleRows(off, p.rows()) = p;
            off += p.rows();
        }
        out.sectors.emplace(q, std::move(m));
    }
    return out;
}

// Inverse of split_leg: the columns of mats[q] become the new leg-k sector q.
// Rows follow the allowed-block order of the other legs, as in split_leg.
template <typename Scalar>
BlockTensor<Scalar> join_leg(const std::array<BondSpace, 3> &legs, int k,
                             const std::map<int, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> &mats)
{
    BlockTensor<Scalar> out;
    out.legs = legs;
    BondSpace space;
    for (auto &[q, m] : mats)
        if (m.cols() > 0)
            space.set(q, m.cols());
    out.legs[k] = space;
    std::map<int, Index> offset;
    for (auto &key : out.allowed_keys()) {
        auto s = out.shape(key);
        Index rows = s[0] * s[1] * s[2] / s[k];
        const auto &m = mats.at(key[k]);
        Index &off = offset[key[k]];
        if (off + rows > m.rows())
            throw SolverError("leg matrix too small for its sector");
        out.blocks.emplace(key, detail::from_leg_matrix<Scalar>(m.middleRows(off, rows), s, k));
        off += rows;
    }
    return out;
}

// Number of rows of sector q of leg k given the other two legs.
template <typename Scalar>
Index sector_rows(const BlockTensor<Scalar> &t, int k, int q)
{
    Index rows = 0;
    const auto &l = t.legs;
    if (k == 2) {
        for (size_t i = 0; i < l[0].charges.size(); ++i)
            rows += l[0].dims[i] * l[1].dim(q - l[0].charges[i]);
    } else {
        const auto &other = l[1 - k];
        for (size_t i = 0; i < other.charges.size(); ++i)
            rows += other.dims[i] * l[2].dim(other.charges[i] + q);
    }
    return rows;
}

} // namespace lgt
