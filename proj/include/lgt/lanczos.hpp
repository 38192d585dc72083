#pragma once

#include "lgt/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace lgt {

template <typename Scalar>
struct KrylovResult {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Eigen::VectorXd values;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
    Eigen::VectorXd residuals;
    int matvecs = 0;
    bool converged = false;
};

struct KrylovOptions {
    int nev = 1;
    double tol = 1e-10;     // residual norm
    int max_matvecs = 10000;
    int max_basis = 64;     // restart size
    int probes = 1;         // random restarts after convergence, to catch hidden degeneracies
    unsigned seed = 7;
};

// Lowest eigenpairs of a Hermitian operator given as y = apply(x).
// Krylov expansion by residuals with full reorthogonalization and thick restarts.
template <typename Scalar, typename Apply>
KrylovResult<Scalar> lowest_eigenpairs(Apply &&apply, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &start,
                                       const KrylovOptions &opt)
{
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index n = start.size();
    KrylovResult<Scalar> res;
    if (n == 0)
        throw SolverError("empty Krylov space");
    const int nev = int(std::min<Eigen::Index>(opt.nev, n));
    const int cap = int(std::min<Eigen::Index>(std::max(opt.max_basis, 2 * nev + 8), n));

    Matrix V(n, cap), W(n, cap);
    int m = 0;
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss;

    auto random_vector = [&]() {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v(i) = Scalar(gauss(rng));
        return v;
    };
    // Orthogonalize against the basis and append; false if nothing is left.
    auto append = [&](Vector v) {
        double before = v.norm();
        if (before == 0)
            return false;
        for (int pass = 0; pass < 2; ++pass)
            if (m > 0)
                v -= V.leftCols(m) * (V.leftCols(m).adjoint() * v);
        double after = v.norm();
        if (after < 1e-10 * before)
            return false;
        V.col(m) = v / after;
        W.col(m) = apply(Vector(V.col(m)));
        ++res.matvecs;
        ++m;
        return true;
    };

    Vector v0 = start;
    if (v0.norm() == 0)
        v0 = Vector::Ones(n);
    append(v0);

    Eigen::SelfAdjointEigenSolver<Matrix> es;
    Eigen::VectorXd theta;
    Matrix S;
    int probes_left = opt.probes;
    Eigen::VectorXd last_values;
    while (true) {
        Matrix T = V.leftCols(m).adjoint() * W.leftCols(m);
        T = (T + T.adjoint()).eval() * Scalar(0.5);
        es.compute(T);
        theta = es.eigenvalues();
        S = es.eigenvectors();
        const int k = std::min(nev, m);
        Matrix X = V.leftCols(m) * S.leftCols(k);
        Matrix R = W.leftCols(m) * S.leftCols(k) - X * theta.head(k).asDiagonal();
        Eigen::VectorXd rn(k);
        for (int i = 0; i < k; ++i)
            rn(i) = R.col(i).norm();

        int first_bad = -1;
        for (int i = 0; i < k; ++i)
            if (rn(i) > opt.tol) {
                first_bad = i;
                break;
            }
        const bool space_full = m == n;
        if ((first_bad < 0 && k == nev) || space_full) {
            bool stable = last_values.size() == k && (last_values - theta.head(k)).cwiseAbs().maxCoeff() < opt.tol;
            if (space_full || probes_left == 0 || stable) {
                res.values = theta.head(k);
                res.vectors = X;
                res.residuals = rn;
                res.converged = true;
                return res;
            }
            // a random probe exposes multiplet partners orthogonal to the Krylov space
            last_values = theta.head(k);
            --probes_left;
            int keep = std::min(m, nev + 2);
            V.leftCols(keep) = (V.leftCols(m) * S.leftCols(keep)).eval();
            W.leftCols(keep) = (W.leftCols(m) * S.leftCols(keep)).eval();
            m = keep;
            if (!append(random_vector())) {
                probes_left = 0;
                continue;
            }
            const int grow = std::min(cap - m, 40);
            for (int i = 0; i < grow; ++i)
                if (!append(Vector(W.col(m - 1))))
                    break;
            continue;
        }
        if (res.matvecs >= opt.max_matvecs) {
            res.values = theta.head(k);
            res.vectors = X;
            res.residuals = rn;
            res.converged = false;
            return res;
        }
        if (m == cap) {
            int keep = std::min(m - 1, std::max(nev + 2, cap / 3));
            V.leftCols(keep) = (V.leftCols(m) * S.leftCols(keep)).eval();
            W.leftCols(keep) = (W.leftCols(m) * S.leftCols(keep)).eval();
            m = keep;
            continue;
        }
        if (first_bad < 0)
            first_bad = 0;
        if (!append(Vector(R.col(first_bad)))) {
            // residual already in the space: widen with a random direction
            if (!append(random_vector())) {
                res.values = theta.head(k);
                res.vectors = X;
                res.residuals = rn;
                res.converged = rn.maxCoeff() <= opt.tol;
                return res;
            }
        }
    }
}

} // namespace lgt
