#include "lgt/exact_solver.hpp"

#include "lgt/error.hpp"
#include "lgt/lanczos.hpp"

#include <algorithm>
#include <cstring>
#include <functional>

namespace lgt {

ConstrainedBasis::ConstrainedBasis(const HamiltonianSpec &h, int charge, std::int64_t max_size)
    : sites_(h.num_sites()), charge_(charge)
{
    const auto &g = h.geometry;
    const int n = sites_;
    const int two_s = 2 * h.couplings.spin;
    for (int s = 0; s < n; ++s)
        if (h.basis(s).dim() > 255)
            throw ConfigError("dressed basis too large for the exact solver");

    // links whose later endpoint is this site
    std::vector<std::vector<std::array<int, 4>>> checks(n); // {site a, dir a, site b, dir b}
    for (const auto &l : g.links()) {
        int later = std::max(l.site, l.partner);
        checks[later].push_back({l.site, l.dir, l.partner, opposite(l.dir)});
    }
    std::vector<int> qmin(n + 1, 0), qmax(n + 1, 0);
    for (int s = n - 1; s >= 0; --s) {
        int lo = 1 << 20, hi = -(1 << 20);
        for (int i = 0; i < h.basis(s).dim(); ++i) {
            lo = std::min(lo, h.basis(s).charge(i));
            hi = std::max(hi, h.basis(s).charge(i));
        }
        qmin[s] = qmin[s + 1] + lo;
        qmax[s] = qmax[s + 1] + hi;
    }

    std::vector<std::uint8_t> cfg(n);
    std::function<void(int, int)> dfs = [&](int s, int q) {
        if (s == n) {
            if (q != charge)
                return;
            if (std::int64_t(data_.size()) / n >= max_size)
                throw ConfigError("constrained basis exceeds " + std::to_string(max_size) + " configurations");
            data_.insert(data_.end(), cfg.begin(), cfg.end());
            return;
        }
        const auto &b = h.basis(s);
        for (int i = 0; i < b.dim(); ++i) {
            int q2 = q + b.charge(i);
            if (q2 + qmin[s + 1] > charge || q2 + qmax[s + 1] < charge)
                continue;
            cfg[s] = std::uint8_t(i);
            bool ok = true;
            for (auto &c : checks[s]) {
                int ka = h.basis(c[0]).state(cfg[c[0]]).k[c[1]];
                int kb = h.basis(c[2]).state(cfg[c[2]]).k[c[3]];
                if (ka + kb != two_s) {
                    ok = false;
                    break;
                }
            }
            if (ok)
                dfs(s + 1, q2);
        }
    };
    dfs(0, 0);
    if (data_.empty())
        throw ConfigError("no gauge-invariant configuration with total charge " + std::to_string(charge));
}

std::int64_t ConstrainedBasis::find(const std::uint8_t *cfg) const
{
    std::int64_t lo = 0, hi = size();
    while (lo < hi) {
        std::int64_t mid = (lo + hi) / 2;
        int c = std::memcmp(config(mid), cfg, sites_);
        if (c == 0)
            return mid;
        if (c < 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    return -1;
}

namespace {

struct SparseColumns {
    std::vector<std::vector<std::pair<int, double>>> cols;
};

SparseColumns sparse_columns(const Eigen::MatrixXd &m)
{
    SparseColumns out;
    out.cols.resize(m.cols());
    for (int c = 0; c < m.cols(); ++c)
        for (int r = 0; r < m.rows(); ++r)
            if (m(r, c) != 0.0)
                out.cols[c].push_back({r, m(r, c)});
    return out;
}

} // namespace

Eigen::SparseMatrix<double> build_sparse_hamiltonian(const HamiltonianSpec &h, const ConstrainedBasis &basis)
{
    const int n = basis.num_sites();
    std::vector<SparseColumns> ops;
    ops.reserve(h.operators.size());
    for (auto &op : h.operators)
        ops.push_back(sparse_columns(op.matrix));

    std::vector<const Term *> terms;
    double shift = 0;
    for (auto &t : h.terms) {
        if (t.kind == TermKind::penalty)
            continue; // identically zero on gauge-invariant configurations
        if (t.factors.empty())
            shift += t.coefficient;
        else
            terms.push_back(&t);
    }

    std::vector<Eigen::Triplet<double>> trip;
    std::vector<std::uint8_t> out(n);
    const std::int64_t dim = basis.size();
    for (std::int64_t c = 0; c < dim; ++c) {
        const std::uint8_t *cfg = basis.config(c);
        if (shift != 0)
            trip.emplace_back(c, c, shift);
        for (const Term *t : terms) {
            std::memcpy(out.data(), cfg, n);
            // recursive product over factors
            std::function<void(size_t, double)> rec = [&](size_t f, double amp) {
                if (f == t->factors.size()) {
                    std::int64_t r = basis.find(out.data());
                    if (r >= 0)
                        trip.emplace_back(r, c, t->coefficient * amp);
                    return;
                }
                const auto &fac = t->factors[f];
                for (auto [row, v] : ops[fac.op].cols[cfg[fac.site]]) {
                    out[fac.site] = std::uint8_t(row);
                    rec(f + 1, amp * v);
                }
                out[fac.site] = cfg[fac.site];
            };
            rec(0, 1.0);
        }
    }
    Eigen::SparseMatrix<double> H(dim, dim);
    H.setFromTriplets(trip.begin(), trip.end());
    H.prune(0.0);
    return H;
}

namespace {

SpectrumResult dense_spectrum(const Eigen::MatrixXd &H, int nev, double window)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const int n = int(H.rows());
    int k = std::min(nev, n);
    while (k < n && es.eigenvalues()(k) - es.eigenvalues()(0) <= window)
        ++k;
    SpectrumResult r;
    r.energies = es.eigenvalues().head(k);
    r.vectors = es.eigenvectors().leftCols(k);
    r.residuals = Eigen::VectorXd::Zero(k);
    r.converged = true;
    return r;
}

} // namespace

SpectrumResult ed_ground_state(const HamiltonianSpec &h, const ConstrainedBasis &basis, const EdOptions &opt)
{
    Eigen::SparseMatrix<double> H = build_sparse_hamiltonian(h, basis);
    const std::int64_t n = H.rows();
    if (n <= opt.dense_limit)
        return dense_spectrum(Eigen::MatrixXd(H), opt.nev, opt.degeneracy_window);

    KrylovOptions ko;
    ko.nev = opt.nev;
    ko.tol = opt.tol;
    ko.max_matvecs = opt.max_iterations;
    ko.probes = 1;
    auto apply = [&](const Eigen::VectorXd &x) -> Eigen::VectorXd { return H * x; };
    SpectrumResult r;
    while (true) {
        auto kr = lowest_eigenpairs<double>(apply, Eigen::VectorXd::Ones(n), ko);
        r.energies = kr.values;
        r.vectors = kr.vectors;
        r.residuals = kr.residuals;
        r.iterations += kr.matvecs;
        r.converged = kr.converged;
        if (!kr.converged)
            throw SolverError("Lanczos did not converge within " + std::to_string(opt.max_iterations) +
                              " iterations");
        const int k = int(kr.values.size());
        if (k >= n || kr.values(k - 1) - kr.values(0) > opt.degeneracy_window)
            return r;
        ko.nev = k + 1;
    }
}

Eigen::MatrixXd plaquette_2x2_hamiltonian(const Couplings &c)
{
    // Sites 0=(0,0) 1=(1,0) 2=(0,1) 3=(1,1); links 0->1, 0->2, 1->3, 2->3.
    // Matter as Jordan-Wigner fermions in site order, links as unit ladders.
    const int s = c.spin;
    const int parity[4] = {1, -1, -1, 1};
    const int tail[4] = {0, 0, 1, 2}, head[4] = {1, 2, 3, 3};
    struct Config {
        std::array<int, 4> n, e;
    };
    std::vector<Config> states;
    for (int mask = 0; mask < 16; ++mask) {
        Config cf{};
        for (int x = 0; x < 4; ++x)
            cf.n[x] = (mask >> x) & 1;
        auto &e = cf.e;
        for (e[0] = -s; e[0] <= s; ++e[0])
            for (e[1] = -s; e[1] <= s; ++e[1])
                for (e[2] = -s; e[2] <= s; ++e[2])
                    for (e[3] = -s; e[3] <= s; ++e[3]) {
                        bool ok = true;
                        for (int x = 0; x < 4 && ok; ++x) {
                            int div = 0;
                            for (int l = 0; l < 4; ++l)
                                div += (tail[l] == x) * e[l] - (head[l] == x) * e[l];
                            int q = parity[x] > 0 ? cf.n[x] : -cf.n[x];
                            ok = div == q;
                        }
                        int q = 0;
                        for (int x = 0; x < 4; ++x)
                            q += parity[x] > 0 ? cf.n[x] : -cf.n[x];
                        if (ok && q == 0)
                            states.push_back(cf);
                    }
    }
    auto sector = [](const Config &a) { return a.n[0] + a.n[1] + a.n[2] + a.n[3]; };
    std::stable_sort(states.begin(), states.end(),
                     [&](const Config &a, const Config &b) { return sector(a) < sector(b); });
    auto index = [&](const Config &x) {
        for (size_t i = 0; i < states.size(); ++i)
            if (states[i].n == x.n && states[i].e == x.e)
                return int(i);
        return -1;
    };
    auto phi = [&](const Config &x, int site) { return parity[site] > 0 ? x.n[site] : 1 - x.n[site]; };

    const int dim = int(states.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    for (int a = 0; a < dim; ++a) {
        const Config &cf = states[a];
        double e2 = 0;
        for (int v : cf.e)
            e2 += v * v;
        H(a, a) = c.m * sector(cf) + 0.5 * c.g_e_sq * e2;
        // psi^dag_x U_l psi_y and its conjugate
        for (int l = 0; l < 4; ++l)
            for (int dirn = 0; dirn < 2; ++dirn) {
                int x = dirn ? head[l] : tail[l], y = dirn ? tail[l] : head[l];
                int de = dirn ? -1 : 1;
                if (phi(cf, y) != 1 || phi(cf, x) != 0 || std::abs(cf.e[l] + de) > s)
                    continue;
                int occ[4] = {phi(cf, 0), phi(cf, 1), phi(cf, 2), phi(cf, 3)};
                int sign = 1;
                for (int j = 0; j < y; ++j)
                    sign *= occ[j] ? -1 : 1;
                occ[y] = 0;
                for (int j = 0; j < x; ++j)
                    sign *= occ[j] ? -1 : 1;
                Config to = cf;
                to.n[x] = 1 - to.n[x];
                to.n[y] = 1 - to.n[y];
                to.e[l] += de;
                int b = index(to);
                if (b >= 0)
                    H(b, a) += -c.t * sign;
            }
        for (int w : {1, -1}) {
            Config to = cf;
            to.e[0] += w;
            to.e[2] += w;
            to.e[3] -= w;
            to.e[1] -= w;
            bool ok = true;
            for (int v : to.e)
                ok = ok && std::abs(v) <= s;
            if (ok)
                H(index(to), a) += -0.5 * c.g_m_sq;
        }
    }
    return H;
}

Eigen::MatrixXd analytic_2x2_hamiltonian(const Couplings &c)
{
    if (c.spin != 1)
        return plaquette_2x2_hamiltonian(c);
    const double t = c.t, m = c.m, ge = c.g_e_sq, h = c.g_m_sq / 2;
    Eigen::MatrixXd D0(3, 3), D2 = Eigen::MatrixXd::Zero(8, 8), D4(2, 2), T02(3, 8), T42(2, 8);
    D0 << 0, -h, -h, -h, 2 * ge, 0, -h, 0, 2 * ge;
    Eigen::Matrix2d cell;
    cell << 2 * m + ge / 2, -h, -h, 2 * m + 3 * ge / 2;
    for (int i = 0; i < 4; ++i)
        D2.block<2, 2>(2 * i, 2 * i) = cell;
    D4 << 4 * m + ge, -h, -h, 4 * m + ge;
    T02 << -t, 0, -t, 0, t, 0, -t, 0,
           0, 0, 0, 0, 0, t, 0, -t,
           0, -t, 0, -t, 0, 0, 0, 0;
    T42 << 0, -t, 0, -t, -t, 0, -t, 0,
           -t, 0, -t, 0, 0, -t, 0, -t;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(13, 13);
    H.block(0, 0, 3, 3) = D0;
    H.block(3, 3, 8, 8) = D2;
    H.block(11, 11, 2, 2) = D4;
    H.block(0, 3, 3, 8) = T02;
    H.block(3, 0, 8, 3) = T02.transpose();
    H.block(11, 3, 2, 8) = T42;
    H.block(3, 11, 8, 2) = T42.transpose();
    return H;
}

FidelityResult fidelity_susceptibility(const LatticeGeometry &g, const Couplings &c, int charge, double delta_m)
{
    if (delta_m <= 0)
        throw ConfigError("finite-difference step must be positive");
    EdOptions opt;
    opt.nev = 2;
    opt.degeneracy_window = 0;
    const double threshold = 10 * delta_m * g.num_sites();
    Eigen::VectorXd psi[3];
    double gap0 = 0;
    for (int i = 0; i < 3; ++i) {
        Couplings ci = c;
        ci.m = c.m + (i - 1) * delta_m;
        auto h = assemble_hamiltonian(g, ci);
        ConstrainedBasis basis(h, charge);
        auto r = ed_ground_state(h, basis, opt);
        if (r.energies.size() < 2)
            throw SolverError("fidelity susceptibility needs at least two states");
        double gap = r.energies(1) - r.energies(0);
        if (gap < threshold)
            throw SolverError("ground state (quasi-)degenerate, gap " + std::to_string(gap) +
                              " below finite-difference resolution");
        if (i == 1)
            gap0 = gap;
        psi[i] = r.vectors.col(0);
    }
    for (int i : {0, 2})
        if (psi[i].dot(psi[1]) < 0)
            psi[i] = -psi[i];
    Eigen::VectorXd d = (psi[2] - psi[0]) / (2 * delta_m);
    double ov = psi[1].dot(d);
    return {d.squaredNorm() - ov * ov, gap0};
}

} // namespace lgt
