#include "lgt/error.hpp"
#include "lgt/exact_solver.hpp"
#include "lgt/observables.hpp"
#include "lgt/perturbation.hpp"
#include "lgt/serialization.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace lgt;

namespace {

const LatticeGeometry plaquette(2, 2, BoundaryPolicy::open_frozen_zero_flux);

Eigen::MatrixXd projected(const Couplings &c, const LatticeGeometry &g = plaquette, int q = 0)
{
    auto h = assemble_hamiltonian(g, c);
    ConstrainedBasis b(h, q);
    return Eigen::MatrixXd(build_sparse_hamiltonian(h, b));
}

Couplings random_couplings(std::mt19937 &rng, int spin = 1)
{
    std::uniform_real_distribution<double> u(-2, 2), pos(0.1, 3);
    Couplings c;
    c.t = u(rng);
    c.m = u(rng);
    c.g_e_sq = pos(rng);
    c.g_m_sq = pos(rng);
    c.spin = spin;
    return c;
}

// the tabulated blocks with the two hopping signs that make them consistent
Eigen::MatrixXd repaired_blocks(const Couplings &c)
{
    Eigen::MatrixXd H = analytic_2x2_hamiltonian(c);
    for (auto [r, col] : {std::pair{0, 3 + 6}, std::pair{1, 3 + 7}}) {
        H(r, col) = -H(r, col);
        H(col, r) = -H(col, r);
    }
    return H;
}

double density(const Couplings &c, const LatticeGeometry &g = plaquette)
{
    auto h = assemble_hamiltonian(g, c);
    ConstrainedBasis b(h, 0);
    auto r = ed_ground_state(h, b);
    return particle_density(EdView(h, b, r.vectors.col(0))).second;
}

} // namespace

TEST(ConstrainedBasis, PlaquetteCounts)
{
    Couplings c;
    auto h = assemble_hamiltonian(plaquette, c);
    EXPECT_EQ(ConstrainedBasis(h, 0).size(), 13);
    c.spin = 2;
    auto h2 = assemble_hamiltonian(plaquette, c);
    ConstrainedBasis b2(h2, 0);
    ASSERT_EQ(b2.size(), 25);
    int sectors[3] = {0, 0, 0};
    for (std::int64_t i = 0; i < b2.size(); ++i) {
        int n = 0;
        for (int s = 0; s < 4; ++s)
            n += h2.basis(s).occupation(b2.config(i)[s]);
        ASSERT_EQ(n % 2, 0);
        ++sectors[n / 2];
    }
    EXPECT_EQ(sectors[0], 5);
    EXPECT_EQ(sectors[1], 16);
    EXPECT_EQ(sectors[2], 4);
}

TEST(ConstrainedBasis, ExtremeChargeSectors)
{
    LatticeGeometry g(2, 2, BoundaryPolicy::open_free);
    auto h = assemble_hamiltonian(g, Couplings{});
    for (int q : {2, -2}) {
        ConstrainedBasis b(h, q);
        EXPECT_GT(b.size(), 0);
        for (std::int64_t i = 0; i < b.size(); ++i)
            for (int s = 0; s < 4; ++s) {
                int ch = h.basis(s).charge(b.config(i)[s]);
                if (q > 0)
                    EXPECT_EQ(ch, g.parity(s) > 0 ? 1 : 0);
                else
                    EXPECT_EQ(ch, g.parity(s) > 0 ? 0 : -1);
            }
    }
    EXPECT_THROW(ConstrainedBasis(h, 3), ConfigError);
}

TEST(ConstrainedBasis, SortedUniqueAndGuarded)
{
    LatticeGeometry g(2, 2, BoundaryPolicy::periodic);
    auto h = assemble_hamiltonian(g, Couplings{});
    ConstrainedBasis b(h, 0);
    EXPECT_EQ(b.size(), 547);
    for (std::int64_t i = 0; i < b.size(); ++i)
        EXPECT_EQ(b.find(b.config(i)), i);
    EXPECT_THROW(ConstrainedBasis(h, 0, 100), ConfigError);
}

TEST(ExactSolver, TrivialVacuum)
{
    Couplings c;
    c.t = 0;
    c.m = 2;
    c.g_e_sq = 4;
    auto h = assemble_hamiltonian(plaquette, c);
    ConstrainedBasis b(h, 0);
    auto r = ed_ground_state(h, b);
    EXPECT_NEAR(r.energies(0), 0.0, 1e-12);
    EXPECT_EQ(r.energies.size(), 1);
    EXPECT_NEAR(particle_density(EdView(h, b, r.vectors.col(0))).second, 0.0, 1e-12);
}

TEST(ExactSolver, ClassicalDimerDoublet)
{
    Couplings c;
    c.t = 0;
    c.m = -2;
    c.g_e_sq = 4;
    auto h = assemble_hamiltonian(plaquette, c);
    ConstrainedBasis b(h, 0);
    auto r = ed_ground_state(h, b);
    ASSERT_EQ(r.energies.size(), 2);
    EXPECT_NEAR(r.energies(0), 2 * (c.g_e_sq / 2 + 2 * c.m), 1e-12);
    EXPECT_NEAR(r.energies(1), r.energies(0), 1e-12);
}

TEST(ExactSolver, DeepVacuumNearSecondOrder)
{
    Couplings c;
    c.t = 1;
    c.m = 10;
    c.g_e_sq = 4;
    auto h = assemble_hamiltonian(plaquette, c);
    ConstrainedBasis b(h, 0);
    double e = ed_ground_state(h, b).energies(0);
    const double a = c.g_e_sq / 4 + c.m;
    EXPECT_NEAR(e, vacuum_energy(int(plaquette.links().size()), 1, c.m, c.g_e_sq), 5 / (a * a * a));
}

TEST(ExactSolver, AgreesWithJordanWignerPlaquette)
{
    std::mt19937 rng(11);
    for (int spin : {1, 2})
        for (int i = 0; i < 10; ++i) {
            Couplings c = random_couplings(rng, spin);
            Eigen::VectorXd a = oracle::spectrum(projected(c)), b = oracle::spectrum(plaquette_2x2_hamiltonian(c));
            ASSERT_EQ(a.size(), b.size());
            EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12) << "spin " << spin;
        }
}

TEST(ExactSolver, MatchesRepairedTabulatedBlocks)
{
    std::mt19937 rng(5);
    for (int i = 0; i < 20; ++i) {
        Couplings c = random_couplings(rng);
        auto m = oracle::match_signed_permutation(projected(c), repaired_blocks(c), 1e-12);
        EXPECT_TRUE(m.has_value());
    }
}

TEST(ExactSolver, TabulatedBlocksNeedTwoSignFlips)
{
    Couplings c;
    c.t = 0.7;
    c.m = 0.3;
    c.g_e_sq = 1.3;
    c.g_m_sq = 0.9;
    Eigen::VectorXd lit = oracle::spectrum(analytic_2x2_hamiltonian(c));
    Eigen::VectorXd ref = oracle::spectrum(projected(c));
    EXPECT_GT((lit - ref).cwiseAbs().maxCoeff(), 0.1);
    EXPECT_FALSE(oracle::match_signed_permutation(projected(c), analytic_2x2_hamiltonian(c), 1e-9).has_value());
}

TEST(ExactSolver, TabulatedBlocksLiteral)
{
    Couplings c;
    c.g_e_sq = 4;
    c.g_m_sq = 2;
    c.m = 0.25;
    Eigen::MatrixXd H = analytic_2x2_hamiltonian(c);
    Eigen::Matrix3d d0;
    d0 << 0, -1, -1, -1, 8, 0, -1, 0, 8;
    EXPECT_TRUE(H.topLeftCorner(3, 3).isApprox(Eigen::MatrixXd(d0)));
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(H(3 + 2 * i, 3 + 2 * i), 2 * c.m + c.g_e_sq / 2);
        EXPECT_EQ(H(4 + 2 * i, 4 + 2 * i), 2 * c.m + 3 * c.g_e_sq / 2);
    }
    EXPECT_EQ(analytic_2x2_hamiltonian([] {
                  Couplings s;
                  s.spin = 2;
                  return s;
              }())
                  .rows(),
              25);
}

TEST(ExactSolver, GoldenPlaquetteMatrix)
{
    Json g = read_json(std::string(LGT_GOLDEN_DIR) + "/plaquette_13x13.json");
    Couplings c = couplings_from_json(g.at("couplings"));
    Eigen::MatrixXd H = analytic_2x2_hamiltonian(c);
    const auto &rows = g.at("matrix");
    ASSERT_EQ(rows.size(), 13u);
    for (int r = 0; r < 13; ++r)
        for (int col = 0; col < 13; ++col)
            EXPECT_EQ(H(r, col), rows[r][col].get<double>());
}

TEST(ExactSolver, SignOfHoppingIrrelevant)
{
    std::mt19937 rng(3);
    for (auto bp : {BoundaryPolicy::open_frozen_zero_flux, BoundaryPolicy::periodic}) {
        LatticeGeometry g(2, 2, bp);
        Couplings c = random_couplings(rng);
        Eigen::VectorXd a = oracle::spectrum(projected(c, g));
        c.t = -c.t;
        Eigen::VectorXd b = oracle::spectrum(projected(c, g));
        EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(ExactSolver, KrylovMatchesDense)
{
    LatticeGeometry g(2, 2, BoundaryPolicy::periodic);
    Couplings c;
    c.t = 1;
    c.m = -0.4;
    c.g_e_sq = 1.5;
    c.g_m_sq = 0.8;
    auto h = assemble_hamiltonian(g, c);
    ConstrainedBasis b(h, 0);
    EdOptions dense, krylov;
    krylov.dense_limit = 0;
    krylov.nev = 2;
    auto rd = ed_ground_state(h, b, dense);
    auto rk = ed_ground_state(h, b, krylov);
    EXPECT_TRUE(rk.converged);
    EXPECT_NEAR(rd.energies(0), rk.energies(0), 1e-10);
    EXPECT_LT(rk.residuals.maxCoeff(), 1e-9);
    Eigen::SparseMatrix<double> H = build_sparse_hamiltonian(h, b);
    EXPECT_LT((H * rk.vectors.col(0) - rk.energies(0) * rk.vectors.col(0)).norm(), 1e-9);
}

TEST(ExactSolver, HellmannFeynman)
{
    for (double m : {-3.0, -1.0, 0.5, 3.0}) {
        Couplings c;
        c.t = 1;
        c.m = m;
        c.g_e_sq = 2;
        c.g_m_sq = 0.5;
        const double dm = 1e-4;
        auto energy = [&](double mm) {
            Couplings cc = c;
            cc.m = mm;
            auto h = assemble_hamiltonian(plaquette, cc);
            ConstrainedBasis b(h, 0);
            return ed_ground_state(h, b).energies(0);
        };
        double de = (energy(m + dm) - energy(m - dm)) / (2 * dm) / 4;
        EXPECT_NEAR(density(c), de, 1e-6) << "m=" << m;
    }
}

TEST(ExactSolver, LargerSpinLowersEnergy)
{
    Couplings c;
    c.t = 1;
    c.m = -0.5;
    c.g_e_sq = 1.2;
    c.g_m_sq = 1.5;
    Eigen::VectorXd e1 = oracle::spectrum(projected(c));
    c.spin = 2;
    Eigen::VectorXd e2 = oracle::spectrum(projected(c));
    EXPECT_LE(e2(0), e1(0) + 1e-12);
}

TEST(ExactSolver, MagneticShiftOfDensityJump)
{
    Couplings c;
    c.t = 1;
    c.g_e_sq = 4;
    c.g_m_sq = 4;
    double lo = -2, hi = 0.5;
    c.m = lo;
    ASSERT_GT(density(c), 0.5);
    c.m = hi;
    ASSERT_LT(density(c), 0.5);
    for (int it = 0; it < 30; ++it) {
        c.m = (lo + hi) / 2;
        (density(c) > 0.5 ? lo : hi) = c.m;
    }
    EXPECT_NEAR(lo, classical_transition(4, 4), 0.15);
}

TEST(Fidelity, DeepVacuumIsFlat)
{
    Couplings c;
    c.t = 1;
    c.m = 10;
    c.g_e_sq = 4;
    auto f = fidelity_susceptibility(plaquette, c, 0);
    EXPECT_GE(f.chi, 0);
    EXPECT_LT(f.chi, 1e-3);
}

TEST(Fidelity, SecondOrderInStep)
{
    Couplings c;
    c.t = 1;
    c.m = -1.2;
    c.g_e_sq = 4;
    double a = fidelity_susceptibility(plaquette, c, 0, 1e-3).chi;
    double b = fidelity_susceptibility(plaquette, c, 0, 5e-4).chi;
    EXPECT_NEAR(a, b, 1e-5 * std::max(1.0, a));
}

TEST(Fidelity, RejectsDegenerateGroundState)
{
    Couplings c;
    c.t = 0;
    c.m = -2;
    c.g_e_sq = 4;
    EXPECT_THROW(fidelity_susceptibility(plaquette, c, 0), SolverError);
    EXPECT_THROW(fidelity_susceptibility(plaquette, c, 0, 0.0), ConfigError);
}

TEST(ExactSolver, SpectrumDump)
{
    Couplings c;
    auto h = assemble_hamiltonian(plaquette, c);
    ConstrainedBasis b(h, 0);
    EdOptions o;
    o.nev = 3;
    auto r = ed_ground_state(h, b, o);
    Json j = to_json(r, true);
    EXPECT_EQ(j["energies"].size(), size_t(r.energies.size()));
    EXPECT_EQ(j["vectors"][0].size(), 13u);
}
