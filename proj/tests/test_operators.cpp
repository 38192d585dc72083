#include "lgt/error.hpp"
#include "lgt/exact_solver.hpp"
#include "lgt/operators.hpp"

#include "support/product_space.hpp"

#include <gtest/gtest.h>

using namespace lgt;

namespace {

Couplings sample()
{
    Couplings c;
    c.t = 0.8;
    c.m = 0.35;
    c.g_e_sq = 1.7;
    c.g_m_sq = 1.1;
    return c;
}

} // namespace

TEST(Operators, OddWordsRejected)
{
    DressedBasis b(1, 1);
    EXPECT_THROW(site_word(b, {{Mode::psi, false}}), ConfigError);
    EXPECT_NO_THROW(site_word(b, {{Mode::psi, true}, {Mode::psi, false}}));
}

TEST(Operators, PsiDagPsiIsPhi)
{
    for (int p : {1, -1}) {
        DressedBasis b(1, p);
        auto n = site_word(b, {{Mode::psi, true}, {Mode::psi, false}});
        for (int i = 0; i < b.dim(); ++i)
            EXPECT_EQ(n.matrix(i, i), b.state(i).phi);
        EXPECT_TRUE(n.matrix.isDiagonal());
    }
}

TEST(Operators, BuildingBlockCreatesDimerEnd)
{
    // A1^dag = psi^dag eta_{+x}: puts a particle on an even site with outgoing flux +1
    DressedBasis b(1, 1);
    auto a1 = building_block(b, 1);
    Eigen::VectorXd vac = Eigen::VectorXd::Zero(b.dim());
    vac(b.vacuum_index()) = 1;
    EXPECT_NEAR((a1.matrix * vac).norm(), 0.0, 1e-15);
    Eigen::VectorXd out = a1.matrix.transpose() * vac;
    ASSERT_NEAR(out.norm(), 1.0, 1e-14);
    Eigen::Index at;
    out.cwiseAbs().maxCoeff(&at);
    EXPECT_EQ(b.state(int(at)).phi, 1);
    EXPECT_EQ(b.state(int(at)).k[plus_x], 0);
    EXPECT_EQ(half_link_electric_value(b.state(int(at)).k[plus_x], 1), 1);
}

TEST(Operators, BuildingBlocksConserveLocalGauss)
{
    for (int p : {1, -1}) {
        DressedBasis b(1, p);
        for (int w = 1; w <= 8; ++w) {
            auto op = building_block(b, w);
            for (int c = 0; c < b.dim(); ++c)
                for (int r = 0; r < b.dim(); ++r)
                    if (op.matrix(r, c) != 0) {
                        EXPECT_EQ(std::abs(op.matrix(r, c)), 1.0);
                        EXPECT_EQ(b.charge(r) - b.charge(c), op.charge_shift);
                    }
        }
    }
    EXPECT_THROW(building_block(DressedBasis(1, 1), 9), ConfigError);
}

TEST(Operators, ProjectorsResolveIdentity)
{
    DressedBasis b(2, -1);
    for (int d = 0; d < 4; ++d) {
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(b.dim(), b.dim());
        for (int k = 0; k <= 4; ++k)
            sum += projector(b, Direction(d), k).matrix;
        EXPECT_TRUE(sum.isIdentity());
    }
}

TEST(Operators, ElectricFieldRange)
{
    DressedBasis b(2, 1);
    auto e = electric_field(b, plus_y);
    EXPECT_EQ(e.matrix.diagonal().maxCoeff(), 2);
    EXPECT_EQ(e.matrix.diagonal().minCoeff(), -2);
}

TEST(Operators, HamiltonianHermitianOnProductSpace)
{
    LatticeGeometry g(2, 2, BoundaryPolicy::open_frozen_zero_flux);
    auto h = assemble_hamiltonian(g, sample());
    oracle::ProductSpace ps(h);
    EXPECT_EQ(ps.size, 625);
    Eigen::MatrixXd H = oracle::product_hamiltonian(h, ps);
    EXPECT_LT((H - H.transpose()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT(oracle::commutator_norm(H, oracle::product_charge(h, ps)), 1e-13);
    for (auto &l : g.links())
        EXPECT_LT(oracle::commutator_norm(H, oracle::product_link_number(h, ps, l)), 1e-13);
}

TEST(Operators, PenaltyVanishesOnGaugeInvariantStates)
{
    LatticeGeometry g(2, 2, BoundaryPolicy::open_frozen_zero_flux);
    Couplings c = sample();
    c.nu = 3.0;
    auto h = assemble_hamiltonian(g, c);
    oracle::ProductSpace ps(h);
    HamiltonianSpec pen = h;
    pen.terms.clear();
    for (auto &t : h.terms)
        if (t.kind == TermKind::penalty)
            pen.terms.push_back(t);
    ASSERT_FALSE(pen.terms.empty());
    Eigen::MatrixXd P = oracle::product_hamiltonian(pen, ps);
    EXPECT_TRUE(P.isDiagonal());
    int zero = 0;
    for (long i = 0; i < ps.size; ++i) {
        auto cfg = ps.config(i);
        int broken = 0;
        for (auto &l : g.links())
            broken += h.basis(l.site).state(cfg[l.site]).k[l.dir] +
                          h.basis(l.partner).state(cfg[l.partner]).k[opposite(l.dir)] !=
                      2;
        EXPECT_NEAR(P(i, i), c.nu * broken, 1e-12);
        zero += broken == 0;
    }
    // frozen zero flux leaves only the neutral sector
    EXPECT_EQ(zero, 13);
}

TEST(Operators, ValidatesCouplings)
{
    LatticeGeometry p(2, 2, BoundaryPolicy::periodic);
    Couplings c;
    c.spin = 3;
    EXPECT_THROW(assemble_hamiltonian(p, c), ConfigError);
    c = {};
    c.nu = -1;
    EXPECT_THROW(assemble_hamiltonian(p, c), ConfigError);
    c = {};
    c.boundary_term = BoundaryTerm::dirichlet;
    EXPECT_THROW(assemble_hamiltonian(p, c), ConfigError);
    c = {};
    c.pinned = {{7, 1.0}};
    EXPECT_THROW(assemble_hamiltonian(p, c), ConfigError);
    EXPECT_THROW(physical_line(-1, 1, 0), ConfigError);
}

TEST(Operators, PhysicalLineProduct)
{
    for (double a : {0.5, 1.0, 2.0}) {
        auto c = physical_line(2.0, a, -0.3);
        EXPECT_DOUBLE_EQ(c.t, 1 / a);
        EXPECT_NEAR(c.g_e_sq * c.g_m_sq, 8 * c.t * c.t, 1e-12);
    }
}

TEST(Operators, PinnedChargeShiftsDiagonal)
{
    LatticeGeometry g(2, 2, BoundaryPolicy::open_frozen_zero_flux);
    Couplings c = sample();
    auto h0 = assemble_hamiltonian(g, c);
    c.pinned = {{0, 0.5}};
    auto h1 = assemble_hamiltonian(g, c);
    ConstrainedBasis b0(h0, 0), b1(h1, 0);
    Eigen::MatrixXd d = Eigen::MatrixXd(build_sparse_hamiltonian(h1, b1)) - Eigen::MatrixXd(build_sparse_hamiltonian(h0, b0));
    EXPECT_TRUE(d.isDiagonal(1e-14));
    for (std::int64_t i = 0; i < b0.size(); ++i)
        EXPECT_NEAR(d(i, i), 0.5 * h0.basis(0).occupation(b0.config(i)[0]), 1e-14);
}

TEST(Operators, DirichletBoundaryTermOnlyOnOpenFree)
{
    LatticeGeometry g(2, 2, BoundaryPolicy::open_free);
    Couplings c = sample();
    c.boundary_term = BoundaryTerm::dirichlet;
    c.j_b = 0.3;
    auto h = assemble_hamiltonian(g, c);
    int n = 0;
    for (auto &t : h.terms)
        n += t.kind == TermKind::boundary;
    EXPECT_GT(n, 0);
}
