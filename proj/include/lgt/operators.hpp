#pragma once

#include "lgt/dressed_basis.hpp"
#include "lgt/lattice.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace lgt {

// Single-site operator in a dressed basis. Fermion-even by construction.
struct LocalOperator {
    Eigen::MatrixXd matrix;
    int charge_shift = 0; // change of the local charge
};

// Elementary fermionic mode operators of one site: psi or eta on a half-link.
enum class Mode : int { psi = -1, eta_mx = 0, eta_my = 1, eta_px = 2, eta_py = 3 };

constexpr Mode eta(Direction d) { return Mode(int(d)); }

struct ModeOp {
    Mode mode;
    bool dagger;
};

struct WordOp {
    int site;
    Mode mode;
    bool dagger;
};

// Matrix of an even product of mode operators (leftmost acts last).
LocalOperator site_word(const DressedBasis &basis, const std::vector<ModeOp> &word);

// A1..A4 = eta^dag_d psi for d = +x, +y, -x, -y; A5..A8 are the plaquette corners.
LocalOperator building_block(const DressedBasis &basis, int which);

LocalOperator projector(const DressedBasis &basis, Direction d, int k);
LocalOperator electric_field(const DressedBasis &basis, Direction d);
LocalOperator occupation(const DressedBasis &basis);
LocalOperator local_charge(const DressedBasis &basis);
LocalOperator identity(const DressedBasis &basis);

struct PinnedCharge {
    int site;
    double shift;
};

enum class BoundaryTerm { none, dirichlet };

struct Couplings {
    double t = 1.0;
    double m = 0.0;
    double g_e_sq = 1.0;
    double g_m_sq = 0.0;
    double nu = 0.0;
    int spin = 1;
    std::vector<PinnedCharge> pinned;
    BoundaryTerm boundary_term = BoundaryTerm::none;
    double j_b = 0.0;
};

// t = 1/a, g_e^2 = g^2/a, g_m^2 = 8/(g^2 a).
Couplings physical_line(double g_sq, double a, double m);

// Mass, electric energy on the four half-links, pinning shift.
LocalOperator build_diagonal_ops(const DressedBasis &basis, const Couplings &c, double pin_shift = 0.0);

enum class TermKind { local, hopping, plaquette, boundary, penalty };

struct Factor {
    int site;
    int op; // index into HamiltonianSpec::operators
};

// coefficient * prod factors; factors ordered by site, empty for a scalar.
struct Term {
    TermKind kind;
    double coefficient;
    std::vector<Factor> factors;
};

struct HamiltonianSpec {
    LatticeGeometry geometry;
    Couplings couplings;
    std::vector<std::shared_ptr<const DressedBasis>> bases; // per site
    std::vector<LocalOperator> operators;
    std::vector<Term> terms;

    const DressedBasis &basis(int site) const { return *bases[site]; }
    int num_sites() const { return geometry.num_sites(); }
};

// Per-site dressed bases for a geometry, shared between identical sites.
std::vector<std::shared_ptr<const DressedBasis>> site_bases(const LatticeGeometry &g, int spin);

// Appends coefficient * word as a product of local factors, then the same for
// its Hermitian conjugate. Returns false when the word vanishes on these bases.
bool add_word_term(HamiltonianSpec &h, TermKind kind, double coefficient, const std::vector<WordOp> &word,
                   bool with_conjugate = true);

// Penalty nu * sum_links (1 - sum_k P_out(k) P_in(2s - k)).
void build_link_penalty(HamiltonianSpec &h, double nu);

HamiltonianSpec assemble_hamiltonian(const LatticeGeometry &g, const Couplings &c);

// Words for U on a link and for boundary half-links (external partner dropped).
std::vector<WordOp> link_raise_word(const LatticeGeometry &g, int site, Direction d);
std::vector<WordOp> link_lower_word(const LatticeGeometry &g, int site, Direction d);

std::string to_string(TermKind k);

} // namespace lgt
