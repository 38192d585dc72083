#pragma once

#include <vector>

namespace lgt {

constexpr double catalan = 0.915965594;

// g_e^2/4 + m - sqrt((g_e^2/4 + m)^2 + n_links t^2); n_links = 2 L^2 on a torus.
double vacuum_energy(int n_links, double t, double m, double g_e_sq);
double vacuum_energy_periodic(int L, double t, double m, double g_e_sq);

struct DimerEnergy {
    double energy;
    double epsilon_minus;
};

// Second-order dimer-sector energy. epsilon_minus is the largest non-positive root of
//   eps (g^4/4 - (2m + eps)^2) + 2 L^2 t^2 (g^2/4 + 2m + eps) = 0.
// Requires -2m >= g_e^2/2.
DimerEnergy dimer_energy(int L, double t, double m, double g_e_sq);

// t = 0 transition mass, shifted when g_m != 0.
double classical_transition(double g_e_sq, double g_m_sq = 0.0);

struct FiniteDensityReference {
    double vacuum_energy_density;
    double dimer_energy_density;
    double ell_star_ratio;
    int ell_star;               // smallest l with |rho| <= rho_l, 0 when rho = 0
    std::vector<double> rho_ell; // l = 1 .. L/2
};

FiniteDensityReference finite_density_references(double rho, int L, double m, double g_e_sq);

// log of the number of dimer coverings, L^2 C / pi.
double dimer_degeneracy_log(int L);

} // namespace lgt
