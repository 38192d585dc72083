#include "lgt/perturbation.hpp"

#include "lgt/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace lgt {

double vacuum_energy(int n_links, double t, double m, double g_e_sq)
{
    if (n_links < 0)
        throw ConfigError("negative link count");
    double a = g_e_sq / 4 + m;
    return a - std::sqrt(a * a + n_links * t * t);
}

double vacuum_energy_periodic(int L, double t, double m, double g_e_sq)
{
    return vacuum_energy(2 * L * L, t, m, g_e_sq);
}

DimerEnergy dimer_energy(int L, double t, double m, double g_e_sq)
{
    if (L < 1)
        throw ConfigError("lattice size must be positive");
    if (-2 * m < g_e_sq / 2)
        throw ConfigError("dimer expansion outside its regime (-2m >= g_e^2/2 required)");
    const double a = 2 * m;
    const double G = g_e_sq * g_e_sq / 4;
    const double K = 2.0 * L * L * t * t;
    const double b = g_e_sq / 4 + 2 * m;
    // eps^3 + 2a eps^2 + (a^2 - G - K) eps - K b = 0
    double eps = 0;
    if (K > 0) {
        Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
        comp(0, 0) = -2 * a;
        comp(0, 1) = -(a * a - G - K);
        comp(0, 2) = K * b;
        comp(1, 0) = 1;
        comp(2, 1) = 1;
        Eigen::EigenSolver<Eigen::Matrix3d> es(comp, false);
        const double scale = std::abs(a) + std::sqrt(G) + std::sqrt(K) + 1;
        bool found = false;
        for (int i = 0; i < 3; ++i) {
            auto z = es.eigenvalues()(i);
            if (std::abs(z.imag()) > 1e-9 * scale)
                continue;
            double r = z.real();
            // polish
            for (int it = 0; it < 3; ++it) {
                double f = ((r + 2 * a) * r + (a * a - G - K)) * r - K * b;
                double df = (3 * r + 4 * a) * r + (a * a - G - K);
                if (df == 0)
                    break;
                r -= f / df;
            }
            if (r <= 1e-12 * scale && (!found || r > eps)) {
                eps = std::min(r, 0.0);
                found = true;
            }
        }
        if (!found)
            throw ConfigError("dimer correction has no non-positive root");
    }
    return {L * L / 2.0 * (g_e_sq / 2 + 2 * m) + eps, eps};
}

double classical_transition(double g_e_sq, double g_m_sq)
{
    if (g_e_sq < 0)
        throw ConfigError("g_e^2 must be non-negative");
    double m = -g_e_sq / 4;
    if (g_m_sq != 0)
        m += (g_e_sq + g_m_sq / 2 - std::sqrt(g_e_sq * g_e_sq + g_m_sq * g_m_sq / 2)) / 4;
    return m;
}

FiniteDensityReference finite_density_references(double rho, int L, double m, double g_e_sq)
{
    const double r = std::abs(rho);
    if (r > 0.5)
        throw ConfigError("charge density beyond 1/2");
    if (L < 2 || L % 2)
        throw ConfigError("lattice size must be even");
    FiniteDensityReference out;
    const double a = g_e_sq / 4 + m;
    out.vacuum_energy_density = a * r;
    out.dimer_energy_density = a * (1 - r);
    out.ell_star_ratio = (1 - std::sqrt(1 - 2 * r)) / 2;
    out.ell_star = 0;
    for (int l = 1; l <= L / 2; ++l) {
        double cap = 2.0 * l * (L - l) / (double(L) * L);
        out.rho_ell.push_back(cap);
        if (out.ell_star == 0 && r > 0 && r <= cap + 1e-15)
            out.ell_star = l;
    }
    return out;
}

double dimer_degeneracy_log(int L)
{
    if (L < 2)
        throw ConfigError("lattice size must be at least 2");
    return double(L) * L * catalan / std::numbers::pi;
}

} // namespace lgt
