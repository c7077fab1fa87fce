// meanfield.hpp - zero-temperature coherent-state mean field for the JC array
// with uniform detuning. All photon amplitudes are taken real and equal,
// alpha_i = beta_nu = alpha, and every spin sits in the same product state.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cqed/model.hpp"

namespace cqed {

/// E(alpha^2) = Delta (Lx + Ly) alpha^2 - Lx Ly sqrt((omega_at/2)^2 + 4 g^2 alpha^2).
inline double mf_gs_energy(double alpha_sq, const ArrayGeometry& geometry, double Delta,
                           double omega_at, double g) {
    if (alpha_sq < 0.0) throw std::invalid_argument("mf_gs_energy: alpha^2 must be >= 0");
    const double half = 0.5 * omega_at;
    return Delta * geometry.modes() * alpha_sq -
           geometry.sites() * std::sqrt(half * half + 4.0 * g * g * alpha_sq);
}

inline double mf_critical_g(const ArrayGeometry& geometry, double Delta, double omega_at) {
    const double radicand = Delta * omega_at * geometry.modes() / (4.0 * geometry.sites());
    if (!(radicand > 0.0)) {
        throw std::domain_error("mf_critical_g: needs Delta * omega_at > 0");
    }
    return std::sqrt(radicand);
}

inline double mf_alpha_sq(double g, const ArrayGeometry& geometry, double Delta, double omega_at) {
    if (!(g > 0.0)) throw std::invalid_argument("mf_alpha_sq: g must be > 0");
    const double lead = geometry.sites() * g / (Delta * geometry.modes());
    const double offset = omega_at / (4.0 * g);
    return std::max(0.0, lead * lead - offset * offset);
}

/// 0 below g_c, N/2 (1 - (g_c/g)^2) above.
inline double mf_excitations(double g, const ArrayGeometry& geometry, double Delta, double omega_at) {
    if (!(g > 0.0)) throw std::invalid_argument("mf_excitations: g must be > 0");
    const double gc = mf_critical_g(geometry, Delta, omega_at);
    if (g <= gc) return 0.0;
    const double r = gc / g;
    return 0.5 * geometry.sites() * (1.0 - r * r);
}

/// Spin mixing amplitude of the product state (gamma |+> + |->)/sqrt(gamma^2 + 1).
inline double mf_gamma(double g, double alpha_sq, double omega_at) {
    if (alpha_sq < 0.0) throw std::invalid_argument("mf_gamma: alpha^2 must be >= 0");
    if (alpha_sq == 0.0 || g == 0.0) return 0.0;
    const double half = 0.5 * omega_at;
    const double alpha = std::sqrt(alpha_sq);
    return (half - std::sqrt(half * half + 4.0 * g * g * alpha_sq)) / (2.0 * g * alpha);
}

inline double mf_state_zexp(double gamma) {
    const double g2 = gamma * gamma;
    return (g2 - 1.0) / (g2 + 1.0);
}

/// Square L x L array with Delta -> infinity at fixed lambda.
inline double mf_lambda_c_inf(int L, double omega_at) {
    if (L < 1) throw std::invalid_argument("mf_lambda_c_inf: L must be >= 1");
    return -omega_at / (4.0 * L);
}

inline double mf_excitations_inf(double lambda, int L, double omega_at) {
    if (L < 1) throw std::invalid_argument("mf_excitations_inf: L must be >= 1");
    if (lambda == 0.0) return 0.0;
    const double n = static_cast<double>(L) * L;
    const double v = 0.5 * n * (1.0 + omega_at / (4.0 * L * lambda));
    return std::clamp(v, 0.0, 0.5 * n);
}

struct MeanFieldSolution {
    double g = 0.0;
    double alpha_sq = 0.0;
    double gamma = 0.0;
    double g_c = 0.0;
    double n_exc = 0.0;
    double energy = 0.0;
    double sz = -1.0;
};

inline MeanFieldSolution mf_solve(double g, const ArrayGeometry& geometry, double Delta,
                                  double omega_at) {
    MeanFieldSolution s;
    s.g = g;
    s.g_c = mf_critical_g(geometry, Delta, omega_at);
    s.alpha_sq = mf_alpha_sq(g, geometry, Delta, omega_at);
    s.gamma = mf_gamma(g, s.alpha_sq, omega_at);
    s.sz = mf_state_zexp(s.gamma);
    s.n_exc = mf_excitations(g, geometry, Delta, omega_at);
    s.energy = mf_gs_energy(s.alpha_sq, geometry, Delta, omega_at, g);
    return s;
}

}  // namespace cqed
