// analytic_1d.hpp - closed-form solution of the single-mode (one row) spin
// model. States |J, m, n> with J = N/2 are exact eigenstates.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cqed {

enum class PhotonBranch { finite, marginal, divergent };
enum class Outcome1D { spin_transition_series, no_transition, photon_divergence };

inline const char* to_string(PhotonBranch b) {
    switch (b) {
        case PhotonBranch::finite: return "finite";
        case PhotonBranch::marginal: return "marginal";
        case PhotonBranch::divergent: return "divergent";
    }
    return "?";
}

inline const char* to_string(Outcome1D o) {
    switch (o) {
        case Outcome1D::spin_transition_series: return "spin-transition-series";
        case Outcome1D::no_transition: return "no-transition";
        case Outcome1D::photon_divergence: return "photon-divergence";
    }
    return "?";
}

namespace detail {

inline void check_sector(int n_spins, double m) {
    if (n_spins < 1) throw std::invalid_argument("1D model: N must be >= 1");
    const double j = 0.5 * n_spins;
    const double shifted = m + j;
    if (std::abs(m) > j || shifted != std::floor(shifted)) {
        throw std::invalid_argument("1D model: m must lie in {-N/2, ..., N/2}");
    }
}

}  // namespace detail

/// E = Delta n + (omega_at + 4 lambda n) m + 2 lambda [J(J+1) - m(m-1)], J = N/2.
inline double energy_1d(int n_spins, double m, int n, double Delta, double omega_at, double lambda) {
    detail::check_sector(n_spins, m);
    if (n < 0) throw std::invalid_argument("energy_1d: photon number must be >= 0");
    const double j = 0.5 * n_spins;
    return Delta * n + (omega_at + 4.0 * lambda * n) * m + 2.0 * lambda * (j * (j + 1.0) - m * (m - 1.0));
}

/// Same, for a general total angular momentum J <= N/2.
inline double energy_1d_j(double j, double m, int n, double Delta, double omega_at, double lambda) {
    if (std::abs(m) > j) throw std::invalid_argument("energy_1d_j: |m| > J");
    return Delta * n + (omega_at + 4.0 * lambda * n) * m + 2.0 * lambda * (j * (j + 1.0) - m * (m - 1.0));
}

/// Sign of the per-photon energy Delta + 4 lambda m.
inline PhotonBranch photon_branch(double Delta, double lambda, double m) {
    const double e = Delta + 4.0 * lambda * m;
    if (e > 0.0) return PhotonBranch::finite;
    if (e < 0.0) return PhotonBranch::divergent;
    return PhotonBranch::marginal;
}

inline double critical_g_photon(int n_spins, double Delta, double omega_at) {
    if (n_spins < 1) throw std::invalid_argument("critical_g_photon: N must be >= 1");
    const double radicand = Delta * (Delta - omega_at);
    if (radicand < 0.0) {
        throw std::domain_error("critical_g_photon: Delta (Delta - omega_at) < 0, no photon transition");
    }
    return std::sqrt(radicand / n_spins);
}

struct SpinCrossing {
    double lambda_c = 0.0;
    double g_c = 0.0;
};

/// Coupling at which E(J, m, 0) = E(J, m+1, 0), i.e. lambda = omega_at / (4 m),
/// and the matching g from lambda = -g^2 / (2 (Delta - omega_at)).
inline SpinCrossing critical_g_spin(int n_spins, double Delta, double omega_at, double m_from) {
    detail::check_sector(n_spins, m_from);
    if (m_from >= 0.5 * n_spins) throw std::invalid_argument("critical_g_spin: m_from must be < N/2");
    if (m_from == 0.0) {
        throw std::domain_error("critical_g_spin: m = 0 crossing is independent of lambda");
    }
    SpinCrossing c;
    c.lambda_c = omega_at / (4.0 * m_from);
    const double g2 = -2.0 * c.lambda_c * (Delta - omega_at);
    if (!(g2 >= 0.0)) {
        throw std::domain_error("critical_g_spin: crossing lies on the other sign of Delta - omega_at");
    }
    c.g_c = std::sqrt(g2);
    return c;
}

struct Table1DRow {
    int omega_sign;
    int lambda_sign;
    int detuning_sign;  // sign of Delta - omega_at
    int delta_sign;
    Outcome1D outcome;
};

/// The six sign patterns of the 1D phase table.
inline const std::array<Table1DRow, 6>& table_1d() {
    static const std::array<Table1DRow, 6> rows{{
        {+1, +1, -1, +1, Outcome1D::no_transition},
        {+1, +1, -1, -1, Outcome1D::photon_divergence},
        {+1, -1, +1, +1, Outcome1D::spin_transition_series},
        {-1, -1, +1, -1, Outcome1D::spin_transition_series},
        {-1, -1, +1, +1, Outcome1D::photon_divergence},
        {-1, +1, -1, -1, Outcome1D::no_transition},
    }};
    return rows;
}

struct Phase1D {
    Outcome1D outcome = Outcome1D::no_transition;
    bool from_table = true;  // false: sign pattern absent from the table
};

/// Sign patterns not in the table (lambda of the wrong sign for the detuning)
/// fall back to the photon-branch rule at the lambda = 0 spin ground state.
inline Phase1D classify_1d(double omega_at, double lambda, double Delta) {
    if (omega_at == 0.0 || lambda == 0.0 || Delta == 0.0 || Delta == omega_at) {
        throw std::invalid_argument("classify_1d: omega_at, lambda, Delta, Delta - omega_at must be nonzero");
    }
    auto sgn = [](double x) { return x > 0.0 ? 1 : -1; };
    const int so = sgn(omega_at), sl = sgn(lambda), sd = sgn(Delta - omega_at), sD = sgn(Delta);
    for (const auto& r : table_1d()) {
        if (r.omega_sign == so && r.lambda_sign == sl && r.detuning_sign == sd && r.delta_sign == sD) {
            return {r.outcome, true};
        }
    }
    Phase1D p;
    p.from_table = false;
    if (Delta < 0.0) {
        p.outcome = Outcome1D::photon_divergence;
    } else {
        p.outcome = lambda < 0.0 ? Outcome1D::spin_transition_series : Outcome1D::no_transition;
    }
    return p;
}

struct GroundState1D {
    double m = 0.0;
    int n_exc = 0;
    double energy = 0.0;  // at n = 0
    PhotonBranch photons = PhotonBranch::finite;
};

/// Minimizes the n = 0 energy over m (lowest m wins ties) and reads the photon
/// branch at the minimizer.
inline GroundState1D ground_state_1d(int n_spins, double Delta, double omega_at, double lambda) {
    if (n_spins < 1) throw std::invalid_argument("ground_state_1d: N must be >= 1");
    GroundState1D best;
    best.energy = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n_spins; ++k) {
        const double m = k - 0.5 * n_spins;
        const double e = energy_1d(n_spins, m, 0, Delta, omega_at, lambda);
        if (e < best.energy) {
            best.energy = e;
            best.m = m;
            best.n_exc = k;
        }
    }
    best.photons = photon_branch(Delta, lambda, best.m);
    return best;
}

/// Eigenvalues of the one-mode model in the (n_exc, n) block, one entry per
/// state: J runs over |m|..N/2 with multiplicity C(N, N/2-J) - C(N, N/2-J-1).
inline std::vector<double> block_spectrum_1d(int n_spins, int n_exc, int n, double Delta,
                                             double omega_at, double lambda) {
    if (n_exc < 0 || n_exc > n_spins) throw std::invalid_argument("block_spectrum_1d: n_exc out of range");
    auto choose = [](int a, int b) -> double {
        if (b < 0 || b > a) return 0.0;
        double r = 1.0;
        for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return std::round(r);
    };
    const double m = n_exc - 0.5 * n_spins;
    std::vector<double> out;
    for (int twice_j = n_spins; twice_j >= static_cast<int>(std::lround(2.0 * std::abs(m))); twice_j -= 2) {
        const int k = (n_spins - twice_j) / 2;
        const auto mult = static_cast<int>(choose(n_spins, k) - choose(n_spins, k - 1));
        const double e = energy_1d_j(0.5 * twice_j, m, n, Delta, omega_at, lambda);
        for (int i = 0; i < mult; ++i) out.push_back(e);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace cqed
