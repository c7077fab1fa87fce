// frustration.hpp - validity of the spin description for mixed-sign couplings,
// lambda_a > 0 along rows and lambda_b = eta * lambda_a < 0 along columns.
//
// The 0 -> 1 spin transition is compared with the coupling at which the
// photonic quadratic form (spins frozen at their sector expectation values)
// first loses positivity.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cqed/model.hpp"
#include "cqed/parallel.hpp"

namespace cqed {

/// Mean delta-omega shift for uniform row/column occupations n_a, n_b.
inline double delta_omega_expectation(double lambda_a, double lambda_b, double n_a, double n_b) {
    if (n_a < 0.0 || n_b < 0.0) throw std::invalid_argument("delta_omega_expectation: occupations must be >= 0");
    return 2.0 * (lambda_a * n_a + lambda_b * n_b) + std::sqrt(n_a * n_b) * (lambda_a + lambda_b) +
           (lambda_a + lambda_b);
}

struct Level {
    double value = 0.0;
    int multiplicity = 0;
};

/// Interaction spectrum of the one-excitation sector: 2 lambda_a mu_a + 2 lambda_b mu_b
/// with mu_a in {-1 (x Lx-1), Lx-1} for hops along a row and mu_b in {-1 (x Ly-1), Ly-1}.
inline std::vector<Level> one_exc_spin_spectrum(const ArrayGeometry& geometry, double lambda_a,
                                                double lambda_b) {
    const int lx = geometry.lx();
    const int ly = geometry.ly();
    const std::vector<Level> row{{-1.0, lx - 1}, {static_cast<double>(lx - 1), 1}};
    const std::vector<Level> col{{-1.0, ly - 1}, {static_cast<double>(ly - 1), 1}};
    std::vector<Level> out;
    for (const auto& a : row) {
        for (const auto& b : col) {
            const int mult = a.multiplicity * b.multiplicity;
            if (mult > 0) out.push_back({2.0 * lambda_a * a.value + 2.0 * lambda_b * b.value, mult});
        }
    }
    std::sort(out.begin(), out.end(), [](const Level& x, const Level& y) { return x.value < y.value; });
    return out;
}

/// The same spectrum with every level repeated by its multiplicity.
inline std::vector<double> expand_levels(const std::vector<Level>& levels) {
    std::vector<double> v;
    for (const auto& l : levels) v.insert(v.end(), static_cast<std::size_t>(l.multiplicity), l.value);
    std::sort(v.begin(), v.end());
    return v;
}

/// Ground energies of the 0- and 1-excitation sectors, Zeeman term with
/// omega'_at = omega_at + 2 (lambda_a + lambda_b).
inline std::pair<double, double> gs_energies_01(const ArrayGeometry& geometry, const SpinCouplings& c) {
    const int n = geometry.sites();
    const double wp = c.omega_at + 2.0 * (c.lambda_a + c.lambda_b);
    const double e0 = -0.5 * wp * n;
    const double e1 = 0.5 * wp * (2 - n) + one_exc_spin_spectrum(geometry, c.lambda_a, c.lambda_b).front().value;
    return {e0, e1};
}

/// lambda_a at which the 0- and 1-excitation sectors cross, for eta < 0.
inline double lambda_c_spin(double omega_at, double eta, int ly) {
    if (!(eta < 0.0)) throw std::invalid_argument("lambda_c_spin: the mixed-sign branch needs eta < 0");
    if (ly < 1) throw std::invalid_argument("lambda_c_spin: Ly must be >= 1");
    return -omega_at / (2.0 * eta * ly);
}

struct FrustrationParams {
    int lx = 1;
    int ly = 1;
    double Delta_a = 0.0;
    double omega_at = 1.0;
    double eta = -1.0;

    [[nodiscard]] double Delta_b() const { return delta_b_from_eta(Delta_a, omega_at, eta); }
};

struct PhotonicSpectrum {
    double E_a = 0.0;  // multiplicity Ly - 1
    double E_b = 0.0;  // multiplicity Lx - 1
    double E_plus = 0.0;
    double E_minus = 0.0;
    double epsilon = 0.0;
    double xi = 0.0;
    int mult_a = 0;
    int mult_b = 0;

    /// All Lx + Ly eigenvalues, ascending.
    [[nodiscard]] std::vector<double> expanded() const {
        std::vector<double> v(static_cast<std::size_t>(mult_a), E_a);
        v.insert(v.end(), static_cast<std::size_t>(mult_b), E_b);
        v.push_back(E_plus);
        v.push_back(E_minus);
        std::sort(v.begin(), v.end());
        return v;
    }
    [[nodiscard]] double minimum() const {
        double m = E_minus;
        if (mult_a > 0) m = std::min(m, E_a);
        if (mult_b > 0) m = std::min(m, E_b);
        return m;
    }
};

/// Closed-form eigenvalues of the photonic form for a uniform spin background s.
inline PhotonicSpectrum photonic_spectrum_uniform(int lx, int ly, double Delta_a, double Delta_b,
                                                  double lambda_a, double lambda_b, double s) {
    if (s < -1.0 || s > 1.0) throw std::invalid_argument("photonic_spectrum: s^z must lie in [-1, 1]");
    PhotonicSpectrum p;
    p.mult_a = ly - 1;
    p.mult_b = lx - 1;
    p.E_a = Delta_a + 2.0 * lambda_a * lx * s;
    p.E_b = Delta_b + 2.0 * lambda_b * ly * s;
    p.epsilon = p.E_a + p.E_b;
    const double split = p.E_b - p.E_a;
    const double mix = lambda_a + lambda_b;
    p.xi = std::sqrt(split * split + 4.0 * lx * ly * s * s * mix * mix);
    p.E_plus = 0.5 * (p.epsilon + p.xi);
    p.E_minus = 0.5 * (p.epsilon - p.xi);
    return p;
}

/// M_ph = [[W_a, G], [G^T, W_b]] on (a_1..a_Ly, b_1..b_Lx) for per-site s^z.
inline Eigen::MatrixXd photonic_matrix(const ArrayGeometry& geometry, double Delta_a, double Delta_b,
                                       double lambda_a, double lambda_b, const std::vector<double>& sz) {
    const int lx = geometry.lx();
    const int ly = geometry.ly();
    if (static_cast<int>(sz.size()) != geometry.sites()) {
        throw std::invalid_argument("photonic_matrix: need one s^z per site");
    }
    for (double s : sz) {
        if (s < -1.0 || s > 1.0) throw std::invalid_argument("photonic_matrix: s^z must lie in [-1, 1]");
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(lx + ly, lx + ly);
    for (int i = 0; i < ly; ++i) {
        double row = 0.0;
        for (int nu = 0; nu < lx; ++nu) row += sz[static_cast<std::size_t>(geometry.site(i, nu))];
        m(i, i) = Delta_a + 2.0 * lambda_a * row;
    }
    for (int nu = 0; nu < lx; ++nu) {
        double col = 0.0;
        for (int i = 0; i < ly; ++i) col += sz[static_cast<std::size_t>(geometry.site(i, nu))];
        m(ly + nu, ly + nu) = Delta_b + 2.0 * lambda_b * col;
    }
    for (int i = 0; i < ly; ++i) {
        for (int nu = 0; nu < lx; ++nu) {
            const double gv = (lambda_a + lambda_b) * sz[static_cast<std::size_t>(geometry.site(i, nu))];
            m(i, ly + nu) = gv;
            m(ly + nu, i) = gv;
        }
    }
    return m;
}

inline std::vector<double> photonic_spectrum_numeric(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("photonic_spectrum_numeric: eigensolver failed");
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

struct PhotonCritical {
    double lambda = 0.0;
    bool unbounded = false;  // no sign change found on the sweep
};

/// Smallest lambda_a > 0 at which the lowest photonic eigenvalue (s^z = -1)
/// reaches zero. The lowest eigenvalue is concave in lambda_a and positive at
/// zero, so the first sign change is bracketed by doubling and then bisected.
inline PhotonCritical lambda_c_photon(const FrustrationParams& p, double relative_tolerance = 1e-12) {
    if (p.lx < 1 || p.ly < 1) throw std::invalid_argument("lambda_c_photon: Lx, Ly must be >= 1");
    const double db = p.Delta_b();
    auto lowest = [&](double lambda) {
        return photonic_spectrum_uniform(p.lx, p.ly, p.Delta_a, db, lambda, p.eta * lambda, -1.0).minimum();
    };
    PhotonCritical out;
    if (!(lowest(0.0) > 0.0)) {
        throw std::domain_error("lambda_c_photon: photonic spectrum is not positive at zero coupling");
    }
    double lo = 0.0;
    double hi = std::abs(p.Delta_a) / (2.0 * p.lx) * 2.0;
    if (hi == 0.0) hi = 1.0;
    int grow = 0;
    while (lowest(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++grow > 200) {
            out.unbounded = true;
            return out;
        }
    }
    while (hi - lo > relative_tolerance * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (lowest(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.lambda = 0.5 * (lo + hi);
    return out;
}

struct QualityRatio {
    double lambda_c_spin = 0.0;
    double lambda_c_photon = 0.0;
    double g_c_spin = 0.0;
    double Q = 0.0;
    double R = 0.0;
    bool R_unbounded = false;
    bool valid = false;
};

inline QualityRatio quality_and_ratio(const FrustrationParams& p, double q_min = 10.0) {
    QualityRatio q;
    q.lambda_c_spin = lambda_c_spin(p.omega_at, p.eta, p.ly);
    const double radicand = -2.0 * q.lambda_c_spin * (p.Delta_a - p.omega_at);
    if (!(radicand > 0.0)) {
        throw std::domain_error("quality_and_ratio: g_c^spin needs (Delta_a - omega_at) lambda_c < 0");
    }
    q.g_c_spin = std::sqrt(radicand);
    const double db = p.Delta_b();
    q.Q = std::min(std::abs(p.Delta_a - p.omega_at), std::abs(db - p.omega_at)) / q.g_c_spin;
    const PhotonCritical ph = lambda_c_photon(p);
    q.R_unbounded = ph.unbounded;
    q.lambda_c_photon = ph.lambda;
    q.R = ph.unbounded ? 0.0 : ph.lambda / q.lambda_c_spin;
    q.valid = (q.R_unbounded || q.R > 1.0) && q.Q >= q_min;
    return q;
}

struct RegionRow {
    double eta = 0.0;
    double ly_over_lx = 0.0;
    double delta_a_over_omega = 0.0;
    int ly = 0;
    QualityRatio result;
    std::string error;  // non-empty when this grid point failed
};

struct RegionGrid {
    int lx = 10;
    double omega_at = 1.0;
    std::vector<double> delta_a_over_omega{0.4, 0.6};
    std::vector<double> eta;
    std::vector<double> ly_over_lx;
    double q_min = 10.0;
};

/// One row per grid point, ordered by (delta_a, eta, ly_over_lx) grid index.
inline std::vector<RegionRow> region_scan(const RegionGrid& grid) {
    const std::size_t nd = grid.delta_a_over_omega.size();
    const std::size_t ne = grid.eta.size();
    const std::size_t nr = grid.ly_over_lx.size();
    std::vector<RegionRow> rows(nd * ne * nr);
    parallel_chunks(rows.size(), [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t k = b; k < e; ++k) {
            const std::size_t ir = k % nr;
            const std::size_t ie = (k / nr) % ne;
            const std::size_t id = k / (nr * ne);
            RegionRow& row = rows[k];
            row.delta_a_over_omega = grid.delta_a_over_omega[id];
            row.eta = grid.eta[ie];
            row.ly_over_lx = grid.ly_over_lx[ir];
            try {
                const double ly_real = row.ly_over_lx * grid.lx;
                row.ly = static_cast<int>(std::lround(ly_real));
                if (row.ly < 1 || std::abs(ly_real - row.ly) > 1e-9 * std::max(1.0, ly_real)) {
                    throw std::invalid_argument("Ly = ratio * Lx must be a positive integer");
                }
                FrustrationParams p;
                p.lx = grid.lx;
                p.ly = row.ly;
                p.omega_at = grid.omega_at;
                p.Delta_a = row.delta_a_over_omega * grid.omega_at;
                p.eta = row.eta;
                row.result = quality_and_ratio(p, grid.q_min);
            } catch (const std::exception& ex) {
                row.error = ex.what();
            }
        }
    });
    return rows;
}

}  // namespace cqed
