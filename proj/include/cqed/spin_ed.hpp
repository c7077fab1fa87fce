// spin_ed.hpp - exact diagonalization of the effective spin Hamiltonian in
// fixed-excitation sectors.
//
//   H = sum_s (omega_at/2 + [lambda_a + lambda_b]) sigma^z_s
//     + sum over ordered pairs sharing a row    lambda_a (s+_s s-_t + h.c.)
//     + sum over ordered pairs sharing a column lambda_b (s+_s s-_t + h.c.)
//
// so moving one excitation along a row has amplitude 2 lambda_a, along a
// column 2 lambda_b.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cqed/linalg/eigensolver.hpp"
#include "cqed/linalg/sparse_operator.hpp"
#include "cqed/model.hpp"
#include "cqed/parallel.hpp"
#include "cqed/sector_basis.hpp"

namespace cqed {

inline SparseOperator build_spin_interaction(const ArrayGeometry& geometry,
                                             const SpinCouplings& couplings,
                                             const SectorBasis& basis) {
    if (!(basis.geometry() == geometry)) {
        throw std::invalid_argument("build_spin_interaction: basis built for another geometry");
    }
    const int n = geometry.sites();
    const double hop_row = 2.0 * couplings.lambda_a;
    const double hop_col = 2.0 * couplings.lambda_b;
    const auto& states = basis.states();

    std::vector<std::vector<Triplet>> parts(chunk_count(states.size()));
    parallel_chunks(states.size(), [&](std::size_t b, std::size_t e, std::size_t chunk) {
        auto& out = parts[chunk];
        for (std::size_t k = b; k < e; ++k) {
            const Config c = states[k];
            for (int t = 0; t < n; ++t) {
                if (!occupied(c, t)) continue;
                for (int s = 0; s < n; ++s) {
                    if (occupied(c, s)) continue;
                    double amp = 0.0;
                    if (geometry.share_row(s, t)) {
                        amp = hop_row;
                    } else if (geometry.share_col(s, t)) {
                        amp = hop_col;
                    } else {
                        continue;
                    }
                    if (amp == 0.0) continue;
                    const Config moved = c ^ (Config{1} << t) ^ (Config{1} << s);
                    out.push_back({basis.rank(moved), k, amp});
                }
            }
        }
    });
    std::vector<Triplet> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return SparseOperator::from_triplets(basis.size(), std::move(all));
}

/// Single-site energy per unit of sigma^z.
inline double zeeman_coefficient(const SpinCouplings& c, bool include_lambda_shift) {
    return c.omega_at / 2.0 + (include_lambda_shift ? c.lambda_a + c.lambda_b : 0.0);
}

/// Adds (omega_at/2 [+ lambda_a + lambda_b]) * (2 n_exc - N) to the diagonal.
inline SparseOperator add_diagonal(SparseOperator op, const ArrayGeometry& geometry,
                                   const SpinCouplings& couplings, const SectorBasis& basis,
                                   bool include_lambda_shift) {
    const double sz_total = 2.0 * basis.n_exc() - geometry.sites();
    op.add_to_diagonal(zeeman_coefficient(couplings, include_lambda_shift) * sz_total);
    return op;
}

inline SparseOperator build_spin_hamiltonian(const ArrayGeometry& geometry,
                                             const SpinCouplings& couplings,
                                             const SectorBasis& basis, bool include_lambda_shift) {
    return add_diagonal(build_spin_interaction(geometry, couplings, basis), geometry, couplings,
                        basis, include_lambda_shift);
}

// ---------------------------------------------------------------------------
// Sector energies along a coupling ray lambda_a = lambda, lambda_b = eta*lambda.

/// With K the interaction at (lambda_a, lambda_b) = (1, eta), the sector
/// ground energy is piecewise linear in lambda:
///   E_n(lambda) = z(lambda) (2n - N) + lambda * (lambda >= 0 ? min eig K : max eig K).
/// The two extremal eigenvalues of K are computed once per sector.
class SectorEnergyRay {
public:
    SectorEnergyRay(const ArrayGeometry& geometry, double omega_at, double eta,
                    bool include_lambda_shift, EigenOptions eig = {})
        : geometry_(geometry),
          omega_at_(omega_at),
          eta_(eta),
          shift_(include_lambda_shift),
          eig_(eig) {}

    [[nodiscard]] double energy(int n_exc, double lambda) const {
        const auto& e = extremes(n_exc);
        const double z = omega_at_ / 2.0 + (shift_ ? lambda * (1.0 + eta_) : 0.0);
        const double interaction = lambda >= 0.0 ? lambda * e.first : lambda * e.second;
        return z * (2.0 * n_exc - geometry_.sites()) + interaction;
    }

    /// (min, max) eigenvalue of the unit-coupling interaction in a sector.
    [[nodiscard]] const std::pair<double, double>& extremes(int n_exc) const {
        auto it = cache_.find(n_exc);
        if (it != cache_.end()) return it->second;
        const SectorBasis basis(geometry_, n_exc);
        const auto unit = SpinCouplings::make(omega_at_, 1.0, eta_);
        const SparseOperator k = build_spin_interaction(geometry_, unit, basis);
        const double lo = ground_state(k, 1, eig_).values.front();
        const double hi = -ground_state(k.scaled(-1.0), 1, eig_).values.front();
        return cache_.emplace(n_exc, std::make_pair(lo, hi)).first->second;
    }

    [[nodiscard]] const ArrayGeometry& geometry() const noexcept { return geometry_; }

private:
    ArrayGeometry geometry_;
    double omega_at_;
    double eta_;
    bool shift_;
    EigenOptions eig_;
    mutable std::map<int, std::pair<double, double>> cache_;
};

struct TransitionOptions {
    double lambda_lo = -1.0;
    double lambda_hi = 0.0;
    double eta = 1.0;                  // lambda_b / lambda_a along the sweep
    bool include_lambda_shift = true;
    bool frustrated = false;           // permits eta < 0 or positive lambda brackets
    int max_n_from = 0;                // transitions n -> n+1 for n in [0, max_n_from]
    double tolerance = 1e-13;          // bracket width at which bisection stops
    EigenOptions eig = {};
};

struct Transition {
    int n_from = 0;
    int n_to = 1;
    double lambda_c = 0.0;
};

namespace detail {

template <typename F>
std::optional<double> bisect_sign_change(F&& f, double lo, double hi, double tol) {
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) return std::nullopt;
    for (int it = 0; it < 400 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Couplings where the sector ground energies E(n) and E(n+1) cross, found
/// by bisection on E(n) - E(n+1). Each linear piece of the bracket (split at
/// lambda = 0) holds at most one crossing per pair of sectors.
inline std::vector<Transition> transition_couplings(const ArrayGeometry& geometry, double omega_at,
                                                    const TransitionOptions& opt) {
    if (!(opt.lambda_lo < opt.lambda_hi)) {
        throw std::invalid_argument("transition_couplings: empty lambda bracket");
    }
    if (!opt.frustrated && (opt.eta <= 0.0 || opt.lambda_hi > 0.0)) {
        throw std::invalid_argument(
            "transition_couplings: non-frustrated sweeps need eta > 0 and lambda <= 0; "
            "set frustrated to sweep other signs");
    }
    const int last = std::min(opt.max_n_from, geometry.sites() - 1);
    const SectorEnergyRay ray(geometry, omega_at, opt.eta, opt.include_lambda_shift, opt.eig);

    std::vector<std::pair<double, double>> pieces;
    if (opt.lambda_lo < 0.0 && opt.lambda_hi > 0.0) {
        pieces = {{opt.lambda_lo, 0.0}, {0.0, opt.lambda_hi}};
    } else {
        pieces = {{opt.lambda_lo, opt.lambda_hi}};
    }
    std::vector<Transition> out;
    for (int n = 0; n <= last; ++n) {
        auto gap = [&](double lambda) { return ray.energy(n, lambda) - ray.energy(n + 1, lambda); };
        for (const auto& [lo, hi] : pieces) {
            if (auto root = detail::bisect_sign_change(gap, lo, hi, opt.tolerance)) {
                out.push_back({n, n + 1, *root});
            }
        }
    }
    return out;
}

struct ExcitationPoint {
    double lambda = 0.0;
    int n_exc = 0;
    double energy = 0.0;
    bool degenerate = false;  // another sector ties the minimum
};

struct ExcitationOptions {
    double eta = 1.0;
    bool include_lambda_shift = true;
    int max_n_exc = -1;  // -1: all sectors
    double tie_tolerance = 1e-12;
    EigenOptions eig = {};
};

inline std::vector<ExcitationPoint> excitation_curve(const ArrayGeometry& geometry, double omega_at,
                                                     const std::vector<double>& lambdas,
                                                     const ExcitationOptions& opt = {}) {
    const int top = opt.max_n_exc < 0 ? geometry.sites()
                                      : std::min(opt.max_n_exc, geometry.sites());
    const SectorEnergyRay ray(geometry, omega_at, opt.eta, opt.include_lambda_shift, opt.eig);
    for (int n = 0; n <= top; ++n) (void)ray.extremes(n);

    std::vector<ExcitationPoint> out;
    out.reserve(lambdas.size());
    for (double lambda : lambdas) {
        if (!std::isfinite(lambda)) {
            throw std::invalid_argument("excitation_curve: lambda values must be finite");
        }
        ExcitationPoint p;
        p.lambda = lambda;
        p.energy = ray.energy(0, lambda);
        for (int n = 1; n <= top; ++n) {
            const double e = ray.energy(n, lambda);
            const double tol = opt.tie_tolerance * std::max(1.0, std::abs(e));
            if (e < p.energy - tol) {
                p.energy = e;
                p.n_exc = n;
                p.degenerate = false;
            } else if (std::abs(e - p.energy) <= tol) {
                p.degenerate = true;
            }
        }
        out.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Correlations

struct CorrelationResult {
    double sigma_nn = 0.0;
    double sigma_nnn = 0.0;
    double ratio = 0.0;
    bool defined = false;
};

/// C(s, t) = <sigma+_s sigma-_t> averaged over the columns of `vectors`
/// (the normalized projector trace over a degenerate subspace). The callable
/// lookup(k, moved_spins) returns the index of basis state k with its spin
/// part replaced, or -1 when that state is not in the basis.
template <typename SpinOf, typename Lookup>
Eigen::MatrixXd pair_correlators(int sites, std::size_t dim, SpinOf&& spin_of, Lookup&& lookup,
                                 const Eigen::MatrixXd& vectors) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(sites, sites);
    const auto d = vectors.cols();
    for (std::size_t k = 0; k < dim; ++k) {
        const Config spins = spin_of(k);
        for (int t = 0; t < sites; ++t) {
            if (!occupied(spins, t)) continue;
            for (int s = 0; s < sites; ++s) {
                if (occupied(spins, s)) continue;
                const long j = lookup(k, spins ^ (Config{1} << t) ^ (Config{1} << s));
                if (j < 0) continue;
                double acc = 0.0;
                for (Eigen::Index v = 0; v < d; ++v) {
                    acc += vectors(j, v) * vectors(static_cast<Eigen::Index>(k), v);
                }
                c(s, t) += acc / static_cast<double>(d);
            }
        }
    }
    return c;
}

/// Means over unordered pairs sharing a row or column (NN) and sharing
/// neither (NNN). In a fixed sector <sigma+-> = 0, so raw and connected
/// correlators coincide.
inline CorrelationResult reduce_correlations(const ArrayGeometry& geometry,
                                             const Eigen::MatrixXd& c) {
    const int n = geometry.sites();
    double nn = 0.0, nnn = 0.0;
    int count_nn = 0, count_nnn = 0;
    for (int s = 0; s < n; ++s) {
        for (int t = s + 1; t < n; ++t) {
            const double v = 0.5 * (c(s, t) + c(t, s));
            if (geometry.share_row(s, t) || geometry.share_col(s, t)) {
                nn += v;
                ++count_nn;
            } else {
                nnn += v;
                ++count_nnn;
            }
        }
    }
    CorrelationResult r;
    r.sigma_nn = count_nn ? nn / count_nn : 0.0;
    r.sigma_nnn = count_nnn ? nnn / count_nnn : 0.0;
    r.defined = count_nn > 0 && count_nnn > 0 && r.sigma_nn != 0.0;
    r.ratio = r.defined ? r.sigma_nnn / r.sigma_nn : 0.0;
    return r;
}

inline CorrelationResult correlation_ratio(const SectorBasis& basis, const Eigen::MatrixXd& vectors) {
    const auto& geometry = basis.geometry();
    if (static_cast<std::size_t>(vectors.rows()) != basis.size()) {
        throw std::invalid_argument("correlation_ratio: vectors do not match the basis");
    }
    CorrelationResult r;
    if (basis.n_exc() == 0 || basis.n_exc() == geometry.sites()) return r;
    const Eigen::MatrixXd c = pair_correlators(
        geometry.sites(), basis.size(), [&](std::size_t k) { return basis.unrank(k); },
        [&](std::size_t, Config moved) { return static_cast<long>(basis.rank(moved)); }, vectors);
    return reduce_correlations(geometry, c);
}

/// Per-vector variant for degenerate ground spaces.
inline std::vector<CorrelationResult> correlation_ratio_per_vector(const SectorBasis& basis,
                                                                   const Eigen::MatrixXd& vectors) {
    std::vector<CorrelationResult> out;
    for (Eigen::Index v = 0; v < vectors.cols(); ++v) {
        out.push_back(correlation_ratio(basis, Eigen::MatrixXd(vectors.col(v))));
    }
    return out;
}

/// <sigma^z_s> per site, averaged over the columns of `vectors`.
inline std::vector<double> site_sz(const SectorBasis& basis, const Eigen::MatrixXd& vectors) {
    const int n = basis.geometry().sites();
    std::vector<double> sz(static_cast<std::size_t>(n), 0.0);
    const auto d = static_cast<double>(vectors.cols());
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const double w = vectors.row(static_cast<Eigen::Index>(k)).squaredNorm() / d;
        const Config c = basis.unrank(k);
        for (int s = 0; s < n; ++s) sz[static_cast<std::size_t>(s)] += occupied(c, s) ? w : -w;
    }
    return sz;
}

/// Ground space of one sector of the full spin Hamiltonian.
struct SectorGround {
    SectorBasis basis;
    SpectrumResult spectrum;
};

inline SectorGround sector_ground(const ArrayGeometry& geometry, const SpinCouplings& couplings,
                                  int n_exc, bool include_lambda_shift,
                                  const EigenOptions& eig = {}) {
    SectorBasis basis(geometry, n_exc);
    const SparseOperator h = build_spin_hamiltonian(geometry, couplings, basis, include_lambda_shift);
    SpectrumResult spectrum = ground_subspace(h, eig);
    return {std::move(basis), std::move(spectrum)};
}

}  // namespace cqed
