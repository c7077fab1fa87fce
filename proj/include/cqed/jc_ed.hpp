// jc_ed.hpp - exact diagonalization of the Jaynes-Cummings lattice with
// truncated photon modes, used as the parent-model oracle for the spin model.
//
//   H = sum_i Delta_i a+_i a_i + sum_nu Delta_nu b+_nu b_nu + omega_at/2 sum sigma^z
//     + g sum_{i,nu} [ sigma+_{i nu} (a_i + b_nu) + h.c. ]
//
// Mode indices: rows 0..Ly-1 are the a modes, then Ly..Ly+Lx-1 the b modes.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cqed/linalg/eigensolver.hpp"
#include "cqed/linalg/sparse_operator.hpp"
#include "cqed/model.hpp"
#include "cqed/sector_basis.hpp"
#include "cqed/spin_ed.hpp"

namespace cqed {

enum class ModeLayout { rows_and_columns, rows_only };

inline constexpr std::uint64_t kMaxJCDimension = 20'000'000;

class JCBasis {
public:
    JCBasis(const ArrayGeometry& geometry, int n_max, std::optional<int> n_tot = std::nullopt,
            ModeLayout layout = ModeLayout::rows_and_columns)
        : geometry_(geometry), n_max_(n_max), n_tot_(n_tot), layout_(layout) {
        if (n_max < 1) throw std::invalid_argument("JCBasis: photon cutoff must be >= 1");
        if (n_tot && *n_tot < 0) throw std::invalid_argument("JCBasis: N_tot must be >= 0");
        modes_ = layout == ModeLayout::rows_only ? geometry.ly() : geometry.modes();
        const double bits = geometry.sites() + modes_ * std::log2(static_cast<double>(n_max) + 1.0);
        if (bits > 63.0) {
            throw std::length_error("JCBasis: state key does not fit 64 bits; reduce the cutoff");
        }
        const std::uint64_t dim = count_states();
        if (dim > kMaxJCDimension) {
            throw std::length_error("JCBasis: dimension " + std::to_string(dim) +
                                    " exceeds the 2e7 guard; fix N_tot or lower the photon cutoff");
        }
        enumerate();
    }

    [[nodiscard]] const ArrayGeometry& geometry() const noexcept { return geometry_; }
    [[nodiscard]] int n_max() const noexcept { return n_max_; }
    [[nodiscard]] std::optional<int> n_tot() const noexcept { return n_tot_; }
    [[nodiscard]] ModeLayout layout() const noexcept { return layout_; }
    [[nodiscard]] int modes() const noexcept { return modes_; }
    [[nodiscard]] std::size_t size() const noexcept { return keys_.size(); }

    [[nodiscard]] Config spins(std::size_t k) const { return keys_[k] & spin_mask(); }
    [[nodiscard]] int photons(std::size_t k, int mode) const {
        return photons_[k * static_cast<std::size_t>(modes_) + static_cast<std::size_t>(mode)];
    }
    [[nodiscard]] int total_photons(std::size_t k) const {
        int t = 0;
        for (int m = 0; m < modes_; ++m) t += photons(k, m);
        return t;
    }
    [[nodiscard]] int total_excitations(std::size_t k) const {
        return std::popcount(spins(k)) + total_photons(k);
    }

    [[nodiscard]] int row_mode(int site) const { return geometry_.row_of(site); }
    [[nodiscard]] std::optional<int> col_mode(int site) const {
        if (layout_ == ModeLayout::rows_only) return std::nullopt;
        return geometry_.ly() + geometry_.col_of(site);
    }

    /// Index of the state with given spins and photon occupations, -1 if absent.
    [[nodiscard]] long find(Config spins, const std::vector<int>& occ) const {
        std::uint64_t code = 0;
        for (int m = modes_ - 1; m >= 0; --m) {
            const int n = occ[static_cast<std::size_t>(m)];
            if (n < 0 || n > n_max_) return -1;
            code = code * static_cast<std::uint64_t>(n_max_ + 1) + static_cast<std::uint64_t>(n);
        }
        const std::uint64_t key = spins | (code << geometry_.sites());
        const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
        if (it == keys_.end() || *it != key) return -1;
        return static_cast<long>(it - keys_.begin());
    }

    [[nodiscard]] std::vector<int> occupations(std::size_t k) const {
        std::vector<int> occ(static_cast<std::size_t>(modes_));
        for (int m = 0; m < modes_; ++m) occ[static_cast<std::size_t>(m)] = photons(k, m);
        return occ;
    }

private:
    [[nodiscard]] Config spin_mask() const { return (Config{1} << geometry_.sites()) - 1; }

    // Ways to place p photons in `modes` modes with at most n_max each.
    [[nodiscard]] std::uint64_t compositions(int p, int modes) const {
        std::vector<std::uint64_t> ways(static_cast<std::size_t>(p) + 1, 0);
        ways[0] = 1;
        for (int m = 0; m < modes; ++m) {
            std::vector<std::uint64_t> next(ways.size(), 0);
            for (int total = 0; total <= p; ++total) {
                for (int n = 0; n <= std::min(n_max_, total); ++n) {
                    next[static_cast<std::size_t>(total)] += ways[static_cast<std::size_t>(total - n)];
                }
            }
            ways = std::move(next);
        }
        return ways[static_cast<std::size_t>(p)];
    }

    [[nodiscard]] std::uint64_t count_states() const {
        const int n = geometry_.sites();
        if (!n_tot_) {
            double d = std::pow(2.0, n) * std::pow(n_max_ + 1.0, modes_);
            return d > 1e18 ? std::numeric_limits<std::uint64_t>::max()
                            : static_cast<std::uint64_t>(d);
        }
        std::uint64_t total = 0;
        for (int k = 0; k <= std::min(n, *n_tot_); ++k) {
            total += binomial(n, k) * compositions(*n_tot_ - k, modes_);
        }
        return total;
    }

    void enumerate() {
        const int n = geometry_.sites();
        std::vector<std::uint64_t> raw;
        std::vector<int> occ(static_cast<std::size_t>(modes_), 0);
        auto emit_photons = [&](auto&& self, int mode, int remaining, bool fixed_total,
                                Config spins) -> void {
            if (mode == modes_) {
                if (fixed_total && remaining != 0) return;
                std::uint64_t code = 0;
                for (int m = modes_ - 1; m >= 0; --m) {
                    code = code * static_cast<std::uint64_t>(n_max_ + 1) +
                           static_cast<std::uint64_t>(occ[static_cast<std::size_t>(m)]);
                }
                raw.push_back(spins | (code << n));
                return;
            }
            const int hi = fixed_total ? std::min(n_max_, remaining) : n_max_;
            for (int k = 0; k <= hi; ++k) {
                occ[static_cast<std::size_t>(mode)] = k;
                self(self, mode + 1, fixed_total ? remaining - k : 0, fixed_total, spins);
            }
            occ[static_cast<std::size_t>(mode)] = 0;
        };
        for (int k = 0; k <= n; ++k) {
            if (n_tot_ && k > *n_tot_) break;
            const SectorBasis spins(geometry_, k);
            for (Config c : spins.states()) {
                if (n_tot_) {
                    emit_photons(emit_photons, 0, *n_tot_ - k, true, c);
                } else {
                    emit_photons(emit_photons, 0, 0, false, c);
                }
            }
        }
        std::sort(raw.begin(), raw.end());
        keys_ = std::move(raw);
        photons_.resize(keys_.size() * static_cast<std::size_t>(modes_));
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            std::uint64_t code = keys_[i] >> n;
            for (int m = 0; m < modes_; ++m) {
                photons_[i * static_cast<std::size_t>(modes_) + static_cast<std::size_t>(m)] =
                    static_cast<std::uint16_t>(code % static_cast<std::uint64_t>(n_max_ + 1));
                code /= static_cast<std::uint64_t>(n_max_ + 1);
            }
        }
    }

    ArrayGeometry geometry_;
    int n_max_;
    std::optional<int> n_tot_;
    ModeLayout layout_;
    int modes_ = 0;
    std::vector<std::uint64_t> keys_;
    std::vector<std::uint16_t> photons_;
};

namespace detail {

inline double mode_detuning(const EffectiveJCParams& p, const JCBasis& basis, int mode) {
    const int ly = basis.geometry().ly();
    return mode < ly ? p.detuning_for_row(mode) : p.detuning_for_col(mode - ly);
}

}  // namespace detail

inline SparseOperator build_jc_hamiltonian(const ArrayGeometry& geometry,
                                           const EffectiveJCParams& params, const JCBasis& basis) {
    if (!(basis.geometry() == geometry)) {
        throw std::invalid_argument("build_jc_hamiltonian: basis built for another geometry");
    }
    const int n = geometry.sites();
    const int modes = basis.modes();
    std::vector<double> mode_energy(static_cast<std::size_t>(modes));
    for (int m = 0; m < modes; ++m) mode_energy[static_cast<std::size_t>(m)] = detail::mode_detuning(params, basis, m);

    std::vector<std::vector<Triplet>> parts(chunk_count(basis.size()));
    parallel_chunks(basis.size(), [&](std::size_t b, std::size_t e, std::size_t chunk) {
        auto& out = parts[chunk];
        std::vector<int> occ;
        for (std::size_t k = b; k < e; ++k) {
            const Config spins = basis.spins(k);
            occ = basis.occupations(k);
            double diag = 0.5 * params.omega_at * (2.0 * std::popcount(spins) - n);
            for (int m = 0; m < modes; ++m) diag += mode_energy[static_cast<std::size_t>(m)] * occ[static_cast<std::size_t>(m)];
            out.push_back({k, k, diag});
            if (params.g == 0.0) continue;
            for (int s = 0; s < n; ++s) {
                const bool up = occupied(spins, s);
                const Config flipped = spins ^ (Config{1} << s);
                auto couple = [&](int mode) {
                    int& nm = occ[static_cast<std::size_t>(mode)];
                    if (!up && nm >= 1) {  // sigma+ a
                        const double amp = params.g * std::sqrt(static_cast<double>(nm));
                        --nm;
                        const long j = basis.find(flipped, occ);
                        ++nm;
                        if (j >= 0) out.push_back({static_cast<std::size_t>(j), k, amp});
                    } else if (up && nm < basis.n_max()) {  // a+ sigma-
                        const double amp = params.g * std::sqrt(static_cast<double>(nm + 1));
                        ++nm;
                        const long j = basis.find(flipped, occ);
                        --nm;
                        if (j >= 0) out.push_back({static_cast<std::size_t>(j), k, amp});
                    }
                };
                couple(basis.row_mode(s));
                if (auto cm = basis.col_mode(s)) couple(*cm);
            }
        }
    });
    std::vector<Triplet> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return SparseOperator::from_triplets(basis.size(), std::move(all));
}

/// Diagonal operator of the total excitation number.
inline std::vector<double> total_excitation_diagonal(const JCBasis& basis) {
    std::vector<double> d(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) d[k] = basis.total_excitations(k);
    return d;
}

struct JCObservables {
    double n_exc_spin = 0.0;
    std::vector<double> n_photons;  // per mode
    double n_tot = 0.0;
    double delta_omega_expectation = 0.0;  // site average of <delta omega_at>
    bool delta_omega_available = false;    // needs both mode families and Delta != omega_at
    CorrelationResult correlations;
};

/// <a+_m1 a_m2> for m1 != m2, averaged over the columns of `vectors`.
inline double mode_coherence(const JCBasis& basis, const Eigen::MatrixXd& vectors, int m1, int m2) {
    double acc = 0.0;
    const auto d = static_cast<double>(vectors.cols());
    std::vector<int> occ;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        occ = basis.occupations(k);
        const int n1 = occ[static_cast<std::size_t>(m1)];
        const int n2 = occ[static_cast<std::size_t>(m2)];
        if (n2 < 1 || n1 >= basis.n_max()) continue;
        ++occ[static_cast<std::size_t>(m1)];
        --occ[static_cast<std::size_t>(m2)];
        const long j = basis.find(basis.spins(k), occ);
        if (j < 0) continue;
        const double amp = std::sqrt(static_cast<double>((n1 + 1) * n2));
        acc += amp * vectors.row(j).dot(vectors.row(static_cast<Eigen::Index>(k)));
    }
    return acc / d;
}

inline CorrelationResult jc_correlation_ratio(const JCBasis& basis, const Eigen::MatrixXd& vectors) {
    const auto& geometry = basis.geometry();
    CorrelationResult none;
    const Eigen::MatrixXd c = pair_correlators(
        geometry.sites(), basis.size(), [&](std::size_t k) { return basis.spins(k); },
        [&](std::size_t k, Config moved) { return basis.find(moved, basis.occupations(k)); },
        vectors);
    if (c.isZero(0.0)) return none;
    return reduce_correlations(geometry, c);
}

inline JCObservables jc_observables(const JCBasis& basis, const EffectiveJCParams& params,
                                    const Eigen::MatrixXd& vectors) {
    JCObservables o;
    const int modes = basis.modes();
    o.n_photons.assign(static_cast<std::size_t>(modes), 0.0);
    const auto d = static_cast<double>(vectors.cols());
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const double w = vectors.row(static_cast<Eigen::Index>(k)).squaredNorm() / d;
        o.n_exc_spin += w * std::popcount(basis.spins(k));
        for (int m = 0; m < modes; ++m) o.n_photons[static_cast<std::size_t>(m)] += w * basis.photons(k, m);
    }
    o.n_tot = o.n_exc_spin;
    for (double x : o.n_photons) o.n_tot += x;

    const auto& geometry = basis.geometry();
    if (basis.layout() == ModeLayout::rows_and_columns) {
        try {
            double sum = 0.0;
            for (int s = 0; s < geometry.sites(); ++s) {
                const int i = geometry.row_of(s);
                const int nu = geometry.col_of(s);
                const int a = i;
                const int b = geometry.ly() + nu;
                const double li = spin_coupling(params.g, params.detuning_for_row(i), params.omega_at);
                const double lnu = spin_coupling(params.g, params.detuning_for_col(nu), params.omega_at);
                const double cross = 2.0 * mode_coherence(basis, vectors, a, b);
                sum += li * (2.0 * o.n_photons[static_cast<std::size_t>(a)] + 1.0 + cross) +
                       lnu * (2.0 * o.n_photons[static_cast<std::size_t>(b)] + 1.0 + cross);
            }
            o.delta_omega_expectation = sum / geometry.sites();
            o.delta_omega_available = true;
        } catch (const std::domain_error&) {
            o.delta_omega_available = false;
        }
    }
    o.correlations = jc_correlation_ratio(basis, vectors);
    return o;
}

// ---------------------------------------------------------------------------

struct JCGroundOptions {
    bool adaptive = true;
    int n_max = 4;
    int n_max_cap = 64;
    std::optional<int> sector;  // fixed N_tot; otherwise sectors are scanned
    int max_sector = -1;        // scan cap, -1: 4 * sites
    ModeLayout layout = ModeLayout::rows_and_columns;
    double tolerance = 1e-8;    // relative energy change for cutoff convergence
    EigenOptions eig = {};
};

struct JCGroundResult {
    SpectrumResult spectrum;
    JCObservables observables;
    int n_tot_sector = 0;
    int n_max_used = 0;
    bool converged = false;
};

namespace detail {

struct SectorSolve {
    double energy = 0.0;
    int sector = 0;
    std::optional<JCBasis> basis;
    SpectrumResult spectrum;
    bool truncated = false;  // some scanned sector exceeded the cutoff
};

inline SectorSolve solve_sectors(const ArrayGeometry& geometry, const EffectiveJCParams& params,
                                 int cutoff, const JCGroundOptions& opt) {
    SectorSolve best;
    bool have = false;
    auto consider = [&](int n_tot) -> double {
        const int nm = std::max(1, std::min(cutoff, n_tot));
        JCBasis basis(geometry, nm, n_tot, opt.layout);
        SpectrumResult r = ground_subspace(build_jc_hamiltonian(geometry, params, basis), opt.eig);
        if (n_tot > cutoff) best.truncated = true;
        const double e = r.values.front();
        if (!have || e < best.energy) {
            best.energy = e;
            best.sector = n_tot;
            best.basis = std::move(basis);
            best.spectrum = std::move(r);
            have = true;
        }
        return e;
    };
    if (opt.sector) {
        consider(*opt.sector);
        return best;
    }
    const int cap = opt.max_sector < 0 ? 4 * geometry.sites() : opt.max_sector;
    double prev = consider(0);
    int rising = 0;
    for (int n_tot = 1; n_tot <= cap; ++n_tot) {
        const double e = consider(n_tot);
        rising = (e > prev && e > best.energy) ? rising + 1 : 0;
        prev = e;
        if (n_tot >= geometry.sites() && rising >= 2) break;
    }
    return best;
}

}  // namespace detail

/// Ground state of the JC lattice. The photon cutoff doubles from n_max
/// until the ground energy changes by less than tolerance * |E|; sectors at
/// or below the cutoff are exact and end the doubling immediately.
inline JCGroundResult jc_ground_state(const ArrayGeometry& geometry, const EffectiveJCParams& params,
                                      const JCGroundOptions& opt = {}) {
    if (!std::isfinite(params.omega_at) || !std::isfinite(params.g)) {
        throw std::invalid_argument("jc_ground_state: parameters must be finite");
    }
    int cutoff = opt.n_max;
    detail::SectorSolve cur = detail::solve_sectors(geometry, params, cutoff, opt);
    bool converged = !cur.truncated;
    while (opt.adaptive && !converged && cutoff < opt.n_max_cap) {
        const int next_cutoff = std::min(2 * cutoff, opt.n_max_cap);
        detail::SectorSolve next = detail::solve_sectors(geometry, params, next_cutoff, opt);
        converged = !next.truncated ||
                    std::abs(next.energy - cur.energy) < opt.tolerance * std::max(1.0, std::abs(next.energy));
        cur = std::move(next);
        cutoff = next_cutoff;
    }
    JCGroundResult out;
    out.n_tot_sector = cur.sector;
    out.n_max_used = cutoff;
    out.converged = converged;
    out.observables = jc_observables(*cur.basis, params, cur.spectrum.vectors);
    out.spectrum = std::move(cur.spectrum);
    return out;
}

/// Ground energy of one N_tot sector, untruncated (cutoff = N_tot).
inline double jc_sector_energy(const ArrayGeometry& geometry, const EffectiveJCParams& params,
                               int n_tot, ModeLayout layout = ModeLayout::rows_and_columns,
                               const EigenOptions& eig = {}) {
    const JCBasis basis(geometry, std::max(1, n_tot), n_tot, layout);
    return ground_state(build_jc_hamiltonian(geometry, params, basis), 1, eig).values.front();
}

struct CriticalGOptions {
    int max_sector = -1;        // sectors 1..max_sector compete with N_tot = 0; -1: N
    double relative_tolerance = 1e-8;
    ModeLayout layout = ModeLayout::rows_and_columns;
    EigenOptions eig = {};
};

/// Smallest g at which the ground state leaves the N_tot = 0 sector.
inline std::optional<double> superradiant_critical_g(const ArrayGeometry& geometry, double Delta,
                                                     double omega_at,
                                                     const CriticalGOptions& opt = {}) {
    if (!(omega_at > 0.0 && Delta > omega_at)) {
        throw std::invalid_argument("superradiant_critical_g: needs Delta > omega_at > 0");
    }
    const int top = opt.max_sector < 0 ? geometry.sites() : opt.max_sector;
    auto gap = [&](double g) {
        const auto p = EffectiveJCParams::uniform(omega_at, g, Delta, Delta);
        const double e0 = jc_sector_energy(geometry, p, 0, opt.layout, opt.eig);
        double emin = std::numeric_limits<double>::infinity();
        for (int n = 1; n <= top; ++n) emin = std::min(emin, jc_sector_energy(geometry, p, n, opt.layout, opt.eig));
        return emin - e0;
    };
    double lo = 0.0;
    double hi = std::sqrt(Delta * omega_at);
    int grow = 0;
    while (gap(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++grow > 40) return std::nullopt;
    }
    while (hi - lo > opt.relative_tolerance * hi) {
        const double mid = 0.5 * (lo + hi);
        if (gap(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// One-mode photon-dressed spin model,
//   H = Delta a+a + (omega_at + 4 lambda a+a) J^z + 2 lambda J+ J-,
// assembled site by site on a 1 x N array whose single row mode couples all spins.

inline JCBasis dressed_spin_1d_basis(int n_spins, int n_max) {
    return JCBasis(ArrayGeometry(n_spins, 1), n_max, std::nullopt, ModeLayout::rows_only);
}

inline SparseOperator build_dressed_spin_1d(const JCBasis& basis, double Delta, double omega_at,
                                            double lambda) {
    if (basis.layout() != ModeLayout::rows_only || basis.geometry().ly() != 1) {
        throw std::invalid_argument("build_dressed_spin_1d: needs a single-mode 1 x N basis");
    }
    const int n = basis.geometry().sites();
    std::vector<Triplet> t;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const Config spins = basis.spins(k);
        const int photons = basis.photons(k, 0);
        const int up = std::popcount(spins);
        // J^z = sum sigma^z / 2; the i == j part of J+J- counts excited spins.
        const double diag = Delta * photons +
                            0.5 * (omega_at + 4.0 * lambda * photons) * (2.0 * up - n) +
                            2.0 * lambda * up;
        t.push_back({k, k, diag});
        if (lambda == 0.0) continue;
        const std::vector<int> occ{photons};
        for (int j = 0; j < n; ++j) {
            if (!occupied(spins, j)) continue;
            for (int i = 0; i < n; ++i) {
                if (occupied(spins, i)) continue;
                const long target = basis.find(spins ^ (Config{1} << j) ^ (Config{1} << i), occ);
                if (target >= 0) t.push_back({static_cast<std::size_t>(target), k, 2.0 * lambda});
            }
        }
    }
    return SparseOperator::from_triplets(basis.size(), std::move(t));
}

}  // namespace cqed
