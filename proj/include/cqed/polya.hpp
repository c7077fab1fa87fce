// polya.hpp - symmetry group of the array acting on sites, its cycle index,
// Polya class counts, explicit orbits and the Hamiltonian restricted to
// equal-amplitude orbit states.

#pragma once

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "cqed/linalg/sparse_operator.hpp"
#include "cqed/model.hpp"
#include "cqed/sector_basis.hpp"
#include "cqed/spin_ed.hpp"

namespace cqed {

using Permutation = std::vector<int>;  // p[s] = image of site s
using Rational = boost::rational<std::int64_t>;

inline constexpr int kMaxMaterializedSites = 16;

enum class TransposeMode { automatic, never, always };

struct PermutationGroup {
    int degree = 0;
    std::vector<Permutation> generators;
    std::vector<Permutation> elements;  // empty unless materialized
    bool materialized = false;
    bool has_transpose = false;

    [[nodiscard]] std::size_t order() const { return elements.size(); }
};

inline Permutation compose(const Permutation& a, const Permutation& b) {  // a after b
    Permutation r(b.size());
    for (std::size_t s = 0; s < b.size(); ++s) r[s] = a[static_cast<std::size_t>(b[s])];
    return r;
}

inline Config apply(const Permutation& p, Config c) {
    Config out = 0;
    while (c != 0) {
        const int s = std::countr_zero(c);
        out |= Config{1} << p[static_cast<std::size_t>(s)];
        c &= c - 1;
    }
    return out;
}

/// Generated by adjacent row swaps, adjacent column swaps and, for square
/// arrays with lambda_a == lambda_b (automatic mode), the transpose.
inline PermutationGroup build_group(const ArrayGeometry& geometry,
                                    TransposeMode transpose = TransposeMode::automatic,
                                    bool symmetric_couplings = true, bool materialize = true) {
    const int n = geometry.sites();
    const int lx = geometry.lx();
    const int ly = geometry.ly();
    PermutationGroup g;
    g.degree = n;
    auto identity = [&] {
        Permutation p(static_cast<std::size_t>(n));
        for (int s = 0; s < n; ++s) p[static_cast<std::size_t>(s)] = s;
        return p;
    };
    for (int r = 0; r + 1 < ly; ++r) {
        Permutation p = identity();
        for (int c = 0; c < lx; ++c) {
            p[static_cast<std::size_t>(geometry.site(r, c))] = geometry.site(r + 1, c);
            p[static_cast<std::size_t>(geometry.site(r + 1, c))] = geometry.site(r, c);
        }
        g.generators.push_back(std::move(p));
    }
    for (int c = 0; c + 1 < lx; ++c) {
        Permutation p = identity();
        for (int r = 0; r < ly; ++r) {
            p[static_cast<std::size_t>(geometry.site(r, c))] = geometry.site(r, c + 1);
            p[static_cast<std::size_t>(geometry.site(r, c + 1))] = geometry.site(r, c);
        }
        g.generators.push_back(std::move(p));
    }
    bool with_transpose = false;
    switch (transpose) {
        case TransposeMode::automatic: with_transpose = geometry.square() && symmetric_couplings; break;
        case TransposeMode::never: break;
        case TransposeMode::always:
            if (!geometry.square()) {
                throw std::invalid_argument("build_group: the transpose maps the array onto itself only for Lx == Ly");
            }
            with_transpose = true;
            break;
    }
    if (with_transpose) {
        Permutation p(static_cast<std::size_t>(n));
        for (int r = 0; r < ly; ++r) {
            for (int c = 0; c < lx; ++c) p[static_cast<std::size_t>(geometry.site(r, c))] = geometry.site(c, r);
        }
        g.generators.push_back(std::move(p));
    }
    g.has_transpose = with_transpose;
    if (!materialize) return g;
    if (n > kMaxMaterializedSites) {
        throw std::length_error("build_group: full materialization is capped at 16 sites");
    }
    std::set<Permutation> seen{identity()};
    std::deque<Permutation> queue{identity()};
    while (!queue.empty()) {
        Permutation cur = std::move(queue.front());
        queue.pop_front();
        g.elements.push_back(cur);
        for (const auto& gen : g.generators) {
            Permutation next = compose(gen, cur);
            if (seen.insert(next).second) queue.push_back(std::move(next));
        }
    }
    g.materialized = true;
    return g;
}

/// Cycle type (b_1, ..., b_N) of a permutation.
inline std::vector<int> cycle_type(const Permutation& p) {
    const std::size_t n = p.size();
    std::vector<int> b(n, 0);
    std::vector<bool> done(n, false);
    for (std::size_t s = 0; s < n; ++s) {
        if (done[s]) continue;
        int len = 0;
        for (std::size_t t = s; !done[t]; t = static_cast<std::size_t>(p[t])) {
            done[t] = true;
            ++len;
        }
        ++b[static_cast<std::size_t>(len - 1)];
    }
    return b;
}

/// Monomial x_1^{b_1} ... x_N^{b_N} -> coefficient, normalized by 1/|G|.
struct CycleIndex {
    int degree = 0;
    std::map<std::vector<int>, Rational> terms;

    /// Value at x_j := x[j-1].
    [[nodiscard]] Rational evaluate(const std::vector<Rational>& x) const {
        Rational total = 0;
        for (const auto& [b, coeff] : terms) {
            Rational t = coeff;
            for (std::size_t j = 0; j < b.size(); ++j) {
                for (int e = 0; e < b[j]; ++e) t *= x[j];
            }
            total += t;
        }
        return total;
    }

    /// Coefficients of r^k after x_j := 1 + r^j, k = 0..N.
    [[nodiscard]] std::vector<Rational> two_color_series() const {
        std::vector<Rational> total(static_cast<std::size_t>(degree) + 1, Rational(0));
        for (const auto& [b, coeff] : terms) {
            std::vector<Rational> poly{Rational(1)};
            for (std::size_t j = 0; j < b.size(); ++j) {
                const std::size_t len = j + 1;
                for (int e = 0; e < b[j]; ++e) {
                    std::vector<Rational> next(poly.size() + len, Rational(0));
                    for (std::size_t k = 0; k < poly.size(); ++k) {
                        next[k] += poly[k];
                        next[k + len] += poly[k];
                    }
                    poly = std::move(next);
                }
            }
            for (std::size_t k = 0; k < poly.size() && k < total.size(); ++k) total[k] += coeff * poly[k];
        }
        return total;
    }

    friend bool operator==(const CycleIndex&, const CycleIndex&) = default;
};

inline CycleIndex cycle_index(const PermutationGroup& group) {
    if (!group.materialized) throw std::invalid_argument("cycle_index: group is not materialized");
    CycleIndex ci;
    ci.degree = group.degree;
    std::map<std::vector<int>, std::int64_t> counts;
    for (const auto& p : group.elements) ++counts[cycle_type(p)];
    const auto order = static_cast<std::int64_t>(group.order());
    for (const auto& [b, c] : counts) ci.terms[b] = Rational(c, order);
    return ci;
}

/// Number of inequivalent two-colorings with n_exc excited sites.
inline std::int64_t polya_count(const PermutationGroup& group, int n_exc) {
    if (n_exc < 0 || n_exc > group.degree) throw std::invalid_argument("polya_count: n_exc out of range");
    const Rational c = cycle_index(group).two_color_series()[static_cast<std::size_t>(n_exc)];
    if (c.denominator() != 1) throw std::logic_error("polya_count: non-integer class count");
    return c.numerator();
}

struct OrbitClass {
    Config representative = 0;  // smallest member
    std::size_t size = 0;
    std::size_t stabilizer_order = 0;
    std::vector<Config> members;  // ascending
};

/// Explicit partition of the n_exc sector, sorted by (size, representative).
inline std::vector<OrbitClass> orbits(const PermutationGroup& group, const ArrayGeometry& geometry,
                                      int n_exc) {
    if (!group.materialized) throw std::invalid_argument("orbits: group is not materialized");
    if (group.degree != geometry.sites()) throw std::invalid_argument("orbits: degree mismatch");
    const SectorBasis basis(geometry, n_exc);
    std::vector<bool> visited(basis.size(), false);
    std::vector<OrbitClass> out;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (visited[k]) continue;
        const Config c = basis.unrank(k);
        OrbitClass o;
        o.representative = c;
        std::set<Config> members;
        for (const auto& p : group.elements) {
            const Config img = apply(p, c);
            if (img == c) ++o.stabilizer_order;
            members.insert(img);
        }
        o.members.assign(members.begin(), members.end());
        o.size = o.members.size();
        for (Config m : o.members) visited[basis.rank(m)] = true;
        out.push_back(std::move(o));
    }
    std::sort(out.begin(), out.end(), [](const OrbitClass& a, const OrbitClass& b) {
        return a.size != b.size ? a.size < b.size : a.representative < b.representative;
    });
    return out;
}

/// <theta_i| H_int |theta_j> with |theta> = |theta|^{-1/2} sum over the orbit.
inline Eigen::MatrixXd orbit_basis_hamiltonian(const ArrayGeometry& geometry,
                                               const SpinCouplings& couplings, int n_exc,
                                               const std::vector<OrbitClass>& classes) {
    if (couplings.lambda_a != couplings.lambda_b) {
        throw std::invalid_argument("orbit_basis_hamiltonian: needs lambda_a == lambda_b");
    }
    const SectorBasis basis(geometry, n_exc);
    const SparseOperator h = build_spin_interaction(geometry, couplings, basis);
    std::vector<int> owner(basis.size(), -1);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        for (Config m : classes[i].members) owner[basis.rank(m)] = static_cast<int>(i);
    }
    const auto n = static_cast<Eigen::Index>(classes.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t j = 0; j < classes.size(); ++j) {
        for (Config t : classes[j].members) {
            const std::size_t col = basis.rank(t);
            const double d = h.diagonal()[col];
            if (d != 0.0) m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += d;
            h.for_each_in_row(col, [&](std::size_t row, double v) {
                const int i = owner[row];
                if (i < 0) throw std::invalid_argument("orbit_basis_hamiltonian: orbits do not cover the sector");
                m(i, static_cast<Eigen::Index>(j)) += v;
            });
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) /= std::sqrt(static_cast<double>(classes[static_cast<std::size_t>(i)].size) *
                                 static_cast<double>(classes[static_cast<std::size_t>(j)].size));
        }
    }
    return m;
}

struct OrbitDecomposition {
    std::vector<double> amplitudes;
    double norm_sq = 0.0;
    bool complete = false;  // sum |psi_i|^2 == 1 within tolerance
};

inline OrbitDecomposition ground_state_orbit_decomposition(const SectorBasis& basis,
                                                           const Eigen::VectorXd& state,
                                                           const std::vector<OrbitClass>& classes,
                                                           double tolerance = 1e-10) {
    if (static_cast<std::size_t>(state.size()) != basis.size()) {
        throw std::invalid_argument("ground_state_orbit_decomposition: state does not match the sector");
    }
    OrbitDecomposition d;
    for (const auto& o : classes) {
        double acc = 0.0;
        for (Config m : o.members) acc += state[static_cast<Eigen::Index>(basis.rank(m))];
        const double psi = acc / std::sqrt(static_cast<double>(o.size));
        d.amplitudes.push_back(psi);
        d.norm_sq += psi * psi;
    }
    const double total = state.squaredNorm();
    d.complete = std::abs(d.norm_sq - total) <= tolerance * std::max(1.0, total);
    return d;
}

}  // namespace cqed
