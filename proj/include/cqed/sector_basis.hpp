// sector_basis.hpp - fixed-excitation spin configurations with O(1) ranking
// through the combinatorial number system.

#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cqed/model.hpp"

namespace cqed {

using Config = std::uint64_t;

namespace detail {

struct BinomialTable {
    std::array<std::array<std::uint64_t, 65>, 65> c{};
    constexpr BinomialTable() {
        for (int n = 0; n <= 64; ++n) {
            c[n][0] = 1;
            for (int k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0);
        }
    }
};

inline constexpr BinomialTable binomials{};

}  // namespace detail

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n || n > 64) return 0;
    return detail::binomials.c[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

/// All N-bit words with exactly n_exc set bits, ascending. Bit s is site s.
class SectorBasis {
public:
    SectorBasis(const ArrayGeometry& geometry, int n_exc) : geometry_(geometry), n_exc_(n_exc) {
        const int n = geometry.sites();
        if (n_exc < 0 || n_exc > n) {
            throw std::invalid_argument("SectorBasis: n_exc out of range [0, N]");
        }
        if (n > 64) throw std::length_error("SectorBasis: spin words hold at most 64 sites");
        const std::uint64_t count = binomial(n, n_exc);
        if (count > (std::uint64_t{1} << 31)) {
            throw std::length_error("SectorBasis: sector too large to enumerate");
        }
        states_.reserve(static_cast<std::size_t>(count));
        if (n_exc == 0) {
            states_.push_back(0);
            return;
        }
        // Gosper's hack walks fixed-weight words in increasing order.
        Config x = n_exc == 64 ? ~Config{0} : (Config{1} << n_exc) - 1;
        const Config limit = n == 64 ? 0 : (Config{1} << n);
        for (std::uint64_t i = 0; i < count; ++i) {
            states_.push_back(x);
            const Config c = x & (~x + 1);
            const Config r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
            if (limit != 0 && x >= limit) break;
        }
    }

    [[nodiscard]] const ArrayGeometry& geometry() const noexcept { return geometry_; }
    [[nodiscard]] int n_exc() const noexcept { return n_exc_; }
    [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
    [[nodiscard]] const std::vector<Config>& states() const noexcept { return states_; }
    [[nodiscard]] Config unrank(std::size_t k) const { return states_.at(k); }

    /// Colex rank, which coincides with ascending integer order at fixed weight.
    /// Unchecked: c must satisfy contains(c).
    [[nodiscard]] std::size_t rank(Config c) const {
        std::size_t r = 0;
        int i = 1;
        while (c != 0) {
            const int pos = std::countr_zero(c);
            r += static_cast<std::size_t>(binomial(pos, i));
            ++i;
            c &= c - 1;
        }
        return r;
    }

    [[nodiscard]] bool contains(Config c) const {
        return std::popcount(c) == n_exc_ &&
               (geometry_.sites() == 64 || (c >> geometry_.sites()) == 0);
    }

private:
    ArrayGeometry geometry_;
    int n_exc_;
    std::vector<Config> states_;
};

inline bool occupied(Config c, int site) noexcept { return ((c >> site) & 1U) != 0; }

}  // namespace cqed
