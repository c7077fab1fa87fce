// model.hpp - array geometry, model parameters and the derivation chain
// drive -> effective Jaynes-Cummings -> effective spin couplings.
//
// Energies carry no fixed unit; the CLI expresses them in units of omega_at.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cqed {

/// Ly rows by Lx columns; site s = col + Lx * row. Row cavities are the "a"
/// modes, column cavities the "b" modes.
class ArrayGeometry {
public:
    ArrayGeometry(int lx, int ly) : lx_(lx), ly_(ly) {
        if (lx < 1 || ly < 1) {
            throw std::invalid_argument("ArrayGeometry: Lx and Ly must be >= 1");
        }
    }

    [[nodiscard]] int lx() const noexcept { return lx_; }
    [[nodiscard]] int ly() const noexcept { return ly_; }
    [[nodiscard]] int sites() const noexcept { return lx_ * ly_; }
    [[nodiscard]] int modes() const noexcept { return lx_ + ly_; }
    [[nodiscard]] bool square() const noexcept { return lx_ == ly_; }

    [[nodiscard]] int site(int row, int col) const noexcept { return col + lx_ * row; }
    [[nodiscard]] int row_of(int s) const noexcept { return s / lx_; }
    [[nodiscard]] int col_of(int s) const noexcept { return s % lx_; }

    [[nodiscard]] bool share_row(int s, int t) const noexcept { return row_of(s) == row_of(t); }
    [[nodiscard]] bool share_col(int s, int t) const noexcept { return col_of(s) == col_of(t); }

    friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;

private:
    int lx_;
    int ly_;
};

/// Thresholds that turn the "much greater / much smaller" conditions into
/// numbers. All of them are user-visible configuration.
struct Thresholds {
    double elimination_ratio = 10.0;  // |Delta_e| and Omega vs. the couplings
    double epsilon = 0.1;             // g / |Delta - omega_at|
    double weak = 0.1;                // |lambda| / |omega_at|
    double quality_min = 10.0;        // Q lower bound in the frustrated analysis
};

struct PhysicalDriveParams {
    double Omega = 0.0;
    double g0 = 0.0;
    double Delta_e = 0.0;
};

/// Effective JC parameters. g is stored as a magnitude; the sign of the
/// underlying -g0*Omega/Delta_e is kept in g_sign. Detunings are per row
/// (Delta_a, size 1 or Ly) and per column (Delta_b, size 1 or Lx).
struct EffectiveJCParams {
    double omega_at = 0.0;
    double g = 0.0;
    int g_sign = 1;
    std::vector<double> Delta_a;
    std::vector<double> Delta_b;

    // Set when the excited-state elimination conditions are only marginally met.
    bool elimination_warning = false;

    [[nodiscard]] bool uniform() const {
        auto same = [](const std::vector<double>& v) {
            return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
        };
        return !Delta_a.empty() && !Delta_b.empty() && same(Delta_a) && same(Delta_b);
    }

    [[nodiscard]] double delta_a() const { return uniform_value(Delta_a, "Delta_a"); }
    [[nodiscard]] double delta_b() const { return uniform_value(Delta_b, "Delta_b"); }

    [[nodiscard]] double detuning_for_row(int row) const { return pick(Delta_a, row, "Delta_a"); }
    [[nodiscard]] double detuning_for_col(int col) const { return pick(Delta_b, col, "Delta_b"); }

    static EffectiveJCParams uniform(double omega_at, double g, double delta_a, double delta_b) {
        EffectiveJCParams p;
        p.omega_at = omega_at;
        p.g = std::abs(g);
        p.g_sign = g < 0 ? -1 : 1;
        p.Delta_a = {delta_a};
        p.Delta_b = {delta_b};
        return p;
    }

private:
    static double uniform_value(const std::vector<double>& v, const char* name) {
        if (v.empty()) {
            throw std::invalid_argument(std::string(name) + " is not set");
        }
        for (double x : v) {
            if (x != v.front()) {
                throw std::invalid_argument(std::string(name) +
                                            ": closed-form operations need uniform detunings");
            }
        }
        return v.front();
    }
    static double pick(const std::vector<double>& v, int idx, const char* name) {
        if (v.empty()) {
            throw std::invalid_argument(std::string(name) + " is not set");
        }
        if (v.size() == 1) return v.front();
        if (idx < 0 || static_cast<std::size_t>(idx) >= v.size()) {
            throw std::out_of_range(std::string(name) + ": index out of range");
        }
        return v[static_cast<std::size_t>(idx)];
    }
};

struct SpinCouplings {
    double lambda_a = 0.0;
    double lambda_b = 0.0;
    double eta = 0.0;  // lambda_b / lambda_a, 0 when lambda_a == 0
    double omega_at = 0.0;
    double omega_at_prime = 0.0;

    static SpinCouplings make(double omega_at, double lambda_a, double lambda_b) {
        SpinCouplings c;
        c.omega_at = omega_at;
        c.lambda_a = lambda_a;
        c.lambda_b = lambda_b;
        c.eta = lambda_a != 0.0 ? lambda_b / lambda_a : 0.0;
        c.omega_at_prime = omega_at + 2.0 * (lambda_a + lambda_b);
        return c;
    }

    [[nodiscard]] bool symmetric() const noexcept { return lambda_a == lambda_b; }
};

enum class Frustration { non_frustrated, frustrated };
enum class InteractionStrength { weak, strong };

struct ValidityEpsilon {
    double eps_a = 0.0;
    double eps_b = 0.0;
    bool reduction_valid = true;
};

struct RegimeTag {
    Frustration frustration = Frustration::non_frustrated;
    InteractionStrength interaction_strength = InteractionStrength::weak;
    std::optional<ValidityEpsilon> reduction;
    bool self_consistent = true;  // |<delta omega>| small, when supplied
};

inline const char* to_string(Frustration f) {
    return f == Frustration::frustrated ? "frustrated" : "non-frustrated";
}
inline const char* to_string(InteractionStrength s) {
    return s == InteractionStrength::weak ? "weak" : "strong";
}

/// Adiabatic elimination of the excited state. Detunings are left unset.
inline EffectiveJCParams derive_effective_params(const PhysicalDriveParams& drive,
                                                 const Thresholds& th = {}) {
    if (drive.Delta_e == 0.0) {
        throw std::invalid_argument("derive_effective_params: Delta_e must be nonzero");
    }
    EffectiveJCParams p;
    p.omega_at = -drive.Omega * drive.Omega / drive.Delta_e;
    const double g_signed = -drive.g0 * drive.Omega / drive.Delta_e;
    p.g = std::abs(g_signed);
    p.g_sign = g_signed < 0 ? -1 : 1;
    const double big = std::max(std::abs(drive.Omega), std::abs(drive.g0));
    p.elimination_warning = std::abs(drive.Delta_e) < th.elimination_ratio * big ||
                            std::abs(drive.Omega) < th.elimination_ratio * std::abs(drive.g0);
    return p;
}

inline double spin_coupling(double g, double Delta, double omega_at) {
    const double detuning = Delta - omega_at;
    if (detuning == 0.0) {
        throw std::domain_error("spin coupling: cavity resonant with the atom (Delta == omega_at)");
    }
    return -g * g / (2.0 * detuning);
}

inline SpinCouplings derive_spin_couplings(const EffectiveJCParams& jc) {
    const double la = spin_coupling(jc.g, jc.delta_a(), jc.omega_at);
    const double lb = spin_coupling(jc.g, jc.delta_b(), jc.omega_at);
    return SpinCouplings::make(jc.omega_at, la, lb);
}

/// Column detuning that realises lambda_b = eta * lambda_a.
inline double delta_b_from_eta(double Delta_a, double omega_at, double eta) {
    if (eta == 0.0) {
        throw std::invalid_argument("delta_b_from_eta: eta must be nonzero");
    }
    return (Delta_a - omega_at) / eta + omega_at;
}

inline ValidityEpsilon validity_epsilon(const EffectiveJCParams& jc, const Thresholds& th = {}) {
    auto eps = [&](double Delta) {
        const double d = jc.omega_at - Delta;
        if (d == 0.0) {
            throw std::domain_error("validity_epsilon: resonance Delta == omega_at");
        }
        return std::abs(jc.g / d);
    };
    ValidityEpsilon v;
    v.eps_a = eps(jc.delta_a());
    v.eps_b = eps(jc.delta_b());
    v.reduction_valid = v.eps_a < th.epsilon && v.eps_b < th.epsilon;
    return v;
}

inline RegimeTag classify_regime(const SpinCouplings& c,
                                 std::optional<double> delta_omega_expectation = std::nullopt,
                                 const Thresholds& th = {}) {
    RegimeTag tag;
    tag.frustration = (c.lambda_a < 0.0 && c.lambda_b < 0.0) ? Frustration::non_frustrated
                                                             : Frustration::frustrated;
    const double scale = th.weak * std::abs(c.omega_at);
    const bool weak = std::abs(c.lambda_a) < scale && std::abs(c.lambda_b) < scale;
    tag.interaction_strength = weak ? InteractionStrength::weak : InteractionStrength::strong;
    if (delta_omega_expectation) {
        tag.self_consistent = std::abs(*delta_omega_expectation) < scale;
        if (!tag.self_consistent) tag.interaction_strength = InteractionStrength::strong;
    }
    return tag;
}

inline RegimeTag classify_regime(const EffectiveJCParams& jc,
                                 std::optional<double> delta_omega_expectation = std::nullopt,
                                 const Thresholds& th = {}) {
    RegimeTag tag = classify_regime(derive_spin_couplings(jc), delta_omega_expectation, th);
    tag.reduction = validity_epsilon(jc, th);
    return tag;
}

}  // namespace cqed
