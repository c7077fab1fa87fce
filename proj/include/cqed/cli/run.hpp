// run.hpp - command dispatch behind the cqed executable. Everything here is
// callable in-process; tools/cqed.cpp only forwards argv.

#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cqed/analytic_1d.hpp"
#include "cqed/frustration.hpp"
#include "cqed/io/table.hpp"
#include "cqed/jc_ed.hpp"
#include "cqed/meanfield.hpp"
#include "cqed/model.hpp"
#include "cqed/polya.hpp"
#include "cqed/spin_ed.hpp"
#include "cqed/version.hpp"

namespace cqed::cli {

using nlohmann::json;
using io::Cell;
using io::Column;
using io::ColumnType;
using io::ResultTable;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OptKind { real, integer, text, grid, flag };

struct OptionSpec {
    const char* name;
    OptKind kind;
    const char* help;
};

inline const std::vector<OptionSpec>& option_catalog() {
    static const std::vector<OptionSpec> opts{
        {"lx", OptKind::integer, "columns of the array"},
        {"ly", OptKind::integer, "rows of the array"},
        {"Omega", OptKind::real, "drive Rabi frequency (drive level)"},
        {"g0", OptKind::real, "bare cavity coupling (drive level)"},
        {"Delta-e", OptKind::real, "excited-state detuning (drive level)"},
        {"omega", OptKind::real, "effective atomic frequency omega_at"},
        {"g", OptKind::real, "effective JC coupling (JC level)"},
        {"delta", OptKind::real, "cavity detuning for rows and columns"},
        {"delta-a", OptKind::grid, "row detuning, one value or one per row"},
        {"delta-b", OptKind::grid, "column detuning, one value or one per column"},
        {"lambda", OptKind::real, "spin coupling for rows and columns (spin level)"},
        {"lambda-a", OptKind::real, "row spin coupling (spin level)"},
        {"lambda-b", OptKind::real, "column spin coupling (spin level)"},
        {"eta", OptKind::real, "lambda_b / lambda_a"},
        {"nexc", OptKind::integer, "spin excitation sector"},
        {"nexc-list", OptKind::grid, "spin excitation sectors"},
        {"levels", OptKind::integer, "eigenvalues per sector"},
        {"no-shift", OptKind::flag, "drop the (lambda_a + lambda_b) sigma^z shift"},
        {"ntot", OptKind::integer, "fixed total-excitation sector"},
        {"nmax", OptKind::integer, "initial photon cutoff per mode"},
        {"nmax-cap", OptKind::integer, "largest photon cutoff"},
        {"max-sector", OptKind::integer, "largest total-excitation sector scanned"},
        {"max-nexc", OptKind::integer, "largest spin sector considered"},
        {"delta-grid", OptKind::grid, "Delta / omega_at values"},
        {"lambda-grid", OptKind::grid, "lambda values"},
        {"g-grid", OptKind::grid, "g values"},
        {"skip-jc", OptKind::flag, "skip the JC diagonalization"},
        {"mode", OptKind::text, "sweep | table | critical"},
        {"n-spins", OptKind::integer, "number of spins on the single mode"},
        {"transpose", OptKind::text, "auto | never | always"},
        {"eta-grid", OptKind::grid, "eta values (< 0)"},
        {"ly-over-lx", OptKind::grid, "Ly / Lx values"},
        {"delta-a-over-omega", OptKind::grid, "Delta_a / omega_at values"},
        {"q-min", OptKind::real, "lower bound on the quality factor"},
        {"elimination-ratio", OptKind::real, "threshold for the excited-state elimination"},
        {"epsilon", OptKind::real, "threshold on g / |Delta - omega_at|"},
        {"weak", OptKind::real, "threshold on |lambda| / |omega_at|"},
        {"seed", OptKind::integer, "seed for iterative eigensolver start vectors"},
    };
    return opts;
}

inline const OptionSpec& option_spec(const std::string& name) {
    for (const auto& o : option_catalog()) {
        if (name == o.name) return o;
    }
    throw std::logic_error("unknown option " + name);
}

struct CommandSpec {
    const char* name;
    const char* help;
    std::vector<std::string> options;
};

inline const std::vector<CommandSpec>& command_catalog() {
    const std::vector<std::string> levels{"Omega", "g0", "Delta-e", "omega", "g", "delta", "delta-a",
                                          "delta-b", "lambda", "lambda-a", "lambda-b", "eta"};
    auto with = [&](std::vector<std::string> extra, bool include_levels = true) {
        std::vector<std::string> v = include_levels ? levels : std::vector<std::string>{};
        v.insert(v.end(), extra.begin(), extra.end());
        return v;
    };
    static const std::vector<CommandSpec> cmds{
        {"derive-params", "derive JC and spin parameters and the regime tags",
         with({"elimination-ratio", "epsilon", "weak"})},
        {"spin-ed", "lowest levels of the spin model per excitation sector",
         with({"lx", "ly", "nexc", "levels", "no-shift", "seed"})},
        {"jc-ed", "ground state and observables of the JC lattice",
         with({"lx", "ly", "ntot", "nmax", "nmax-cap", "max-sector", "seed"})},
        {"crossover", "superradiant critical coupling: JC vs spin model vs mean field",
         with({"lx", "ly", "omega", "delta-grid", "skip-jc", "max-sector", "seed"}, false)},
        {"excitation-curve", "ground-state excitation number along a lambda sweep",
         with({"lx", "ly", "omega", "lambda-grid", "eta", "no-shift", "max-nexc", "seed"}, false)},
        {"correlations", "NNN / NN correlation ratio per excitation sector", with({"lx", "ly", "nexc-list", "seed"})},
        {"analytic-1d", "closed-form single-mode model",
         with({"mode", "n-spins", "omega", "delta", "lambda-grid"}, false)},
        {"meanfield", "coherent-state mean field", with({"lx", "ly", "omega", "delta", "g-grid"}, false)},
        {"polya", "symmetry classes of excitation patterns", with({"lx", "ly", "nexc", "transpose"}, false)},
        {"frustration-scan", "validity region for mixed-sign couplings",
         with({"lx", "omega", "eta-grid", "ly-over-lx", "delta-a-over-omega", "q-min"}, false)},
    };
    return cmds;
}

inline const CommandSpec& command_spec(const std::string& name) {
    for (const auto& c : command_catalog()) {
        if (name == c.name) return c;
    }
    throw UsageError("unknown command '" + name + "'");
}

// ---------------------------------------------------------------------------

inline std::vector<double> parse_grid(const std::string& text) {
    auto number = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
            throw UsageError("grid: cannot parse '" + s + "' as a finite number");
        }
        return v;
    };
    std::vector<double> out;
    if (text.find_first_not_of(" \t") == std::string::npos) return out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw UsageError("grid: range form is start:stop:count");
        const double a = number(parts[0]);
        const double b = number(parts[1]);
        const double c = number(parts[2]);
        if (c < 1 || c != std::floor(c)) throw UsageError("grid: count must be a positive integer");
        const auto n = static_cast<int>(c);
        for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
    return out;
}

/// Typed view of the parameter object. Every value read, including
/// defaults, is recorded; the record is what the config hash covers.
class Params {
public:
    Params(json values, const CommandSpec& cmd) : values_(std::move(values)) {
        if (!values_.is_object()) throw UsageError("parameters must be a JSON object");
        for (const auto& [key, v] : values_.items()) {
            if (std::find(cmd.options.begin(), cmd.options.end(), key) == cmd.options.end()) {
                throw UsageError("option '" + key + "' does not apply to command '" + cmd.name + "'");
            }
            if (v.is_null()) throw UsageError("option '" + key + "' has no value");
        }
    }

    [[nodiscard]] bool has(const std::string& k) const { return values_.contains(k); }

    std::optional<double> real(const std::string& k) {
        if (!has(k)) return std::nullopt;
        const double v = to_real(k, values_.at(k));
        resolved_[k] = v;
        return v;
    }
    double real_or(const std::string& k, double def) {
        const double v = real(k).value_or(def);
        resolved_[k] = v;
        return v;
    }
    double require_real(const std::string& k) {
        if (auto v = real(k)) return *v;
        throw UsageError("missing required option --" + k);
    }

    std::optional<long> integer(const std::string& k) {
        if (!has(k)) return std::nullopt;
        const json& j = values_.at(k);
        double v = to_real(k, j);
        if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError("--" + k + " must be an integer");
        resolved_[k] = static_cast<long>(v);
        return static_cast<long>(v);
    }
    long integer_or(const std::string& k, long def) {
        const long v = integer(k).value_or(def);
        resolved_[k] = v;
        return v;
    }
    long require_integer(const std::string& k) {
        if (auto v = integer(k)) return *v;
        throw UsageError("missing required option --" + k);
    }

    std::optional<std::vector<double>> grid_opt(const std::string& k) {
        if (!has(k)) return std::nullopt;
        const json& j = values_.at(k);
        std::vector<double> v;
        if (j.is_array()) {
            for (const auto& x : j) v.push_back(to_real(k, x));
        } else if (j.is_number()) {
            v.push_back(j.get<double>());
        } else if (j.is_string()) {
            v = parse_grid(j.get<std::string>());
        } else {
            throw UsageError("--" + k + " must be a list of numbers");
        }
        if (v.empty()) throw UsageError("--" + k + ": empty grid");
        resolved_[k] = v;
        return v;
    }
    std::vector<double> grid(const std::string& k) {
        if (auto v = grid_opt(k)) return *v;
        throw UsageError("missing required grid --" + k);
    }
    std::vector<double> grid_or(const std::string& k, std::vector<double> def) {
        auto v = grid_opt(k).value_or(std::move(def));
        resolved_[k] = v;
        return v;
    }

    std::string text_or(const std::string& k, const std::string& def) {
        std::string v = def;
        if (has(k)) {
            const json& j = values_.at(k);
            if (!j.is_string()) throw UsageError("--" + k + " must be a string");
            v = j.get<std::string>();
        }
        resolved_[k] = v;
        return v;
    }

    bool flag(const std::string& k) {
        bool v = false;
        if (has(k)) {
            const json& j = values_.at(k);
            if (!j.is_boolean()) throw UsageError("--" + k + " is a flag (true/false)");
            v = j.get<bool>();
        }
        resolved_[k] = v;
        return v;
    }

    [[nodiscard]] const json& resolved() const { return resolved_; }

private:
    static double to_real(const std::string& k, const json& j) {
        if (j.is_number()) return j.get<double>();
        if (j.is_string()) {
            const auto s = j.get<std::string>();
            double v = 0.0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (!s.empty() && res.ec == std::errc{} && res.ptr == s.data() + s.size() && std::isfinite(v)) return v;
        }
        throw UsageError("--" + k + " must be a finite number");
    }

    json values_;
    json resolved_ = json::object();
};

// ---------------------------------------------------------------------------
// Parameter levels

enum class Level { none, drive, jc, spin };

inline Level parameter_level(const Params& p) {
    const bool drive = p.has("Omega") || p.has("g0") || p.has("Delta-e");
    const bool jc = p.has("g");
    const bool spin = p.has("lambda") || p.has("lambda-a") || p.has("lambda-b");
    const int count = int(drive) + int(jc) + int(spin);
    if (count > 1) {
        throw UsageError("give exactly one parameter level: drive (Omega, g0, Delta-e), JC (g) or spin (lambda)");
    }
    if (drive) return Level::drive;
    if (jc) return Level::jc;
    if (spin) return Level::spin;
    return Level::none;
}

inline void read_detunings(Params& p, EffectiveJCParams& jc) {
    if (p.has("delta") && (p.has("delta-a") || p.has("delta-b"))) {
        throw UsageError("--delta sets both detunings; do not combine it with --delta-a / --delta-b");
    }
    if (auto d = p.real("delta")) {
        jc.Delta_a = {*d};
        jc.Delta_b = {*d};
        return;
    }
    if (auto a = p.grid_opt("delta-a")) jc.Delta_a = *a;
    if (auto b = p.grid_opt("delta-b")) jc.Delta_b = *b;
    if (jc.Delta_a.empty()) throw UsageError("missing cavity detuning: --delta or --delta-a");
    if (jc.Delta_b.empty()) {
        auto eta = p.real("eta");
        if (!eta) throw UsageError("missing column detuning: --delta-b or --eta");
        if (jc.Delta_a.size() != 1) throw UsageError("--eta needs a single --delta-a value");
        jc.Delta_b = {delta_b_from_eta(jc.Delta_a.front(), jc.omega_at, *eta)};
    } else if (p.has("eta")) {
        throw UsageError("--eta and --delta-b both fix the column detuning");
    }
}

inline EffectiveJCParams resolve_jc(Params& p, const Thresholds& th = {}) {
    const Level level = parameter_level(p);
    EffectiveJCParams jc;
    if (level == Level::drive) {
        if (p.has("omega")) throw UsageError("omega_at follows from the drive; do not pass --omega");
        PhysicalDriveParams d;
        d.Omega = p.require_real("Omega");
        d.g0 = p.require_real("g0");
        d.Delta_e = p.require_real("Delta-e");
        jc = derive_effective_params(d, th);
    } else if (level == Level::jc) {
        jc.omega_at = p.require_real("omega");
        const double g = p.require_real("g");
        jc.g = std::abs(g);
        jc.g_sign = g < 0 ? -1 : 1;
    } else {
        throw UsageError("this command needs drive-level (Omega, g0, Delta-e) or JC-level (omega, g) parameters");
    }
    read_detunings(p, jc);
    return jc;
}

inline SpinCouplings resolve_spin(Params& p) {
    if (parameter_level(p) != Level::spin) return derive_spin_couplings(resolve_jc(p));
    if (p.has("delta") || p.has("delta-a") || p.has("delta-b")) {
        throw UsageError("cavity detunings belong to the JC level; spin-level runs take lambda directly");
    }
    const double omega = p.require_real("omega");
    if (auto l = p.real("lambda")) {
        if (p.has("lambda-a") || p.has("lambda-b") || p.has("eta")) {
            throw UsageError("--lambda sets both couplings; do not combine with --lambda-a / --lambda-b / --eta");
        }
        return SpinCouplings::make(omega, *l, *l);
    }
    const double la = p.require_real("lambda-a");
    if (auto lb = p.real("lambda-b")) {
        if (p.has("eta")) throw UsageError("--eta and --lambda-b both fix lambda_b");
        return SpinCouplings::make(omega, la, *lb);
    }
    if (auto eta = p.real("eta")) return SpinCouplings::make(omega, la, *eta * la);
    throw UsageError("missing --lambda-b or --eta");
}

/// Exact diagonalization stores a spin configuration in one 64-bit word.
inline ArrayGeometry resolve_geometry(Params& p, long max_sites = 64) {
    const long lx = p.require_integer("lx");
    const long ly = p.require_integer("ly");
    if (lx < 1 || ly < 1) throw UsageError("need Lx, Ly >= 1");
    if (lx * ly > max_sites) throw UsageError("need Lx * Ly <= " + std::to_string(max_sites));
    return {static_cast<int>(lx), static_cast<int>(ly)};
}

inline EigenOptions resolve_eig(Params& p) {
    EigenOptions eig;
    if (auto s = p.integer("seed")) eig.seed = static_cast<std::uint64_t>(*s);
    return eig;
}

inline Cell text(const char* s) { return std::string(s); }
inline Cell integer_cell(long long v) { return static_cast<std::int64_t>(v); }

// ---------------------------------------------------------------------------
// Commands. Each returns its table and the energy unit (|omega_at|, or 0 if
// the table holds no energies).

struct CommandOutput {
    ResultTable table;
    double energy_unit = 0.0;
};

inline CommandOutput cmd_derive_params(Params& p) {
    Thresholds th;
    th.elimination_ratio = p.real_or("elimination-ratio", th.elimination_ratio);
    th.epsilon = p.real_or("epsilon", th.epsilon);
    th.weak = p.real_or("weak", th.weak);
    ResultTable t({{"omega_at", ColumnType::real, true},
                   {"g", ColumnType::real, true},
                   {"g_sign", ColumnType::integer},
                   {"Delta_a", ColumnType::real, true},
                   {"Delta_b", ColumnType::real, true},
                   {"lambda_a", ColumnType::real, true},
                   {"lambda_b", ColumnType::real, true},
                   {"eta", ColumnType::real},
                   {"omega_at_prime", ColumnType::real, true},
                   {"eps_a", ColumnType::real},
                   {"eps_b", ColumnType::real},
                   {"reduction_valid", ColumnType::flag},
                   {"frustration", ColumnType::text},
                   {"interaction_strength", ColumnType::text},
                   {"elimination_warning", ColumnType::flag}});
    const Level level = parameter_level(p);
    if (level == Level::none) throw UsageError("derive-params needs one parameter level");
    if (level == Level::spin) {
        const SpinCouplings c = resolve_spin(p);
        const RegimeTag tag = classify_regime(c, std::nullopt, th);
        t.add_row({c.omega_at, text("n/a"), text("n/a"), text("n/a"), text("n/a"), c.lambda_a, c.lambda_b,
                   c.eta, c.omega_at_prime, text("n/a"), text("n/a"), text("n/a"),
                   text(to_string(tag.frustration)), text(to_string(tag.interaction_strength)), text("n/a")});
        return {std::move(t), std::abs(c.omega_at)};
    }
    const EffectiveJCParams jc = resolve_jc(p, th);
    const SpinCouplings c = derive_spin_couplings(jc);
    const RegimeTag tag = classify_regime(jc, std::nullopt, th);
    t.add_row({jc.omega_at, jc.g, integer_cell(jc.g_sign), jc.delta_a(), jc.delta_b(), c.lambda_a, c.lambda_b,
               c.eta, c.omega_at_prime, tag.reduction->eps_a, tag.reduction->eps_b,
               tag.reduction->reduction_valid, text(to_string(tag.frustration)),
               text(to_string(tag.interaction_strength)), jc.elimination_warning});
    return {std::move(t), std::abs(jc.omega_at)};
}

inline CommandOutput cmd_spin_ed(Params& p) {
    const ArrayGeometry geometry = resolve_geometry(p);
    const SpinCouplings c = resolve_spin(p);
    const long levels = p.integer_or("levels", 1);
    if (levels < 1) throw UsageError("--levels must be >= 1");
    const bool shift = !p.flag("no-shift");
    const EigenOptions eig = resolve_eig(p);
    std::vector<int> sectors;
    if (auto n = p.integer("nexc")) {
        if (*n < 0 || *n > geometry.sites()) throw UsageError("--nexc must lie in [0, N]");
        sectors.push_back(static_cast<int>(*n));
    } else {
        for (int n = 0; n <= geometry.sites(); ++n) sectors.push_back(n);
    }
    ResultTable t({{"n_exc", ColumnType::integer},
                   {"level", ColumnType::integer},
                   {"energy", ColumnType::real, true},
                   {"degeneracy", ColumnType::integer},
                   {"residual", ColumnType::real, true}});
    for (int n : sectors) {
        const SectorBasis basis(geometry, n);
        const SparseOperator h = build_spin_hamiltonian(geometry, c, basis, shift);
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(levels), basis.size());
        const SpectrumResult r = ground_state(h, k, eig);
        for (std::size_t i = 0; i < r.size(); ++i) {
            t.add_row({integer_cell(n), integer_cell(static_cast<long long>(i)), r.values[i],
                       integer_cell(r.degeneracy[i]), r.residuals[i]});
        }
    }
    return {std::move(t), std::abs(c.omega_at)};
}

inline Cell ratio_cell(const CorrelationResult& r) {
    return r.defined ? Cell(r.ratio) : text("undefined");
}

inline CommandOutput cmd_jc_ed(Params& p) {
    const ArrayGeometry geometry = resolve_geometry(p);
    const EffectiveJCParams jc = resolve_jc(p);
    JCGroundOptions opt;
    opt.eig = resolve_eig(p);
    if (auto n = p.integer("ntot")) {
        if (*n < 0) throw UsageError("--ntot must be >= 0");
        opt.sector = static_cast<int>(*n);
    }
    opt.n_max = static_cast<int>(p.integer_or("nmax", 4));
    opt.n_max_cap = static_cast<int>(p.integer_or("nmax-cap", 64));
    opt.max_sector = static_cast<int>(p.integer_or("max-sector", 4 * geometry.sites()));
    if (opt.n_max < 1 || opt.n_max_cap < opt.n_max) throw UsageError("need 1 <= --nmax <= --nmax-cap");
    const JCGroundResult r = jc_ground_state(geometry, jc, opt);
    const auto& o = r.observables;
    double pa = 0.0, pb = 0.0;
    for (int m = 0; m < geometry.ly(); ++m) pa += o.n_photons[static_cast<std::size_t>(m)];
    for (int m = 0; m < geometry.lx(); ++m) pb += o.n_photons[static_cast<std::size_t>(geometry.ly() + m)];
    ResultTable t({{"n_tot_sector", ColumnType::integer},
                   {"n_max_used", ColumnType::integer},
                   {"converged", ColumnType::flag},
                   {"energy", ColumnType::real, true},
                   {"degeneracy", ColumnType::integer},
                   {"n_exc_spin", ColumnType::real},
                   {"n_tot", ColumnType::real},
                   {"photons_a_mean", ColumnType::real},
                   {"photons_b_mean", ColumnType::real},
                   {"delta_omega", ColumnType::real, true},
                   {"sigma_nn", ColumnType::real},
                   {"sigma_nnn", ColumnType::real},
                   {"ratio", ColumnType::real}});
    t.add_row({integer_cell(r.n_tot_sector), integer_cell(r.n_max_used), r.converged, r.spectrum.values.front(),
               integer_cell(r.spectrum.degeneracy.front()), o.n_exc_spin, o.n_tot, pa / geometry.ly(),
               pb / geometry.lx(), o.delta_omega_available ? Cell(o.delta_omega_expectation) : text("n/a"),
               o.correlations.sigma_nn, o.correlations.sigma_nnn, ratio_cell(o.correlations)});
    return {std::move(t), std::abs(jc.omega_at)};
}

/// g at which the spin model leaves the empty sector, lambda_c from sector ED
/// converted through lambda = -g^2 / (2 (Delta - omega_at)).
inline double spin_lambda_c(const ArrayGeometry& geometry, double omega_at, const EigenOptions& eig) {
    TransitionOptions t;
    t.lambda_lo = -std::abs(omega_at);
    t.lambda_hi = 0.0;
    t.max_n_from = 0;
    t.eig = eig;
    const auto tr = transition_couplings(geometry, omega_at, t);
    if (tr.empty()) throw std::runtime_error("no 0 -> 1 spin transition in [-|omega_at|, 0]");
    return tr.front().lambda_c;
}

inline CommandOutput cmd_crossover(Params& p) {
    const ArrayGeometry geometry = resolve_geometry(p);
    const double omega = p.require_real("omega");
    const auto grid = p.grid("delta-grid");
    const bool skip_jc = p.flag("skip-jc");
    CriticalGOptions copt;
    copt.max_sector = static_cast<int>(p.integer_or("max-sector", geometry.sites()));
    copt.eig = resolve_eig(p);
    if (!(omega > 0.0)) throw UsageError("crossover needs omega_at > 0");
    for (double x : grid) {
        if (!(x > 1.0)) throw UsageError("--delta-grid values are Delta / omega_at and must exceed 1");
    }
    const double lambda_c = spin_lambda_c(geometry, omega, copt.eig);
    ResultTable t({{"delta_over_omega", ColumnType::real},
                   {"g_c_jc", ColumnType::real, true},
                   {"g_c_spin", ColumnType::real, true},
                   {"g_c_mf", ColumnType::real, true},
                   {"rel_diff_spin", ColumnType::real}});
    for (double x : grid) {
        const double Delta = x * omega;
        const double g_spin = std::sqrt(-2.0 * lambda_c * (Delta - omega));
        const double g_mf = mf_critical_g(geometry, Delta, omega);
        Cell g_jc = text("skipped");
        Cell rel = text("skipped");
        if (!skip_jc) {
            if (auto g = superradiant_critical_g(geometry, Delta, omega, copt)) {
                g_jc = *g;
                rel = std::abs(*g - g_spin) / *g;
            } else {
                g_jc = text("not-found");
                rel = text("not-found");
            }
        }
        t.add_row({x, g_jc, g_spin, g_mf, rel});
    }
    return {std::move(t), omega};
}

inline CommandOutput cmd_excitation_curve(Params& p) {
    const ArrayGeometry geometry = resolve_geometry(p);
    const double omega = p.require_real("omega");
    const auto lambdas = p.grid("lambda-grid");
    ExcitationOptions opt;
    opt.eta = p.real_or("eta", 1.0);
    opt.include_lambda_shift = !p.flag("no-shift");
    opt.max_n_exc = static_cast<int>(p.integer_or("max-nexc", -1));
    opt.eig = resolve_eig(p);
    const auto curve = excitation_curve(geometry, omega, lambdas, opt);
    ResultTable t({{"lambda", ColumnType::real, true},
                   {"n_exc", ColumnType::integer},
                   {"energy", ColumnType::real, true},
                   {"degenerate", ColumnType::flag},
                   {"n_exc_mf", ColumnType::real}});
    for (const auto& pt : curve) {
        Cell mf = text("n/a");
        if (geometry.square() && opt.eta == 1.0 && pt.lambda < 0.0) {
            mf = mf_excitations_inf(pt.lambda, geometry.lx(), omega);
        }
        t.add_row({pt.lambda, integer_cell(pt.n_exc), pt.energy, pt.degenerate, mf});
    }
    return {std::move(t), std::abs(omega)};
}

inline CommandOutput cmd_correlations(Params& p) {
    const ArrayGeometry geometry = resolve_geometry(p);
    const Level level = parameter_level(p);
    std::optional<EffectiveJCParams> jc;
    SpinCouplings c;
    if (level == Level::jc || level == Level::drive) {
        jc = resolve_jc(p);
        c = derive_spin_couplings(*jc);
    } else {
        c = resolve_spin(p);
    }
    const EigenOptions eig = resolve_eig(p);
    std::vector<double> def;
    for (int n = 1; n < geometry.sites(); ++n) def.push_back(n);
    const auto sectors = p.grid_or("nexc-list", def);
    ResultTable t({{"n_exc", ColumnType::integer},
                   {"sigma_nn", ColumnType::real},
                   {"sigma_nnn", ColumnType::real},
                   {"ratio", ColumnType::real},
                   {"degeneracy", ColumnType::integer},
                   {"jc_sigma_nn", ColumnType::real},
                   {"jc_sigma_nnn", ColumnType::real},
                   {"jc_ratio", ColumnType::real}});
    for (double x : sectors) {
        if (x != std::floor(x) || x < 0 || x > geometry.sites()) throw UsageError("--nexc-list entries must be integers in [0, N]");
        const int n = static_cast<int>(x);
        const SectorGround sg = sector_ground(geometry, c, n, true, eig);
        const CorrelationResult r = correlation_ratio(sg.basis, sg.spectrum.vectors);
        std::vector<Cell> row{integer_cell(n), r.sigma_nn, r.sigma_nnn, ratio_cell(r),
                              integer_cell(sg.spectrum.degeneracy.front())};
        if (jc) {
            JCGroundOptions opt;
            opt.sector = n;
            opt.n_max = std::max(1, n);
            opt.adaptive = false;
            opt.eig = eig;
            const JCGroundResult jr = jc_ground_state(geometry, *jc, opt);
            row.push_back(jr.observables.correlations.sigma_nn);
            row.push_back(jr.observables.correlations.sigma_nnn);
            row.push_back(ratio_cell(jr.observables.correlations));
        } else {
            row.push_back(text("n/a"));
            row.push_back(text("n/a"));
            row.push_back(text("n/a"));
        }
        t.add_row(std::move(row));
    }
    return {std::move(t), 0.0};
}

inline CommandOutput cmd_analytic_1d(Params& p) {
    const std::string mode = p.text_or("mode", "sweep");
    if (mode == "table") {
        ResultTable t({{"omega_sign", ColumnType::integer},
                       {"lambda_sign", ColumnType::integer},
                       {"detuning_sign", ColumnType::integer},
                       {"delta_sign", ColumnType::integer},
                       {"outcome", ColumnType::text}});
        for (const auto& r : table_1d()) {
            t.add_row({integer_cell(r.omega_sign), integer_cell(r.lambda_sign), integer_cell(r.detuning_sign),
                       integer_cell(r.delta_sign), text(to_string(r.outcome))});
        }
        return {std::move(t), 0.0};
    }
    const long n = p.require_integer("n-spins");
    if (n < 1 || n > 100000) throw UsageError("--n-spins must lie in [1, 100000]");
    const double omega = p.require_real("omega");
    const double Delta = p.require_real("delta");
    const int N = static_cast<int>(n);
    if (mode == "critical") {
        ResultTable t({{"n_spins", ColumnType::integer},
                       {"g_c_photon", ColumnType::real, true},
                       {"lambda_c_first_spin", ColumnType::real, true},
                       {"g_c_first_spin", ColumnType::real, true}});
        Cell gph = text("n/a");
        if (Delta * (Delta - omega) >= 0.0) gph = critical_g_photon(N, Delta, omega);
        Cell lc = text("n/a"), gs = text("n/a");
        try {
            const SpinCrossing s = critical_g_spin(N, Delta, omega, -0.5 * N);
            lc = s.lambda_c;
            gs = s.g_c;
        } catch (const std::domain_error&) {
        }
        t.add_row({integer_cell(N), gph, lc, gs});
        return {std::move(t), std::abs(omega)};
    }
    if (mode != "sweep") throw UsageError("--mode must be sweep, table or critical");
    const auto lambdas = p.grid("lambda-grid");
    ResultTable t({{"lambda", ColumnType::real, true},
                   {"m", ColumnType::real},
                   {"n_exc", ColumnType::integer},
                   {"energy", ColumnType::real, true},
                   {"photons", ColumnType::text},
                   {"phase", ColumnType::text}});
    for (double lambda : lambdas) {
        const GroundState1D gs = ground_state_1d(N, Delta, omega, lambda);
        Cell phase = text("n/a");
        if (omega != 0.0 && lambda != 0.0 && Delta != 0.0 && Delta != omega) {
            phase = text(to_string(classify_1d(omega, lambda, Delta).outcome));
        }
        t.add_row({lambda, gs.m, integer_cell(gs.n_exc), gs.energy, text(to_string(gs.photons)), phase});
    }
    return {std::move(t), std::abs(omega)};
}

inline CommandOutput cmd_meanfield(Params& p) {
    const ArrayGeometry geometry = resolve_geometry(p, 100'000'000);
    const double omega = p.require_real("omega");
    const double Delta = p.require_real("delta");
    const double gc = mf_critical_g(geometry, Delta, omega);
    const auto gs = p.grid_or("g-grid", {gc});
    ResultTable t({{"g", ColumnType::real, true},
                   {"g_c", ColumnType::real, true},
                   {"alpha_sq", ColumnType::real},
                   {"gamma", ColumnType::real},
                   {"sz", ColumnType::real},
                   {"n_exc", ColumnType::real},
                   {"energy", ColumnType::real, true}});
    for (double g : gs) {
        if (!(g > 0.0)) throw UsageError("--g-grid values must be > 0");
        const MeanFieldSolution s = mf_solve(g, geometry, Delta, omega);
        t.add_row({s.g, s.g_c, s.alpha_sq, s.gamma, s.sz, s.n_exc, s.energy});
    }
    return {std::move(t), std::abs(omega)};
}

inline CommandOutput cmd_polya(Params& p) {
    const ArrayGeometry geometry = resolve_geometry(p);
    const std::string tr = p.text_or("transpose", "auto");
    TransposeMode mode = TransposeMode::automatic;
    if (tr == "never") {
        mode = TransposeMode::never;
    } else if (tr == "always") {
        mode = TransposeMode::always;
    } else if (tr != "auto") {
        throw UsageError("--transpose must be auto, never or always");
    }
    if (geometry.sites() > kMaxMaterializedSites) throw UsageError("polya materializes the group only up to 16 sites");
    const PermutationGroup group = build_group(geometry, mode);
    const auto series = cycle_index(group).two_color_series();
    std::vector<int> sectors;
    if (auto n = p.integer("nexc")) {
        if (*n < 0 || *n > geometry.sites()) throw UsageError("--nexc must lie in [0, N]");
        sectors.push_back(static_cast<int>(*n));
    } else {
        for (int n = 0; n <= geometry.sites(); ++n) sectors.push_back(n);
    }
    ResultTable t({{"n_exc", ColumnType::integer},
                   {"group_order", ColumnType::integer},
                   {"polya_count", ColumnType::integer},
                   {"class_count", ColumnType::integer},
                   {"class_index", ColumnType::integer},
                   {"size", ColumnType::integer},
                   {"stabilizer_order", ColumnType::integer},
                   {"representative", ColumnType::integer}});
    for (int n : sectors) {
        const auto classes = orbits(group, geometry, n);
        const auto count = series[static_cast<std::size_t>(n)];
        for (std::size_t i = 0; i < classes.size(); ++i) {
            t.add_row({integer_cell(n), integer_cell(static_cast<long long>(group.order())),
                       integer_cell(count.numerator() / count.denominator()),
                       integer_cell(static_cast<long long>(classes.size())), integer_cell(static_cast<long long>(i)),
                       integer_cell(static_cast<long long>(classes[i].size)),
                       integer_cell(static_cast<long long>(classes[i].stabilizer_order)),
                       integer_cell(static_cast<long long>(classes[i].representative))});
        }
    }
    return {std::move(t), 0.0};
}

inline CommandOutput cmd_frustration_scan(Params& p) {
    RegionGrid grid;
    grid.lx = static_cast<int>(p.integer_or("lx", 10));
    if (grid.lx < 1) throw UsageError("--lx must be >= 1");
    grid.omega_at = p.real_or("omega", 1.0);
    grid.delta_a_over_omega = p.grid_or("delta-a-over-omega", {0.4, 0.6});
    grid.eta = p.grid("eta-grid");
    grid.ly_over_lx = p.grid("ly-over-lx");
    grid.q_min = p.real_or("q-min", 10.0);
    ResultTable t({{"eta", ColumnType::real},
                   {"ly_over_lx", ColumnType::real},
                   {"delta_a_over_omega", ColumnType::real},
                   {"R", ColumnType::real},
                   {"Q", ColumnType::real},
                   {"valid", ColumnType::flag}});
    for (const auto& row : region_scan(grid)) {
        if (!row.error.empty()) {
            t.add_row({row.eta, row.ly_over_lx, row.delta_a_over_omega, text("error"), text("error"), false});
            continue;
        }
        const Cell r = row.result.R_unbounded ? text("unbounded") : Cell(row.result.R);
        t.add_row({row.eta, row.ly_over_lx, row.delta_a_over_omega, r, row.result.Q, row.result.valid});
    }
    return {std::move(t), 0.0};
}

// ---------------------------------------------------------------------------

struct RunConfig {
    std::string command;
    json params = json::object();
    std::string output;  // empty: standard output, no sidecar
    std::string format = "csv";
    bool raw_units = false;
};

struct RunResult {
    int exit_code = 0;
    ResultTable table;
    json resolved = json::object();
    std::string error_json;
};

inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Hash over the command, the units and every parameter value actually used.
inline std::string config_hash(const std::string& command, const json& resolved, bool raw_units) {
    const json canonical{{"command", command}, {"params", resolved}, {"units", raw_units ? "raw" : "omega_at"}};
    return fnv1a_hex(canonical.dump());
}

inline std::string error_json(const char* kind, const std::string& message, int code) {
    return json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump();
}

/// Computes the table for a config; performs no I/O.
inline RunResult execute(const RunConfig& cfg) {
    RunResult out;
    const auto start = std::chrono::steady_clock::now();
    try {
        const CommandSpec& spec = command_spec(cfg.command);
        if (cfg.format != "csv" && cfg.format != "json") throw UsageError("--format must be csv or json");
        Params p(cfg.params, spec);
        static const std::map<std::string, std::function<CommandOutput(Params&)>> handlers{
            {"derive-params", cmd_derive_params}, {"spin-ed", cmd_spin_ed},
            {"jc-ed", cmd_jc_ed},                 {"crossover", cmd_crossover},
            {"excitation-curve", cmd_excitation_curve},
            {"correlations", cmd_correlations},   {"analytic-1d", cmd_analytic_1d},
            {"meanfield", cmd_meanfield},         {"polya", cmd_polya},
            {"frustration-scan", cmd_frustration_scan}};
        CommandOutput res = handlers.at(cfg.command)(p);
        if (!cfg.raw_units && res.energy_unit != 0.0) {
            res.table.rescale_energies(res.energy_unit);
        } else if (!cfg.raw_units && res.energy_unit == 0.0) {
            bool has_energy = false;
            for (const auto& c : res.table.columns()) has_energy = has_energy || c.energy;
            if (has_energy && !res.table.rows().empty()) {
                throw UsageError("omega_at = 0 cannot serve as the energy unit; use --units raw");
            }
        }
        out.table = std::move(res.table);
        out.resolved = p.resolved();
        auto& meta = out.table.metadata();
        meta.version = kVersion;
        meta.command = cfg.command;
        meta.config_hash = config_hash(cfg.command, out.resolved, cfg.raw_units);
        meta.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        (void)io::to_csv(out.table);  // surfaces unserializable cells as compute errors
    } catch (const UsageError& e) {
        out.exit_code = 2;
        out.error_json = error_json("usage", e.what(), 2);
    } catch (const std::invalid_argument& e) {
        out.exit_code = 2;
        out.error_json = error_json("usage", e.what(), 2);
    } catch (const std::exception& e) {
        out.exit_code = 1;
        out.error_json = error_json("compute", e.what(), 1);
    }
    return out;
}

inline json sidecar_json(const RunConfig& cfg, const RunResult& r) {
    json cols = json::array();
    for (const auto& c : r.table.columns()) cols.push_back(c.name);
    json j = io::metadata_json(r.table.metadata());
    j["config"] = r.resolved;
    j["units"] = cfg.raw_units ? "raw" : "omega_at";
    j["format"] = cfg.format;
    j["columns"] = cols;
    j["rows"] = r.table.size();
    return j;
}

/// Writes the table (and, for file output, the JSON sidecar). Returns the exit code.
inline int emit(const RunConfig& cfg, const RunResult& r, std::ostream& out, std::ostream& err) {
    if (r.exit_code != 0) {
        err << r.error_json << '\n';
        return r.exit_code;
    }
    try {
        const std::string body =
            cfg.format == "json" ? io::to_json(r.table).dump(2) + "\n" : io::to_csv(r.table);
        if (cfg.output.empty()) {
            out << body;
        } else {
            io::write_file(cfg.output, body);
            io::write_file(cfg.output + ".json", sidecar_json(cfg, r).dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        err << error_json("io", e.what(), 1) << '\n';
        return 1;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// argv -> RunConfig

inline json option_value(const OptionSpec& o, const std::string& raw) {
    switch (o.kind) {
        case OptKind::real:
        case OptKind::integer: {
            double v = 0.0;
            const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
            if (raw.empty() || res.ec != std::errc{} || res.ptr != raw.data() + raw.size() || !std::isfinite(v)) {
                throw UsageError(std::string("--") + o.name + ": '" + raw + "' is not a finite number");
            }
            if (o.kind == OptKind::integer) {
                if (v != std::floor(v)) throw UsageError(std::string("--") + o.name + " must be an integer");
                return static_cast<long>(v);
            }
            return v;
        }
        case OptKind::grid:
        case OptKind::text:
            return raw;
        case OptKind::flag:
            return true;
    }
    return raw;
}

/// Parses argv into a config. Returns nullopt after printing help.
inline std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
    CLI::App app{"Cavity-array ground states: JC lattice, effective spin model and their analyses", "cqed"};
    app.set_version_flag("--version", std::string(kVersion));
    std::string config_path, output, format, units;
    app.add_option("--config", config_path, "JSON file with \"command\" and option values");
    app.add_option("--out", output, "output file; a JSON sidecar goes to <out>.json");
    app.add_option("--format", format, "csv (default) or json");
    app.add_option("--units", units, "omega (default: energies in units of |omega_at|) or raw");
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, std::map<std::string, bool>> flags;
    for (const auto& cmd : command_catalog()) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->fallthrough();
        for (const auto& name : cmd.options) {
            const OptionSpec& o = option_spec(name);
            if (o.kind == OptKind::flag) {
                sub->add_flag("--" + name, flags[cmd.name][name], o.help);
            } else {
                sub->add_option("--" + name, values[cmd.name][name], o.help)->allow_extra_args(false);
            }
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw UsageError("cannot read config file '" + config_path + "'");
        json j;
        try {
            f >> j;
        } catch (const json::exception& e) {
            throw UsageError(std::string("config file: ") + e.what());
        }
        if (!j.is_object()) throw UsageError("config file must hold a JSON object");
        for (auto& [key, v] : j.items()) {
            if (key == "command") {
                cfg.command = v.get<std::string>();
            } else if (key == "out") {
                cfg.output = v.get<std::string>();
            } else if (key == "format") {
                cfg.format = v.get<std::string>();
            } else if (key == "units") {
                cfg.raw_units = v.get<std::string>() == "raw";
            } else {
                cfg.params[key] = v;
            }
        }
    }
    for (const auto* sub : app.get_subcommands()) {
        if (!cfg.command.empty() && cfg.command != sub->get_name()) {
            throw UsageError("command '" + sub->get_name() + "' conflicts with config command '" + cfg.command + "'");
        }
        cfg.command = sub->get_name();
        for (const auto& name : command_spec(cfg.command).options) {
            const OptionSpec& o = option_spec(name);
            if (sub->count("--" + name) == 0) continue;
            cfg.params[name] = o.kind == OptKind::flag ? json(true) : option_value(o, values[cfg.command][name]);
        }
    }
    if (cfg.command.empty()) throw UsageError("no command given; run with --help for the list");
    if (!output.empty()) cfg.output = output;
    if (!format.empty()) cfg.format = format;
    if (!units.empty()) {
        if (units != "raw" && units != "omega") throw UsageError("--units must be omega or raw");
        cfg.raw_units = units == "raw";
    }
    return cfg;
}

/// Full command-line entry point.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::optional<RunConfig> cfg;
    try {
        cfg = parse_args(argc, argv, out);
    } catch (const UsageError& e) {
        err << error_json("usage", e.what(), 2) << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << error_json("usage", e.what(), 2) << '\n';
        return 2;
    }
    if (!cfg) return 0;
    return emit(*cfg, execute(*cfg), out, err);
}

}  // namespace cqed::cli
