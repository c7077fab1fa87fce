#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <random>

#include "cqed/analytic_1d.hpp"
#include "cqed/jc_ed.hpp"
#include "cqed/spin_ed.hpp"
#include "oracles.hpp"

using namespace cqed;
using Catch::Approx;

namespace {

// Index of a JC basis state in the oracle product space (spins first, then modes).
Eigen::Index product_index(const JCBasis& b, std::size_t k) {
    Eigen::Index idx = 0;
    Eigen::Index stride = Eigen::Index{1} << b.geometry().sites();
    idx += static_cast<Eigen::Index>(b.spins(k));
    for (int m = 0; m < b.modes(); ++m) {
        idx += stride * b.photons(k, m);
        stride *= b.n_max() + 1;
    }
    return idx;
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& full, const JCBasis& b) {
    const auto n = static_cast<Eigen::Index>(b.size());
    std::vector<Eigen::Index> idx;
    for (std::size_t k = 0; k < b.size(); ++k) idx.push_back(product_index(b, k));
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = full(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    return out;
}

}  // namespace

TEST_CASE("JC basis sizes and lookup") {
    const ArrayGeometry g(2, 2);
    const JCBasis full(g, 2);
    CHECK(full.size() == 16u * 81u);
    const JCBasis sector(g, 3, 3);
    std::size_t expect = 0;
    // Count by brute force over all spin patterns and photon tuples with n_m <= 3.
    for (int spins = 0; spins < 16; ++spins) {
        for (int code = 0; code < 256; ++code) {
            int tot = std::popcount(static_cast<unsigned>(spins));
            for (int m = 0, c = code; m < 4; ++m, c /= 4) tot += c % 4;
            if (tot == 3) ++expect;
        }
    }
    CHECK(sector.size() == expect);
    for (std::size_t k = 0; k < sector.size(); ++k) {
        CHECK(sector.total_excitations(k) == 3);
        CHECK(sector.find(sector.spins(k), sector.occupations(k)) == static_cast<long>(k));
    }
    CHECK(sector.find(0, {4, 0, 0, 0}) == -1);
    CHECK_THROWS_AS(JCBasis(ArrayGeometry(7, 7), 64), std::length_error);
}

TEST_CASE("JC Hamiltonian equals the tensor-product construction") {
    SECTION("1 x 2 array, distinct detunings") {
        const ArrayGeometry g(2, 1);
        EffectiveJCParams p;
        p.omega_at = 0.9;
        p.g = 0.23;
        p.Delta_a = {1.7};
        p.Delta_b = {1.1, 2.3};
        const int cutoff = 3;
        const JCBasis b(g, cutoff);
        const Eigen::MatrixXd full = oracle::jc_hamiltonian(2, 1, cutoff, p.omega_at, p.g, p.Delta_a, p.Delta_b);
        CHECK((build_jc_hamiltonian(g, p, b).to_dense() - gather(full, b)).cwiseAbs().maxCoeff() < 1e-13);
    }
    SECTION("2 x 2 plaquette") {
        const ArrayGeometry g(2, 2);
        const auto p = EffectiveJCParams::uniform(1.0, 0.31, 1.4, 0.8);
        const int cutoff = 2;
        const JCBasis b(g, cutoff);
        const Eigen::MatrixXd full = oracle::jc_hamiltonian(2, 2, cutoff, 1.0, 0.31, {1.4, 1.4}, {0.8, 0.8});
        CHECK((build_jc_hamiltonian(g, p, b).to_dense() - gather(full, b)).cwiseAbs().maxCoeff() < 1e-13);

        // Exact sectors: N_tot <= cutoff is untouched by truncation.
        const Eigen::MatrixXd ntot = oracle::jc_excitations(2, 2, cutoff);
        for (int n = 0; n <= cutoff; ++n) {
            std::vector<Eigen::Index> idx;
            for (Eigen::Index i = 0; i < ntot.rows(); ++i) {
                if (std::lround(ntot(i, i)) == n) idx.push_back(i);
            }
            Eigen::MatrixXd block(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
            for (std::size_t i = 0; i < idx.size(); ++i) {
                for (std::size_t j = 0; j < idx.size(); ++j) block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = full(idx[i], idx[j]);
            }
            const double ref = oracle::sorted_eigenvalues(block).front();
            CHECK(jc_sector_energy(g, p, n) == Approx(ref).margin(1e-12));
        }
    }
}

TEST_CASE("total excitation number is conserved") {
    const ArrayGeometry g(2, 2);
    const JCBasis b(g, 2);
    const auto h = build_jc_hamiltonian(g, EffectiveJCParams::uniform(1.0, 0.4, 1.2, 0.7), b);
    const auto nd = total_excitation_diagonal(b);
    std::mt19937_64 rng(42);
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(b.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
        Eigen::VectorXd nv = v;
        for (Eigen::Index i = 0; i < v.size(); ++i) nv[i] *= nd[static_cast<std::size_t>(i)];
        Eigen::VectorXd hv = h * v;
        Eigen::VectorXd lhs = h * nv;
        for (Eigen::Index i = 0; i < v.size(); ++i) hv[i] *= nd[static_cast<std::size_t>(i)];
        worst = std::max(worst, (lhs - hv).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("single site and single mode: JC doublets") {
    const ArrayGeometry g(1, 1);
    const double omega = 1.0, Delta = 1.3, coupling = 0.2;
    const auto p = EffectiveJCParams::uniform(omega, coupling, Delta, Delta);
    for (int n = 1; n <= 5; ++n) {
        const JCBasis b(g, n, n, ModeLayout::rows_only);
        const auto r = ground_state(build_jc_hamiltonian(g, p, b), 2);
        const double centre = Delta * (n - 0.5);
        const double split = std::sqrt(0.25 * (omega - Delta) * (omega - Delta) + coupling * coupling * n);
        CHECK(r.values[0] == Approx(centre - split).epsilon(1e-13));
        CHECK(r.values[1] == Approx(centre + split).epsilon(1e-13));
    }
    CHECK(jc_sector_energy(g, p, 0, ModeLayout::rows_only) == Approx(-0.5 * omega));
}

TEST_CASE("zero coupling ground state") {
    const ArrayGeometry g(2, 3);
    const auto r = jc_ground_state(g, EffectiveJCParams::uniform(1.0, 0.0, 2.0, 2.0));
    CHECK(r.n_tot_sector == 0);
    CHECK(r.spectrum.values.front() == Approx(-3.0));
    CHECK(r.observables.n_tot == 0.0);
    CHECK_FALSE(r.observables.correlations.defined);
}

TEST_CASE("deep dispersive point follows the spin model") {
    const ArrayGeometry g(2, 2);
    const double omega = 1.0, Delta = 40.0, coupling = 0.3;
    const auto r = jc_ground_state(g, EffectiveJCParams::uniform(omega, coupling, Delta, Delta));
    CHECK(r.converged);
    CHECK(r.n_tot_sector == 0);
    double photons = 0.0;
    for (double x : r.observables.n_photons) photons += x;
    CHECK(photons < 1e-3);
    CHECK(r.observables.n_exc_spin == Approx(0.0).margin(1e-12));
}

TEST_CASE("delta-omega expectation shrinks with the detuning") {
    const ArrayGeometry g(2, 2);
    double previous = std::numeric_limits<double>::infinity();
    for (double Delta : {5.0, 20.0, 80.0, 320.0}) {
        const auto r = jc_ground_state(g, EffectiveJCParams::uniform(1.0, 0.3, Delta, Delta));
        REQUIRE(r.observables.delta_omega_available);
        const double v = std::abs(r.observables.delta_omega_expectation);
        CHECK(v < previous);
        previous = v;
    }
    CHECK(previous < 1e-3);
}

TEST_CASE("ground sector follows the coupling across the superradiant point") {
    const ArrayGeometry g(2, 2);
    const double omega = 1.0, Delta = 20.0;
    const auto gc = superradiant_critical_g(g, Delta, omega);
    REQUIRE(gc.has_value());
    CHECK(*gc > 0.0);
    const auto below = jc_ground_state(g, EffectiveJCParams::uniform(omega, 0.98 * *gc, Delta, Delta));
    const auto above = jc_ground_state(g, EffectiveJCParams::uniform(omega, 1.02 * *gc, Delta, Delta));
    CHECK(below.n_tot_sector == 0);
    CHECK(above.n_tot_sector >= 1);
    CHECK(above.observables.n_exc_spin > 0.5);
    CHECK_THROWS_AS(superradiant_critical_g(g, 0.5, omega), std::invalid_argument);
}

TEST_CASE("JC correlation ratio") {
    const ArrayGeometry g(3, 3);
    JCGroundOptions opt;
    opt.sector = 1;
    opt.n_max = 1;
    const auto one = jc_ground_state(g, EffectiveJCParams::uniform(1.0, 0.2, 40.0, 40.0), opt);
    REQUIRE(one.observables.correlations.defined);
    CHECK(one.observables.correlations.ratio == Approx(1.0).epsilon(1e-10));

    // Away from the dispersive limit the sector-2 ratio still tracks the spin model.
    opt.sector = 2;
    opt.n_max = 2;
    const double Delta = 40.0, coupling = 0.5;
    const auto two = jc_ground_state(g, EffectiveJCParams::uniform(1.0, coupling, Delta, Delta), opt);
    const double lambda = spin_coupling(coupling, Delta, 1.0);
    const auto sg = sector_ground(g, SpinCouplings::make(1.0, lambda, lambda), 2, true);
    const auto spin = correlation_ratio(sg.basis, sg.spectrum.vectors);
    CHECK(std::abs(two.observables.correlations.ratio - spin.ratio) < 0.05);
}

TEST_CASE("photon-dressed one-mode model") {
    const int n = 3;
    const int cutoff = 4;
    const double Delta = 2.0, omega = 1.0, lambda = -0.15;
    const JCBasis b = dressed_spin_1d_basis(n, cutoff);
    const Eigen::MatrixXd mine = build_dressed_spin_1d(b, Delta, omega, lambda).to_dense();

    // Oracle from collective operators on the product space.
    std::vector<int> dims(n, 2);
    dims.push_back(cutoff + 1);
    const Eigen::MatrixXd a = oracle::annihilate(cutoff);
    const Eigen::MatrixXd num = oracle::embed(dims, {{n, Eigen::MatrixXd(a.transpose() * a)}});
    Eigen::MatrixXd jz = Eigen::MatrixXd::Zero(num.rows(), num.cols());
    Eigen::MatrixXd jp = jz;
    for (int s = 0; s < n; ++s) {
        jz += 0.5 * oracle::embed(dims, {{s, oracle::sigma_z()}});
        jp += oracle::embed(dims, {{s, oracle::sigma_plus()}});
    }
    const Eigen::MatrixXd full = Delta * num + omega * jz + 4.0 * lambda * num * jz + 2.0 * lambda * jp * jp.transpose();
    Eigen::MatrixXd ref(mine.rows(), mine.cols());
    for (std::size_t i = 0; i < b.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            ref(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = full(product_index(b, i), product_index(b, j));
        }
    }
    CHECK((mine - ref).cwiseAbs().maxCoeff() < 1e-13);

    // Block spectra against the closed form.
    for (int k = 0; k <= n; ++k) {
        for (int photons = 0; photons <= cutoff; ++photons) {
            std::vector<std::size_t> idx;
            for (std::size_t s = 0; s < b.size(); ++s) {
                if (std::popcount(b.spins(s)) == k && b.photons(s, 0) == photons) idx.push_back(s);
            }
            const auto block = build_dressed_spin_1d(b, Delta, omega, lambda).restrict_to(idx);
            const auto got = oracle::sorted_eigenvalues(block.to_dense());
            const auto want = block_spectrum_1d(n, k, photons, Delta, omega, lambda);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == Approx(want[i]).margin(1e-12));
        }
    }
}
