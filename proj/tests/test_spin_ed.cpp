#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <random>

#include "cqed/spin_ed.hpp"
#include "oracles.hpp"

using namespace cqed;
using Catch::Approx;

namespace {

// Rows/cols of the full 2^N oracle belonging to one sector, in basis order.
std::vector<Eigen::Index> sector_indices(const SectorBasis& basis) {
    std::vector<Eigen::Index> idx;
    for (Config c : basis.states()) idx.push_back(static_cast<Eigen::Index>(c));
    return idx;
}

}  // namespace

TEST_CASE("sector basis enumeration and ranking") {
    CHECK(SectorBasis(ArrayGeometry(2, 2), 0).size() == 1);
    CHECK(SectorBasis(ArrayGeometry(2, 2), 2).size() == 6);
    CHECK(SectorBasis(ArrayGeometry(3, 3), 4).size() == 126);

    const SectorBasis b(ArrayGeometry(4, 3), 5);
    CHECK(b.size() == binomial(12, 5));
    for (std::size_t k = 0; k < b.size(); ++k) {
        const Config c = b.unrank(k);
        CHECK(std::popcount(c) == 5);
        CHECK(b.rank(c) == k);
        if (k > 0) CHECK(b.unrank(k - 1) < c);
    }
    CHECK_FALSE(b.contains(Config{0b111}));
}

TEST_CASE("sector Hamiltonian equals the tensor-product construction") {
    for (auto [lx, ly] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{2, 3}, std::pair{3, 3}}) {
        const ArrayGeometry g(lx, ly);
        const auto c = SpinCouplings::make(1.0, -0.13, 0.07);
        for (bool shift : {true, false}) {
            const Eigen::MatrixXd full =
                oracle::spin_hamiltonian(lx, ly, zeeman_coefficient(c, shift), c.lambda_a, c.lambda_b);
            for (int n = 0; n <= g.sites(); ++n) {
                const SectorBasis basis(g, n);
                const Eigen::MatrixXd mine = build_spin_hamiltonian(g, c, basis, shift).to_dense();
                const Eigen::MatrixXd ref = oracle::block(full, sector_indices(basis));
                CHECK((mine - ref).cwiseAbs().maxCoeff() < 1e-14);
            }
        }
    }
}

TEST_CASE("hop rules on the plaquette") {
    const ArrayGeometry g(2, 2);
    const double lambda = -0.3;
    const auto c = SpinCouplings::make(1.0, lambda, lambda);
    const SectorBasis basis(g, 2);
    const auto h = build_spin_interaction(g, c, basis);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        h.for_each_in_row(i, [&](std::size_t, double v) { CHECK(v == Approx(2.0 * lambda)); });
    }
    // Sites 0,1 excited (top row): the excitations can move down their columns.
    const std::size_t top = basis.rank(0b0011);
    CHECK(h.entry(basis.rank(0b0110), top) == Approx(2.0 * lambda));
    CHECK(h.entry(basis.rank(0b1001), top) == Approx(2.0 * lambda));
    CHECK(h.entry(basis.rank(0b1100), top) == 0.0);

    const auto zero = build_spin_interaction(g, SpinCouplings::make(1.0, 0.0, 0.0), basis);
    CHECK(zero.to_dense().norm() == 0.0);
}

TEST_CASE("one-excitation block is a Kronecker sum of all-ones-minus-identity matrices") {
    const ArrayGeometry g(4, 3);
    const double la = 0.11, lb = -0.07;
    const SectorBasis basis(g, 1);
    const Eigen::MatrixXd h = build_spin_interaction(g, SpinCouplings::make(1.0, la, lb), basis).to_dense();
    auto offdiag_ones = [](int l) { return Eigen::MatrixXd(Eigen::MatrixXd::Ones(l, l) - Eigen::MatrixXd::Identity(l, l)); };
    // site = col + Lx*row, so the column index is the fast one.
    const Eigen::MatrixXd ref = 2.0 * la * Eigen::kroneckerProduct(oracle::identity(3), offdiag_ones(4)).eval() +
                                2.0 * lb * Eigen::kroneckerProduct(offdiag_ones(3), oracle::identity(4)).eval();
    CHECK((h - ref).norm() < 1e-14);
}

TEST_CASE("diagonal terms") {
    const ArrayGeometry g(3, 2);
    const auto c = SpinCouplings::make(1.0, -0.1, -0.05);
    const auto h0 = build_spin_hamiltonian(g, c, SectorBasis(g, 0), false);
    CHECK(h0.diagonal()[0] == Approx(-3.0));
    const auto h1 = build_spin_hamiltonian(g, c, SectorBasis(g, 1), true);
    for (double d : h1.diagonal()) CHECK(d == Approx(0.5 * c.omega_at_prime * (-6 + 2)));
    for (int n = 0; n <= 6; ++n) {
        const SectorBasis b(g, n);
        const auto on = build_spin_hamiltonian(g, c, b, true);
        const auto off = build_spin_hamiltonian(g, c, b, false);
        CHECK(on.diagonal()[0] - off.diagonal()[0] == Approx((c.lambda_a + c.lambda_b) * (2.0 * n - 6)));
    }
}

TEST_CASE("plaquette two-excitation ground state") {
    const ArrayGeometry g(2, 2);
    const double lambda = -0.2;
    const auto sg = sector_ground(g, SpinCouplings::make(1.0, lambda, lambda), 2, true);
    REQUIRE(sg.spectrum.size() == 1);
    // 2n - N = 0: the Zeeman term drops out of this sector.
    CHECK(sg.spectrum.values[0] == Approx(4.0 * std::sqrt(2.0) * lambda).epsilon(1e-13));

    // Adjacent pairs carry 1/(2 sqrt 2), diagonal pairs 1/2.
    Eigen::VectorXd ref(6);
    for (std::size_t k = 0; k < 6; ++k) {
        const Config c = sg.basis.unrank(k);
        const bool diagonal = c == 0b1001 || c == 0b0110;
        ref[static_cast<Eigen::Index>(k)] = diagonal ? 0.5 : 1.0 / (2.0 * std::sqrt(2.0));
    }
    CHECK(std::abs(ref.dot(sg.spectrum.vectors.col(0))) > 1.0 - 1e-12);

    const auto r = correlation_ratio(sg.basis, sg.spectrum.vectors);
    CHECK(r.sigma_nnn == Approx(0.25).epsilon(1e-12));
    CHECK(r.sigma_nn == Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
    CHECK(r.ratio == Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("particle-hole mirror of the sector spectra") {
    // Interaction spectra of sectors n and N - n coincide (spin flip maps
    // sigma+ sigma- pairs onto each other).
    const ArrayGeometry g(3, 3);
    const auto c = SpinCouplings::make(1.0, -0.1, -0.1);
    for (int n = 0; n <= 4; ++n) {
        const SectorBasis lo(g, n);
        const auto a = ground_state(build_spin_interaction(g, c, lo), std::min<std::size_t>(3, lo.size()));
        const auto b = ground_state(build_spin_interaction(g, c, SectorBasis(g, 9 - n)), a.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.values[i] == Approx(b.values[i]).margin(1e-12));
    }
}

TEST_CASE("0 -> 1 transition coupling on square arrays") {
    for (int L : {2, 3, 4}) {
        const ArrayGeometry g(L, L);
        TransitionOptions opt;
        opt.max_n_from = 0;
        const auto with = transition_couplings(g, 1.0, opt);
        REQUIRE_FALSE(with.empty());
        CHECK(with.front().n_from == 0);
        CHECK(with.front().n_to == 1);
        CHECK(std::abs(with.front().lambda_c + 1.0 / (4.0 * L)) < 1e-10);

        opt.include_lambda_shift = false;
        const auto without = transition_couplings(g, 1.0, opt);
        REQUIRE_FALSE(without.empty());
        CHECK(std::abs(without.front().lambda_c + 1.0 / (4.0 * (L - 1))) < 1e-10);
    }
}

TEST_CASE("transition search range above every crossing is empty") {
    TransitionOptions opt;
    opt.lambda_lo = -0.01;
    opt.lambda_hi = 0.0;
    CHECK(transition_couplings(ArrayGeometry(3, 3), 1.0, opt).empty());
}

TEST_CASE("sector-energy ray matches direct sector diagonalization") {
    const ArrayGeometry g(3, 2);
    const SectorEnergyRay ray(g, 1.0, 0.5, true);
    for (double lambda : {-0.3, -0.05, 0.0, 0.04, 0.2}) {
        const auto c = SpinCouplings::make(1.0, lambda, 0.5 * lambda);
        for (int n = 0; n <= g.sites(); ++n) {
            const SectorBasis b(g, n);
            const double direct = ground_state(build_spin_hamiltonian(g, c, b, true)).values.front();
            CHECK(ray.energy(n, lambda) == Approx(direct).margin(1e-12));
        }
    }
}

TEST_CASE("ground-state excitation number along a sweep") {
    const ArrayGeometry g(3, 3);
    ExcitationOptions opt;
    const double lc = -1.0 / 12.0;
    const auto curve = excitation_curve(g, 1.0, {0.5 * lc, 1.02 * lc, -2.0}, opt);
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].n_exc == 0);
    CHECK(curve[1].n_exc == 1);

    // Oracle: lowest eigenvalue of the full 2^9 space and its excitation number.
    const auto c = SpinCouplings::make(1.0, -2.0, -2.0);
    const Eigen::MatrixXd full = oracle::spin_hamiltonian(3, 3, zeeman_coefficient(c, true), -2.0, -2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full);
    CHECK(curve[2].energy == Approx(es.eigenvalues()[0]).margin(1e-10));
    const Eigen::VectorXd v = es.eigenvectors().col(0);
    double n_exc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) n_exc += v[i] * v[i] * std::popcount(static_cast<unsigned>(i));
    CHECK(n_exc == Approx(curve[2].n_exc).margin(1e-8));
}

TEST_CASE("correlations agree with the tensor-product oracle on 3x3") {
    const ArrayGeometry g(3, 3);
    const auto c = SpinCouplings::make(1.0, -0.05, -0.05);
    const Eigen::MatrixXd full = oracle::spin_hamiltonian(3, 3, zeeman_coefficient(c, true), c.lambda_a, c.lambda_b);
    for (int n = 1; n <= 8; ++n) {
        const auto sg = sector_ground(g, c, n, true);
        REQUIRE(sg.spectrum.size() == 1);
        const auto idx = sector_indices(sg.basis);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::block(full, idx));
        Eigen::VectorXd psi = Eigen::VectorXd::Zero(512);
        for (std::size_t k = 0; k < idx.size(); ++k) psi[idx[k]] = es.eigenvectors()(static_cast<Eigen::Index>(k), 0);
        const auto [nn, nnn] = oracle::nn_nnn_correlations(3, 3, psi);
        const auto r = correlation_ratio(sg.basis, sg.spectrum.vectors);
        CHECK(std::abs(r.sigma_nn - nn) < 1e-12);
        CHECK(std::abs(r.sigma_nnn - nnn) < 1e-12);
        CHECK(std::abs(r.ratio - nnn / nn) < 1e-10);
    }
}

TEST_CASE("one-excitation ground state is uniform") {
    const ArrayGeometry g(3, 3);
    const auto sg = sector_ground(g, SpinCouplings::make(1.0, -0.1, -0.1), 1, true);
    for (Eigen::Index i = 0; i < 9; ++i) CHECK(sg.spectrum.vectors(i, 0) == Approx(1.0 / 3.0).epsilon(1e-12));
    const auto r = correlation_ratio(sg.basis, sg.spectrum.vectors);
    CHECK(r.sigma_nn == Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(r.sigma_nnn == Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(r.ratio == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("golden correlation ratio, 3x3 with four excitations") {
    // The sector ground vector does not depend on lambda < 0 (lambda_a = lambda_b).
    for (double lambda : {-0.01, -0.3}) {
        const auto sg = sector_ground(ArrayGeometry(3, 3), SpinCouplings::make(1.0, lambda, lambda), 4, true);
        CHECK(correlation_ratio(sg.basis, sg.spectrum.vectors).ratio == Approx(0.869337600197920).epsilon(1e-12));
    }
}

TEST_CASE("site magnetization of the uniform one-excitation state") {
    const ArrayGeometry g(2, 3);
    const auto sg = sector_ground(g, SpinCouplings::make(1.0, -0.1, -0.1), 1, true);
    double total = 0.0;
    for (double s : site_sz(sg.basis, sg.spectrum.vectors)) {
        CHECK(s == Approx(-1.0 + 2.0 / 6.0));
        total += s;
    }
    CHECK(total == Approx(-6.0 + 2.0));
}

TEST_CASE("Lanczos path reproduces the dense sector energies") {
    const ArrayGeometry g(4, 4);
    const auto c = SpinCouplings::make(1.0, -0.07, -0.04);
    const SectorBasis basis(g, 4);  // 1820 states
    const auto h = build_spin_hamiltonian(g, c, basis, true);
    EigenOptions it;
    it.path = EigenPath::iterative;
    EigenOptions de;
    de.path = EigenPath::dense;
    const auto a = ground_state(h, 3, it);
    const auto b = ground_state(h, 3, de);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.values[i] == Approx(b.values[i]).margin(1e-10));
}
