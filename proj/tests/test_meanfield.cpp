#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cqed/meanfield.hpp"
#include "oracles.hpp"

using namespace cqed;
using Catch::Approx;

namespace {

// Minimizes the variational energy directly, in extended precision and
// without the closed-form stationary point.
long double golden_minimum(const ArrayGeometry& g, long double Delta, long double omega, long double coupling,
                           long double hi) {
    auto f = [&](long double x) {
        const long double half = omega / 2;
        return Delta * g.modes() * x - g.sites() * std::sqrt(half * half + 4 * coupling * coupling * x);
    };
    return oracle::golden_minimize(f, 0.0L, hi);
}

}  // namespace

TEST_CASE("variational energy") {
    const ArrayGeometry g(3, 2);
    CHECK(mf_gs_energy(0.0, g, 2.0, 1.0, 0.7) == Approx(-3.0));
    CHECK_THROWS_AS(mf_gs_energy(-0.1, g, 2.0, 1.0, 0.7), std::invalid_argument);
}

TEST_CASE("closed-form minimizer against golden-section search") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> side(1, 12);
    for (int draw = 0; draw < 100; ++draw) {
        const ArrayGeometry g(side(rng), side(rng));
        const double omega = 0.2 + 2.0 * u(rng);
        const double Delta = omega * (1.0 + 60.0 * u(rng));
        const double gc = mf_critical_g(g, Delta, omega);
        const double coupling = gc * (0.2 + 3.0 * u(rng));
        const double x = mf_alpha_sq(coupling, g, Delta, omega);
        const long double lead = static_cast<long double>(g.sites()) * coupling / (Delta * g.modes());
        const long double hi = 4 * lead * lead + 1;
        const auto ref = static_cast<double>(golden_minimum(g, Delta, omega, coupling, hi));
        CHECK(std::abs(x - ref) <= 1e-8 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("energy is convex in alpha^2") {
    const ArrayGeometry g(4, 3);
    for (double coupling : {0.1, 1.0, 3.0}) {
        for (double x = 0.0; x < 5.0; x += 0.25) {
            const double h = 1e-3;
            const double second = mf_gs_energy(x + 2 * h, g, 5.0, 1.0, coupling) - 2 * mf_gs_energy(x + h, g, 5.0, 1.0, coupling) +
                                  mf_gs_energy(x, g, 5.0, 1.0, coupling);
            CHECK(second >= -1e-12);
        }
    }
}

TEST_CASE("critical coupling") {
    CHECK(mf_critical_g(ArrayGeometry(18, 18), 30.0, 1.0) == Approx(std::sqrt(30.0 / 36.0)).epsilon(1e-14));
    CHECK(mf_critical_g(ArrayGeometry(18, 18), 30.0, 1.0) == Approx(0.91287).epsilon(1e-5));
    for (int L : {2, 5, 9}) {
        CHECK(mf_critical_g(ArrayGeometry(L, L), 7.0, 0.5) == Approx(std::sqrt(7.0 * 0.5 / (2.0 * L))).epsilon(1e-14));
    }
    CHECK_THROWS_AS(mf_critical_g(ArrayGeometry(2, 2), -3.0, 1.0), std::domain_error);
}

TEST_CASE("order parameter vanishes continuously at g_c") {
    const ArrayGeometry g(18, 18);
    const double Delta = 30.0, omega = 1.0;
    const double gc = mf_critical_g(g, Delta, omega);

    // Both terms of the stationarity condition coincide at g_c.
    const double lead = g.sites() * gc / (Delta * g.modes());
    CHECK(lead == Approx(omega / (4.0 * gc)).epsilon(1e-14));
    CHECK(mf_alpha_sq(gc, g, Delta, omega) == Approx(0.0).margin(1e-15));
    CHECK(mf_excitations(gc, g, Delta, omega) == 0.0);
    CHECK(mf_alpha_sq(0.5 * gc, g, Delta, omega) == 0.0);

    for (double eps : {1e-2, 1e-4, 1e-6}) {
        CHECK(mf_alpha_sq(gc * (1 + eps), g, Delta, omega) < 10 * eps);
        CHECK(mf_excitations(gc * (1 + eps), g, Delta, omega) < 2 * g.sites() * eps);
    }
    // g = 2 g_c: alpha^2 = 0.3 - 3/160 exactly.
    CHECK(mf_alpha_sq(2.0 * gc, g, Delta, omega) == Approx(0.28125).epsilon(1e-13));

    const double big = 1e6;
    const double limit = g.sites() / (Delta * g.modes());
    CHECK(mf_alpha_sq(big, g, Delta, omega) / (big * big) == Approx(limit * limit).epsilon(1e-10));
    CHECK(mf_excitations(big, g, Delta, omega) == Approx(0.5 * g.sites()).epsilon(1e-10));
}

TEST_CASE("spin-state excitation count equals the closed form") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int draw = 0; draw < 50; ++draw) {
        const ArrayGeometry g(2 + draw % 7, 1 + draw % 5);
        const double omega = 0.5 + u(rng);
        const double Delta = omega * (2.0 + 40.0 * u(rng));
        const double coupling = mf_critical_g(g, Delta, omega) * (1.0 + 3.0 * u(rng));
        const auto s = mf_solve(coupling, g, Delta, omega);
        CHECK(s.gamma <= 0.0);
        const double from_state = 0.5 * g.sites() * (1.0 + s.sz);
        CHECK(std::abs(from_state - s.n_exc) <= 1e-12 * std::max(1.0, s.n_exc));
    }
    CHECK(mf_gamma(0.7, 0.0, 1.0) == 0.0);
    CHECK(mf_state_zexp(0.0) == -1.0);
    CHECK(mf_state_zexp(-1e9) == Approx(1.0));
}

TEST_CASE("large-detuning lambda form") {
    CHECK(mf_lambda_c_inf(20, 1.0) == Approx(-0.0125));
    CHECK(mf_excitations_inf(-0.0125, 20, 1.0) == Approx(0.0).margin(1e-14));
    CHECK(mf_excitations_inf(-0.025, 20, 1.0) == Approx(100.0));

    // Substituting g^2 = -2 lambda (Delta - omega) into the g form recovers it as Delta grows.
    const int L = 6;
    const double lambda = -0.07;
    double previous = 1.0;
    for (double Delta : {1e2, 1e4, 1e6}) {
        const double coupling = std::sqrt(-2.0 * lambda * (Delta - 1.0));
        const double diff = std::abs(mf_excitations(coupling, ArrayGeometry(L, L), Delta, 1.0) -
                                     mf_excitations_inf(lambda, L, 1.0));
        CHECK(diff < previous);
        previous = diff;
    }
    CHECK(previous < 1e-4);
}
