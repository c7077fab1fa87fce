#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <random>

#include "cqed/linalg/eigensolver.hpp"
#include "cqed/linalg/sparse_operator.hpp"

using namespace cqed;

namespace {

// Random symmetric banded matrix with a few long-range couplings.
SparseOperator random_symmetric(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
        t.push_back({i, i, 4.0 * u(rng)});
        for (std::size_t d = 1; d <= 3 && i + d < n; ++d) {
            const double v = u(rng);
            t.push_back({i, i + d, v});
            t.push_back({i + d, i, v});
        }
        const std::size_t j = pick(rng);
        if (j != i) {
            const double v = 0.3 * u(rng);
            t.push_back({i, j, v});
            t.push_back({j, i, v});
        }
    }
    return SparseOperator::from_triplets(n, std::move(t));
}

std::vector<double> dense_oracle(const SparseOperator& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.to_dense(), Eigen::EigenvaluesOnly);
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

}  // namespace

TEST_CASE("triplet assembly sums duplicates and splits the diagonal") {
    const auto op = SparseOperator::from_triplets(3, {{0, 1, 1.0}, {0, 1, 0.5}, {1, 0, 1.5}, {2, 2, 3.0}, {1, 1, -1.0}});
    CHECK(op.entry(0, 1) == 1.5);
    CHECK(op.entry(1, 0) == 1.5);
    CHECK(op.entry(2, 2) == 3.0);
    CHECK(op.entry(1, 1) == -1.0);
    CHECK(op.entry(0, 2) == 0.0);
    CHECK(op.is_symmetric());
    CHECK_THROWS_AS(SparseOperator::from_triplets(2, {{0, 2, 1.0}}), std::out_of_range);

    Eigen::VectorXd x(3);
    x << 1.0, 2.0, 3.0;
    const Eigen::VectorXd y = op * x;
    const Eigen::VectorXd ref = op.to_dense() * x;
    CHECK((y - ref).norm() < 1e-14);
}

TEST_CASE("restriction and scaling") {
    const auto op = random_symmetric(12, 3);
    const std::vector<std::size_t> keep{1, 4, 5, 9};
    const auto sub = op.restrict_to(keep);
    const Eigen::MatrixXd full = op.to_dense();
    for (std::size_t i = 0; i < keep.size(); ++i) {
        for (std::size_t j = 0; j < keep.size(); ++j) {
            CHECK(sub.entry(i, j) == full(static_cast<Eigen::Index>(keep[i]), static_cast<Eigen::Index>(keep[j])));
        }
    }
    CHECK((op.scaled(-2.0).to_dense() + 2.0 * full).norm() == 0.0);
}

TEST_CASE("dense path matches an independent dense solve") {
    const auto op = random_symmetric(60, 11);
    const auto ref = dense_oracle(op);
    const auto r = ground_state(op, 5);
    CHECK(r.path == "dense");
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(r.values[i] - ref[i]) < 1e-12);
}

TEST_CASE("Lanczos agrees with the dense oracle") {
    for (unsigned seed : {1u, 2u, 3u}) {
        const auto op = random_symmetric(700, seed);
        const auto ref = dense_oracle(op);
        EigenOptions opt;
        opt.path = EigenPath::iterative;
        const auto r = ground_state(op, 4, opt);
        REQUIRE(r.converged);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(std::abs(r.values[i] - ref[i]) < 1e-9);
            CHECK(r.residuals[i] <= 1e-10 * std::max(1.0, std::abs(r.values[i])));
        }
        const Eigen::MatrixXd overlap = r.vectors.transpose() * r.vectors;
        CHECK((overlap - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-9);
    }
}

TEST_CASE("Lanczos resolves an exactly degenerate ground space") {
    // Two identical decoupled blocks: every level is doubly degenerate.
    const auto block = random_symmetric(400, 7);
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < 400; ++i) {
        t.push_back({i, i, block.diagonal()[i]});
        t.push_back({i + 400, i + 400, block.diagonal()[i]});
        block.for_each_in_row(i, [&](std::size_t j, double v) {
            t.push_back({i, j, v});
            t.push_back({i + 400, j + 400, v});
        });
    }
    const auto op = SparseOperator::from_triplets(800, std::move(t));
    EigenOptions opt;
    opt.path = EigenPath::iterative;
    const auto r = ground_subspace(op, opt);
    CHECK(r.size() == 2);
    CHECK(r.degeneracy.front() == 2);
    CHECK(std::abs(r.values[0] - r.values[1]) < 1e-9);
}

TEST_CASE("results are reproducible for a fixed seed") {
    const auto op = random_symmetric(600, 5);
    EigenOptions opt;
    opt.path = EigenPath::iterative;
    const auto a = ground_state(op, 2, opt);
    const auto b = ground_state(op, 2, opt);
    CHECK(a.values == b.values);
    CHECK(a.vectors == b.vectors);
}

TEST_CASE("invalid requests") {
    const auto op = random_symmetric(5, 1);
    CHECK_THROWS_AS(ground_state(op, 0), std::invalid_argument);
    CHECK_THROWS_AS(ground_state(op, 6), std::invalid_argument);
}
