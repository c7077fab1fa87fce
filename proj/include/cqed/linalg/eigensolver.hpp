// eigensolver.hpp - lowest eigenpairs of real symmetric operators.
//
// Small problems go through a dense self-adjoint solve. Larger ones use
// restarted Lanczos with full reorthogonalization against both the Krylov
// basis and every locked eigenvector; eigenpairs are locked one per cycle so
// degenerate eigenvalues are recovered copy by copy from fresh random starts.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cqed/linalg/sparse_operator.hpp"

namespace cqed {

enum class EigenPath { automatic, dense, iterative };

struct EigenOptions {
    EigenPath path = EigenPath::automatic;
    std::size_t dense_threshold = 4096;
    double tolerance = 1e-11;       // residual target relative to max(1, |E|)
    double degeneracy_tol = 1e-8;   // clustering of eigenvalues, relative to max(1, |E|)
    std::size_t krylov_dim = 160;
    int max_cycles = 2000;
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct SpectrumResult {
    std::vector<double> values;       // nondecreasing
    Eigen::MatrixXd vectors;          // one normalized column per value
    std::vector<double> residuals;    // ||H v - E v||
    std::vector<int> degeneracy;      // size of the cluster each value belongs to
    bool converged = true;
    std::string path;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

class EigenSolverError : public std::runtime_error {
public:
    EigenSolverError(const std::string& msg, std::vector<double> residuals)
        : std::runtime_error(msg), residuals_(std::move(residuals)) {}
    [[nodiscard]] const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

namespace detail {

/// Flip so the largest-magnitude component (lowest index among near-ties) is positive.
inline void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
    const double mx = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) >= mx * (1.0 - 1e-9)) {
            if (v[i] < 0) v = -v;
            return;
        }
    }
}

inline void fill_degeneracy(SpectrumResult& r, double tol) {
    const std::size_t n = r.values.size();
    r.degeneracy.assign(n, 1);
    std::size_t b = 0;
    while (b < n) {
        std::size_t e = b + 1;
        while (e < n && std::abs(r.values[e] - r.values[b]) <=
                            tol * std::max(1.0, std::abs(r.values[b]))) {
            ++e;
        }
        for (std::size_t i = b; i < e; ++i) r.degeneracy[i] = static_cast<int>(e - b);
        b = e;
    }
}

inline void finalize(const SparseOperator& op, SpectrumResult& r, double deg_tol) {
    r.residuals.resize(r.values.size());
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        auto col = r.vectors.col(static_cast<Eigen::Index>(i));
        normalize_sign(col);
        Eigen::VectorXd v = col;
        r.residuals[i] = (op * v - r.values[i] * v).norm();
    }
    fill_degeneracy(r, deg_tol);
}

inline void orthogonalize(Eigen::VectorXd& w, const Eigen::MatrixXd& basis, Eigen::Index cols) {
    if (cols == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd c = basis.leftCols(cols).transpose() * w;
        w.noalias() -= basis.leftCols(cols) * c;
    }
}

}  // namespace detail

inline SpectrumResult dense_lowest(const SparseOperator& op, std::size_t k,
                                   const EigenOptions& opt = {}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.to_dense());
    if (es.info() != Eigen::Success) {
        throw EigenSolverError("dense eigensolver failed", {});
    }
    SpectrumResult r;
    r.path = "dense";
    const auto kk = static_cast<Eigen::Index>(k);
    r.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + kk);
    r.vectors = es.eigenvectors().leftCols(kk);
    detail::finalize(op, r, opt.degeneracy_tol);
    return r;
}

inline SpectrumResult lanczos_lowest(const SparseOperator& op, std::size_t k,
                                     const EigenOptions& opt = {}) {
    const std::size_t n = op.dim();
    const auto N = static_cast<Eigen::Index>(n);
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_vector = [&] {
        Eigen::VectorXd v(N);
        for (Eigen::Index i = 0; i < N; ++i) v[i] = gauss(rng);
        return v;
    };

    // Room for k locked vectors plus one verification slot.
    Eigen::MatrixXd locked(N, static_cast<Eigen::Index>(std::min(n, k + 1)));
    std::vector<double> locked_vals;
    Eigen::Index nlocked = 0;

    const std::size_t m_max = std::max<std::size_t>(2, std::min(n, opt.krylov_dim));
    Eigen::MatrixXd Q(N, static_cast<Eigen::Index>(m_max));
    std::vector<double> last_residuals;

    // One restarted Lanczos run for the lowest eigenpair orthogonal to the locked set.
    auto lowest_in_complement = [&](double& theta, Eigen::VectorXd& y) -> bool {
        Eigen::VectorXd v = random_vector();
        for (int cycle = 0; cycle < opt.max_cycles; ++cycle) {
            detail::orthogonalize(v, locked, nlocked);
            double nv = v.norm();
            if (nv < 1e-300) {
                v = random_vector();
                detail::orthogonalize(v, locked, nlocked);
                nv = v.norm();
            }
            v /= nv;
            std::vector<double> alpha, beta;
            Eigen::Index m = 0;
            Eigen::VectorXd w;
            for (std::size_t j = 0; j < m_max; ++j) {
                Q.col(m) = v;
                op.apply(v, w);
                const double a = v.dot(w);
                alpha.push_back(a);
                ++m;
                detail::orthogonalize(w, Q, m);
                detail::orthogonalize(w, locked, nlocked);
                const double b = w.norm();
                const double scale = std::max(1.0, std::abs(a));
                if (b <= 1e-12 * scale || static_cast<std::size_t>(nlocked + m) >= n) {
                    beta.push_back(0.0);
                    break;
                }
                beta.push_back(b);
                v = w / b;
            }
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (Eigen::Index i = 0; i < m; ++i) {
                T(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            theta = es.eigenvalues()[0];
            y = Q.leftCols(m) * es.eigenvectors().col(0);
            detail::orthogonalize(y, locked, nlocked);
            y.normalize();
            const double res = (op * y - theta * y).norm();
            last_residuals.assign(1, res);
            if (res <= opt.tolerance * std::max(1.0, std::abs(theta))) return true;
            v = y;
        }
        return false;
    };

    while (static_cast<std::size_t>(nlocked) < k) {
        double theta = 0.0;
        Eigen::VectorXd y;
        if (!lowest_in_complement(theta, y)) {
            throw EigenSolverError("Lanczos did not converge within the cycle cap", last_residuals);
        }
        locked.col(nlocked++) = y;
        locked_vals.push_back(theta);
    }

    // Verification: the lowest eigenvalue left in the complement must not lie
    // below the largest locked one; otherwise swap it in and check again.
    for (int guard = 0; static_cast<std::size_t>(nlocked) < n && guard < static_cast<int>(k) + 2;
         ++guard) {
        double theta = 0.0;
        Eigen::VectorXd y;
        if (!lowest_in_complement(theta, y)) break;
        const auto worst = std::max_element(locked_vals.begin(), locked_vals.end());
        const double tol = opt.degeneracy_tol * std::max(1.0, std::abs(*worst));
        if (theta >= *worst - tol) break;
        const auto idx = static_cast<Eigen::Index>(worst - locked_vals.begin());
        locked.col(idx) = y;
        *worst = theta;
    }

    std::vector<std::size_t> order(static_cast<std::size_t>(nlocked));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return locked_vals[a] < locked_vals[b]; });

    SpectrumResult r;
    r.path = "lanczos";
    r.vectors.resize(N, nlocked);
    for (std::size_t i = 0; i < order.size(); ++i) {
        r.values.push_back(locked_vals[order[i]]);
        r.vectors.col(static_cast<Eigen::Index>(i)) = locked.col(static_cast<Eigen::Index>(order[i]));
    }
    detail::finalize(op, r, opt.degeneracy_tol);
    return r;
}

/// Lowest k eigenpairs; dense below the crossover dimension, Lanczos above.
inline SpectrumResult ground_state(const SparseOperator& op, std::size_t k = 1,
                                   const EigenOptions& opt = {}) {
    if (k < 1 || k > op.dim()) {
        throw std::invalid_argument("ground_state: need 1 <= k <= dimension");
    }
    const bool dense = opt.path == EigenPath::dense ||
                       (opt.path == EigenPath::automatic && op.dim() <= opt.dense_threshold);
    SpectrumResult r = dense ? dense_lowest(op, k, opt) : lanczos_lowest(op, k, opt);
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r.residuals[i] > 1e-10 * std::max(1.0, std::abs(r.values[i]))) {
            r.converged = false;
        }
    }
    if (!r.converged) {
        throw EigenSolverError("eigenpairs did not reach the residual bound", r.residuals);
    }
    return r;
}

/// The full lowest eigenspace: k grows until the lowest cluster is closed.
inline SpectrumResult ground_subspace(const SparseOperator& op, const EigenOptions& opt = {}) {
    std::size_t k = std::min<std::size_t>(op.dim(), 4);
    for (;;) {
        SpectrumResult r = ground_state(op, k, opt);
        const auto d = static_cast<std::size_t>(r.degeneracy.front());
        if (d < k || k == op.dim()) {
            r.values.resize(d);
            r.residuals.resize(d);
            r.degeneracy.assign(d, static_cast<int>(d));
            r.vectors = Eigen::MatrixXd(r.vectors.leftCols(static_cast<Eigen::Index>(d)));
            return r;
        }
        k = std::min(op.dim(), 2 * k);
    }
}

}  // namespace cqed
