// sparse_operator.hpp - real symmetric sparse matrices in CSR form with a
// separately stored diagonal.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "cqed/parallel.hpp"

namespace cqed {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

class SparseOperator {
public:
    SparseOperator() = default;

    explicit SparseOperator(std::size_t dim, bool symmetric = true)
        : dim_(dim), symmetric_(symmetric), diag_(dim, 0.0), row_ptr_(dim + 1, 0) {}

    /// Off-diagonal triplets with equal (row, col) are summed; diagonal
    /// triplets go to the diagonal.
    static SparseOperator from_triplets(std::size_t dim, std::vector<Triplet> entries,
                                        bool symmetric = true) {
        SparseOperator op(dim, symmetric);
        std::vector<Triplet> off;
        off.reserve(entries.size());
        for (const auto& t : entries) {
            if (t.row >= dim || t.col >= dim) {
                throw std::out_of_range("SparseOperator: triplet index out of range");
            }
            if (t.row == t.col) {
                op.diag_[t.row] += t.value;
            } else {
                off.push_back(t);
            }
        }
        std::sort(off.begin(), off.end(), [](const Triplet& a, const Triplet& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });
        for (std::size_t k = 0; k < off.size();) {
            std::size_t j = k;
            double v = 0.0;
            while (j < off.size() && off[j].row == off[k].row && off[j].col == off[k].col) {
                v += off[j].value;
                ++j;
            }
            if (v != 0.0) {
                op.cols_.push_back(off[k].col);
                op.vals_.push_back(v);
                ++op.row_ptr_[off[k].row + 1];
            }
            k = j;
        }
        for (std::size_t r = 0; r < dim; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
        return op;
    }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] bool symmetric_flag() const noexcept { return symmetric_; }
    [[nodiscard]] std::size_t off_diagonal_nonzeros() const noexcept { return vals_.size(); }
    [[nodiscard]] const std::vector<double>& diagonal() const noexcept { return diag_; }

    void add_to_diagonal(double shift) {
        for (auto& d : diag_) d += shift;
    }
    void add_to_diagonal(std::span<const double> shifts) {
        if (shifts.size() != dim_) throw std::invalid_argument("add_to_diagonal: size mismatch");
        for (std::size_t i = 0; i < dim_; ++i) diag_[i] += shifts[i];
    }

    [[nodiscard]] double entry(std::size_t i, std::size_t j) const {
        if (i >= dim_ || j >= dim_) throw std::out_of_range("SparseOperator::entry");
        if (i == j) return diag_[i];
        const auto b = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
        const auto e = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
        const auto it = std::lower_bound(b, e, j);
        if (it == e || *it != j) return 0.0;
        return vals_[static_cast<std::size_t>(it - cols_.begin())];
    }

    /// Visits the off-diagonal entries of row i as fn(col, value).
    template <typename Fn>
    void for_each_in_row(std::size_t i, Fn&& fn) const {
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) fn(cols_[k], vals_[k]);
    }

    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
        if (static_cast<std::size_t>(x.size()) != dim_) {
            throw std::invalid_argument("SparseOperator::apply: dimension mismatch");
        }
        y.resize(static_cast<Eigen::Index>(dim_));
        parallel_chunks(dim_, [&](std::size_t b, std::size_t e, std::size_t) {
            for (std::size_t i = b; i < e; ++i) {
                double acc = diag_[i] * x[static_cast<Eigen::Index>(i)];
                for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                    acc += vals_[k] * x[static_cast<Eigen::Index>(cols_[k])];
                }
                y[static_cast<Eigen::Index>(i)] = acc;
            }
        });
    }

    [[nodiscard]] Eigen::VectorXd operator*(const Eigen::VectorXd& x) const {
        Eigen::VectorXd y;
        apply(x, y);
        return y;
    }

    [[nodiscard]] Eigen::MatrixXd to_dense() const {
        const auto n = static_cast<Eigen::Index>(dim_);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < dim_; ++i) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag_[i];
            for_each_in_row(i, [&](std::size_t j, double v) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            });
        }
        return m;
    }

    /// Exact structural symmetry check: entry(i,j) == entry(j,i) bit for bit.
    [[nodiscard]] bool is_symmetric() const {
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                if (entry(cols_[k], i) != vals_[k]) return false;
            }
        }
        return true;
    }

    /// Principal submatrix on the given (sorted, unique) indices.
    [[nodiscard]] SparseOperator restrict_to(std::span<const std::size_t> indices) const {
        std::vector<std::size_t> pos(dim_, dim_);
        for (std::size_t k = 0; k < indices.size(); ++k) {
            if (indices[k] >= dim_) throw std::out_of_range("restrict_to: index out of range");
            pos[indices[k]] = k;
        }
        std::vector<Triplet> t;
        for (std::size_t k = 0; k < indices.size(); ++k) {
            const std::size_t i = indices[k];
            t.push_back({k, k, diag_[i]});
            for_each_in_row(i, [&](std::size_t j, double v) {
                if (pos[j] != dim_) t.push_back({k, pos[j], v});
            });
        }
        return from_triplets(indices.size(), std::move(t), symmetric_);
    }

    [[nodiscard]] SparseOperator scaled(double factor) const {
        SparseOperator out = *this;
        for (auto& d : out.diag_) d *= factor;
        for (auto& v : out.vals_) v *= factor;
        return out;
    }

private:
    std::size_t dim_ = 0;
    bool symmetric_ = true;
    std::vector<double> diag_;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> cols_;
    std::vector<double> vals_;
};

}  // namespace cqed
