#pragma once

// MatrixHandle: a real matrix stored either dense (row-major semantics via
// Eigen) or as coordinate triplets. Triplets are the interchange form for
// sparse data; they are validated on construction (indices in range, no
// duplicate coordinates).

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace orlx {

struct Triplet {
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    double value = 0.0;
};

class MatrixHandle {
public:
    MatrixHandle() : dense_(Eigen::MatrixXd::Zero(0, 0)), is_dense_(true) {}

    static MatrixHandle dense(Eigen::MatrixXd m) {
        MatrixHandle h;
        h.is_dense_ = true;
        h.dense_ = std::move(m);
        h.rows_ = h.dense_.rows();
        h.cols_ = h.dense_.cols();
        h.nnz_ = 0;
        for (Eigen::Index j = 0; j < h.cols_; ++j)
            for (Eigen::Index i = 0; i < h.rows_; ++i)
                if (h.dense_(i, j) != 0.0) ++h.nnz_;
        return h;
    }

    static MatrixHandle sparse(Eigen::Index rows, Eigen::Index cols, std::vector<Triplet> entries) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("MatrixHandle::sparse: negative dims");
        for (const auto& t : entries)
            if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
                throw std::invalid_argument("MatrixHandle::sparse: index out of range (" +
                                            std::to_string(t.row) + "," + std::to_string(t.col) + ")");
        auto sorted = entries;
        std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        for (std::size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i].row == sorted[i - 1].row && sorted[i].col == sorted[i - 1].col)
                throw std::invalid_argument("MatrixHandle::sparse: duplicate entry (" +
                                            std::to_string(sorted[i].row) + "," +
                                            std::to_string(sorted[i].col) + ")");
        MatrixHandle h;
        h.is_dense_ = false;
        h.rows_ = rows;
        h.cols_ = cols;
        h.triplets_ = std::move(entries);
        h.nnz_ = static_cast<Eigen::Index>(h.triplets_.size());
        return h;
    }

    static MatrixHandle identity(Eigen::Index n, double scale = 1.0) {
        return dense(scale * Eigen::MatrixXd::Identity(n, n));
    }

    bool is_dense() const { return is_dense_; }
    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    Eigen::Index nnz() const { return nnz_; }

    const Eigen::MatrixXd& dense_data() const {
        if (!is_dense_) throw std::logic_error("MatrixHandle: not dense");
        return dense_;
    }
    const std::vector<Triplet>& triplets() const {
        if (is_dense_) throw std::logic_error("MatrixHandle: not sparse");
        return triplets_;
    }

    Eigen::MatrixXd to_dense() const {
        if (is_dense_) return dense_;
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows_, cols_);
        for (const auto& t : triplets_) m(t.row, t.col) = t.value;
        return m;
    }

    /// Y = (*this) * X without densifying; vectors in, vectors out.
    template <class Derived>
    Eigen::Matrix<double, Eigen::Dynamic, Derived::ColsAtCompileTime> multiply(
        const Eigen::MatrixBase<Derived>& X) const {
        using Out = Eigen::Matrix<double, Eigen::Dynamic, Derived::ColsAtCompileTime>;
        if (X.rows() != cols_) throw std::invalid_argument("MatrixHandle::multiply: size mismatch");
        if (is_dense_) return dense_ * X;
        Out Y = Out::Zero(rows_, X.cols());
        for (const auto& t : triplets_) Y.row(t.row) += t.value * X.row(t.col);
        return Y;
    }

private:
    Eigen::MatrixXd dense_;
    std::vector<Triplet> triplets_;
    Eigen::Index rows_ = 0, cols_ = 0, nnz_ = 0;
    bool is_dense_ = true;
};

}  // namespace orlx
