#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

namespace rocofscreen {

using Complex = std::complex<double>;
using ComplexSparse = Eigen::SparseMatrix<Complex, Eigen::ColMajor, int>;
using RealSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

namespace linalg {

/// Number of sparse triangular solves performed on the calling thread since
/// it started. Every solve through SparseLu increments it; callers take
/// differences around the region they want to measure.
std::uint64_t solve_count() noexcept;

/// LU factorization with fill-reducing column ordering, reusable for any
/// number of right-hand sides. Solves are const and may run concurrently on
/// one shared instance.
template <typename Scalar>
class SparseLu {
  public:
    using Matrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, int>;

    SparseLu();
    ~SparseLu();
    SparseLu(SparseLu&&) noexcept;
    SparseLu& operator=(SparseLu&&) noexcept;

    /// Computes ordering and symbolic structure; call again if the pattern
    /// changes.
    void analyze(const Matrix& matrix);
    /// Numeric factorization. Throws NumericalError on a zero pivot; the
    /// message names the offending column.
    void factorize(const Matrix& matrix);
    void compute(const Matrix& matrix) {
        analyze(matrix);
        factorize(matrix);
    }

    /// Original column index of the last zero pivot, if factorize failed.
    std::optional<int> singular_column() const { return singular_column_; }

    std::vector<Scalar> solve(std::span<const Scalar> rhs) const;
    std::size_t size() const { return size_; }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::size_t size_ = 0;
    std::optional<int> singular_column_;
};

using ComplexLu = SparseLu<Complex>;
using RealLu = SparseLu<double>;

extern template class SparseLu<double>;
extern template class SparseLu<Complex>;

}  // namespace linalg
}  // namespace rocofscreen
