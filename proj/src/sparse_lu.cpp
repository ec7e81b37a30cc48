#include "rocofscreen/sparse_lu.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "rocofscreen/errors.hpp"

namespace rocofscreen::linalg {

namespace {
thread_local std::uint64_t t_solves = 0;
}

std::uint64_t solve_count() noexcept { return t_solves; }

template <typename Scalar>
struct SparseLu<Scalar>::Impl {
    Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>> lu;
    bool factorized = false;
};

template <typename Scalar>
SparseLu<Scalar>::SparseLu() : impl_(std::make_unique<Impl>()) {}

template <typename Scalar>
SparseLu<Scalar>::~SparseLu() = default;

template <typename Scalar>
SparseLu<Scalar>::SparseLu(SparseLu&&) noexcept = default;

template <typename Scalar>
SparseLu<Scalar>& SparseLu<Scalar>::operator=(SparseLu&&) noexcept = default;

template <typename Scalar>
void SparseLu<Scalar>::analyze(const Matrix& matrix) {
    if (!matrix.isCompressed()) {
        Matrix copy = matrix;
        copy.makeCompressed();
        impl_->lu.analyzePattern(copy);
    } else {
        impl_->lu.analyzePattern(matrix);
    }
    impl_->factorized = false;
    size_ = static_cast<std::size_t>(matrix.rows());
}

template <typename Scalar>
void SparseLu<Scalar>::factorize(const Matrix& matrix) {
    singular_column_.reset();
    impl_->factorized = false;
    if (matrix.isCompressed()) {
        impl_->lu.factorize(matrix);
    } else {
        Matrix copy = matrix;
        copy.makeCompressed();
        impl_->lu.factorize(copy);
    }
    if (impl_->lu.info() != Eigen::Success) {
        // Eigen reports the zero pivot as a 1-based column of the permuted
        // matrix A * Pc; map it back to the caller's column.
        std::string message = impl_->lu.lastErrorMessage();
        auto pos = message.rfind(' ');
        if (pos != std::string::npos) {
            try {
                int permuted = std::stoi(message.substr(pos + 1)) - 1;
                const auto& perm = impl_->lu.colsPermutation().indices();
                for (int c = 0; c < perm.size(); ++c) {
                    if (perm[c] == permuted) {
                        singular_column_ = c;
                        break;
                    }
                }
            } catch (const std::exception&) {
            }
        }
        std::string where = singular_column_ ? " at column " + std::to_string(*singular_column_) : std::string{};
        throw NumericalError("singular matrix" + where);
    }
    impl_->factorized = true;
}

template <typename Scalar>
std::vector<Scalar> SparseLu<Scalar>::solve(std::span<const Scalar> rhs) const {
    if (!impl_->factorized) throw NumericalError("solve called without a valid factorization");
    if (rhs.size() != size_) throw NumericalError("right-hand side size mismatch");
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Eigen::Map<const Vec> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    Vec x = impl_->lu.solve(b);
    ++t_solves;
    return std::vector<Scalar>(x.data(), x.data() + x.size());
}

template class SparseLu<double>;
template class SparseLu<Complex>;

}  // namespace rocofscreen::linalg
