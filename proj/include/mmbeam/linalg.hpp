// SPDX-License-Identifier: Apache-2.0

#ifndef MMBEAM_LINALG_HPP
#define MMBEAM_LINALG_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mmbeam {

using cd = std::complex<double>;

// Small dense complex matrix, row-major. Sizes in this project are tiny
// (at most the antenna count on one side), so everything is plain loops
// over contiguous storage; no attempt at blocking or BLAS dispatch.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cd> entries);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cd &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cd &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const cd> entries() const { return data_; }
    std::span<const cd> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    ComplexMatrix hermitian() const; // conjugate transpose
    std::vector<cd> column(std::size_t j) const;

    double frobenius_norm() const;
    double max_abs() const;

    ComplexMatrix operator+(const ComplexMatrix &other) const;
    ComplexMatrix operator-(const ComplexMatrix &other) const;
    ComplexMatrix operator*(cd scalar) const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cd> data_;
};

struct SvdFactors {
    ComplexMatrix u;                     // left singular vectors, one column per singular value
    std::vector<double> singular_values; // descending, nonnegative
    ComplexMatrix v;                     // right singular vectors
};

struct HermitianEig {
    std::vector<double> eigenvalues; // descending, signed
    ComplexMatrix vectors;           // unitary, column k pairs with eigenvalues[k]
};

// a.cols() must equal b.rows().
ComplexMatrix matmul(const ComplexMatrix &a, const ComplexMatrix &b);

// y = a * x
std::vector<cd> matvec(const ComplexMatrix &a, std::span<const cd> x);

// conj(a) . b
cd vdot(std::span<const cd> a, std::span<const cd> b);

double vnorm(std::span<const cd> a);

// a^H * m * b, the scalar a couple of modules need constantly
cd quadratic_form(std::span<const cd> a, const ComplexMatrix &m, std::span<const cd> b);

ComplexMatrix outer_product(std::span<const cd> a, std::span<const cd> b); // a * b^H

ComplexMatrix from_columns(const std::vector<std::vector<cd>> &cols);

// One-sided Jacobi SVD for matrices up to 64x64. Deterministic phase
// convention: the largest-magnitude entry of each right singular vector is
// made real and nonnegative. Thin factors: u is rows x min(rows, cols).
SvdFactors svd(const ComplexMatrix &a);

// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
HermitianEig hermitian_eig(const ComplexMatrix &a);

// B with B * a * B^H = I for Hermitian positive definite a; B is Hermitian.
ComplexMatrix hermitian_inv_sqrt(const ComplexMatrix &a);

// Natural log of det(a) for Hermitian positive definite a, via Cholesky.
double logdet_hermitian(const ComplexMatrix &a);

} // namespace mmbeam

#endif
