// SPDX-License-Identifier: Apache-2.0

#include "mmbeam/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mmbeam/errors.hpp"

namespace mmbeam {

namespace {

constexpr std::size_t kMaxSvdDim = 64;

bool is_finite(cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require(bool cond, const std::string &msg) {
    if (!cond)
        throw ContractViolation(msg);
}

// max |a - a^H| entry, the Hermitian-ness measure used by the contracts below
double asymmetry(const ComplexMatrix &a) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
    return worst;
}

void require_hermitian(const ComplexMatrix &a, const char *who) {
    require(a.rows() == a.cols(), std::string(who) + ": matrix must be square");
    const double tol = 1e-10 * std::max(1.0, a.max_abs());
    const double asym = asymmetry(a);
    if (asym > tol)
        throw ContractViolation(std::string(who) + ": input is not Hermitian (asymmetry " +
                                std::to_string(asym) + ")");
}

} // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cd(0.0, 0.0)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cd> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    require(data_.size() == rows_ * cols_, "ComplexMatrix: entry count does not match rows*cols");
    for (const cd &z : data_)
        require(is_finite(z), "ComplexMatrix: entries must be finite");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::hermitian() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            m(j, i) = std::conj((*this)(i, j));
    return m;
}

std::vector<cd> ComplexMatrix::column(std::size_t j) const {
    std::vector<cd> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        c[i] = (*this)(i, j);
    return c;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const cd &z : data_)
        s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
    double s = 0.0;
    for (const cd &z : data_)
        s = std::max(s, std::abs(z));
    return s;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix &other) const {
    require(rows_ == other.rows_ && cols_ == other.cols_, "matrix add: dimension mismatch");
    ComplexMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i)
        m.data_[i] = data_[i] + other.data_[i];
    return m;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix &other) const {
    require(rows_ == other.rows_ && cols_ == other.cols_, "matrix subtract: dimension mismatch");
    ComplexMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i)
        m.data_[i] = data_[i] - other.data_[i];
    return m;
}

ComplexMatrix ComplexMatrix::operator*(cd scalar) const {
    ComplexMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i)
        m.data_[i] = data_[i] * scalar;
    return m;
}

ComplexMatrix matmul(const ComplexMatrix &a, const ComplexMatrix &b) {
    require(a.cols() == b.rows(), "matmul: a.cols (" + std::to_string(a.cols()) +
                                      ") != b.rows (" + std::to_string(b.rows()) + ")");
    ComplexMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cd aik = a(i, k);
            if (aik == cd(0.0, 0.0))
                continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

std::vector<cd> matvec(const ComplexMatrix &a, std::span<const cd> x) {
    require(a.cols() == x.size(), "matvec: dimension mismatch");
    std::vector<cd> y(a.rows(), cd(0.0, 0.0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cd acc(0.0, 0.0);
        const auto row = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j)
            acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

cd vdot(std::span<const cd> a, std::span<const cd> b) {
    require(a.size() == b.size(), "vdot: dimension mismatch");
    cd acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::conj(a[i]) * b[i];
    return acc;
}

double vnorm(std::span<const cd> a) {
    double s = 0.0;
    for (const cd &z : a)
        s += std::norm(z);
    return std::sqrt(s);
}

cd quadratic_form(std::span<const cd> a, const ComplexMatrix &m, std::span<const cd> b) {
    require(a.size() == m.rows() && b.size() == m.cols(), "quadratic_form: dimension mismatch");
    cd acc(0.0, 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        cd rowdot(0.0, 0.0);
        const auto row = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j)
            rowdot += row[j] * b[j];
        acc += std::conj(a[i]) * rowdot;
    }
    return acc;
}

ComplexMatrix outer_product(std::span<const cd> a, std::span<const cd> b) {
    ComplexMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            m(i, j) = a[i] * std::conj(b[j]);
    return m;
}

ComplexMatrix from_columns(const std::vector<std::vector<cd>> &cols) {
    require(!cols.empty(), "from_columns: no columns");
    const std::size_t rows = cols.front().size();
    for (const auto &c : cols)
        require(c.size() == rows, "from_columns: ragged columns");
    ComplexMatrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < rows; ++i)
            m(i, j) = cols[j][i];
    return m;
}

namespace {

// Orthogonalizes columns p and q of w by a right rotation, mirrored into v.
// Returns false when the pair was already orthogonal at working precision.
bool jacobi_orthogonalize(ComplexMatrix &w, ComplexMatrix &v, std::size_t p, std::size_t q) {
    double app = 0.0, aqq = 0.0;
    cd apq(0.0, 0.0);
    for (std::size_t k = 0; k < w.rows(); ++k) {
        app += std::norm(w(k, p));
        aqq += std::norm(w(k, q));
        apq += std::conj(w(k, p)) * w(k, q);
    }
    if (app == 0.0 || aqq == 0.0)
        return false; // dead column, nothing to orthogonalize against
    const double off = std::abs(apq);
    // threshold is a safe multiple of machine epsilon; rotations re-pollute
    // other pairs at roundoff level, so tighter thresholds never settle
    if (off <= 1e-14 * std::sqrt(app * aqq))
        return false;

    // phase-align, then a real Jacobi rotation on [[app, |apq|], [|apq|, aqq]]
    const cd phase = apq / off;
    const double tau = (aqq - app) / (2.0 * off);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const cd sp = s * std::conj(phase);
    const cd cp = c * std::conj(phase);

    for (std::size_t k = 0; k < w.rows(); ++k) {
        const cd wp = w(k, p), wq = w(k, q);
        w(k, p) = c * wp - sp * wq;
        w(k, q) = s * wp + cp * wq;
    }
    for (std::size_t k = 0; k < v.rows(); ++k) {
        const cd vp = v(k, p), vq = v(k, q);
        v(k, p) = c * vp - sp * vq;
        v(k, q) = s * vp + cp * vq;
    }
    return true;
}

// Replaces (near-)null columns of u with unit vectors orthogonal to the rest,
// so u stays unitary even for rank-deficient inputs.
void complete_column(ComplexMatrix &u, std::size_t col) {
    const std::size_t m = u.rows();
    for (std::size_t basis = 0; basis < m; ++basis) {
        std::vector<cd> cand(m, cd(0.0, 0.0));
        cand[basis] = 1.0;
        for (std::size_t j = 0; j < u.cols(); ++j) {
            if (j == col)
                continue;
            cd proj(0.0, 0.0);
            for (std::size_t k = 0; k < m; ++k)
                proj += std::conj(u(k, j)) * cand[k];
            for (std::size_t k = 0; k < m; ++k)
                cand[k] -= proj * u(k, j);
        }
        const double nrm = vnorm(cand);
        if (nrm > 0.5) {
            for (std::size_t k = 0; k < m; ++k)
                u(k, col) = cand[k] / nrm;
            return;
        }
    }
    throw NumericalFailure("svd: failed to complete an orthonormal basis", 0);
}

} // namespace

SvdFactors svd(const ComplexMatrix &a) {
    require(a.rows() >= 1 && a.cols() >= 1, "svd: empty matrix");
    require(a.rows() <= kMaxSvdDim && a.cols() <= kMaxSvdDim,
            "svd: dimensions exceed the supported 64x64 bound");

    const bool transposed = a.rows() < a.cols();
    ComplexMatrix w = transposed ? a.hermitian() : a;
    const std::size_t n = w.cols();
    ComplexMatrix v = ComplexMatrix::identity(n);

    constexpr int max_sweeps = 100;
    int sweep = 0;
    bool dirty = true;
    while (dirty) {
        if (++sweep > max_sweeps)
            throw NumericalFailure("svd: Jacobi sweeps did not converge", max_sweeps);
        dirty = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                dirty |= jacobi_orthogonalize(w, v, p, q);
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j)
        sigma[j] = vnorm(w.column(j));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    ComplexMatrix u(w.rows(), n);
    ComplexMatrix vs(n, n);
    std::vector<double> svals(n);
    const double sig_max = sigma[order.front()];
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        svals[j] = sigma[src];
        for (std::size_t k = 0; k < n; ++k)
            vs(k, j) = v(k, src);
        if (sigma[src] > sig_max * 1e-200 && sigma[src] > 0.0) {
            for (std::size_t k = 0; k < w.rows(); ++k)
                u(k, j) = w(k, src) / sigma[src];
        } else {
            svals[j] = 0.0;
            complete_column(u, j);
        }
    }

    SvdFactors out;
    if (transposed) {
        out.u = std::move(vs);
        out.v = std::move(u);
    } else {
        out.u = std::move(u);
        out.v = std::move(vs);
    }
    out.singular_values = std::move(svals);

    // phase convention: largest-magnitude entry of each right singular vector
    // made real-nonnegative, with the matching left vector rotated in step
    for (std::size_t j = 0; j < out.v.cols(); ++j) {
        std::size_t imax = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < out.v.rows(); ++i) {
            const double m = std::abs(out.v(i, j));
            if (m > best) {
                best = m;
                imax = i;
            }
        }
        if (best <= 0.0)
            continue;
        const cd rot = std::conj(out.v(imax, j)) / best;
        for (std::size_t i = 0; i < out.v.rows(); ++i)
            out.v(i, j) *= rot;
        for (std::size_t i = 0; i < out.u.rows(); ++i)
            out.u(i, j) *= rot;
    }
    return out;
}

HermitianEig hermitian_eig(const ComplexMatrix &a) {
    require_hermitian(a, "hermitian_eig");
    const std::size_t n = a.rows();
    require(n >= 1, "hermitian_eig: empty matrix");
    require(n <= kMaxSvdDim, "hermitian_eig: dimensions exceed the supported 64x64 bound");

    ComplexMatrix m = a;
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = std::max(m.max_abs(), 1e-300);

    constexpr int max_sweeps = 100;
    int sweep = 0;
    while (true) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off = std::max(off, std::abs(m(p, q)));
        if (off <= 1e-14 * scale)
            break;
        if (++sweep > max_sweeps)
            throw NumericalFailure("hermitian_eig: Jacobi sweeps did not converge", max_sweeps);

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cd b = m(p, q);
                const double babs = std::abs(b);
                if (babs <= 1e-16 * scale)
                    continue;
                const cd phase = b / babs;
                const double app = m(p, p).real();
                const double aqq = m(q, q).real();
                const double tau = (aqq - app) / (2.0 * babs);
                const double t =
                    (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // columns: right-multiply by J = diag(1, conj(phase)) * G
                for (std::size_t k = 0; k < n; ++k) {
                    const cd mp = m(k, p), mq = m(k, q);
                    m(k, p) = c * mp - s * std::conj(phase) * mq;
                    m(k, q) = s * mp + c * std::conj(phase) * mq;
                }
                // rows: left-multiply by J^H
                for (std::size_t k = 0; k < n; ++k) {
                    const cd mp = m(p, k), mq = m(q, k);
                    m(p, k) = c * mp - s * phase * mq;
                    m(q, k) = s * mp + c * phase * mq;
                }
                m(p, q) = cd(0.0, 0.0);
                m(q, p) = cd(0.0, 0.0);
                m(p, p) = cd(m(p, p).real(), 0.0);
                m(q, q) = cd(m(q, q).real(), 0.0);

                for (std::size_t k = 0; k < n; ++k) {
                    const cd vp = v(k, p), vq = v(k, q);
                    v(k, p) = c * vp - s * std::conj(phase) * vq;
                    v(k, q) = s * vp + c * std::conj(phase) * vq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return m(i, i).real() > m(j, j).real(); });

    HermitianEig out;
    out.eigenvalues.resize(n);
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = m(order[j], order[j]).real();
        for (std::size_t k = 0; k < n; ++k)
            out.vectors(k, j) = v(k, order[j]);
    }
    return out;
}

ComplexMatrix hermitian_inv_sqrt(const ComplexMatrix &a) {
    require_hermitian(a, "hermitian_inv_sqrt");
    const HermitianEig eig = hermitian_eig(a);
    const double lam_max = eig.eigenvalues.front();
    const double lam_min = eig.eigenvalues.back();
    if (!(lam_min > 1e-12 * lam_max) || lam_max <= 0.0)
        throw ContractViolation("hermitian_inv_sqrt: input is not safely positive definite "
                                "(eigenvalue " +
                                std::to_string(lam_min) + " vs max " + std::to_string(lam_max) +
                                ")");

    const std::size_t n = a.rows();
    ComplexMatrix b(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            cd acc(0.0, 0.0);
            for (std::size_t k = 0; k < n; ++k)
                acc += eig.vectors(i, k) * std::conj(eig.vectors(j, k)) /
                       std::sqrt(eig.eigenvalues[k]);
            b(i, j) = acc;
            b(j, i) = std::conj(acc); // exact Hermitian symmetry by construction
        }
        b(i, i) = cd(b(i, i).real(), 0.0);
    }
    return b;
}

double logdet_hermitian(const ComplexMatrix &a) {
    require_hermitian(a, "logdet_hermitian");
    const std::size_t n = a.rows();
    require(n >= 1, "logdet_hermitian: empty matrix");

    // Cholesky; a non-positive pivot means the matrix is not positive definite
    ComplexMatrix l(n, n);
    double logdet = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k)
            d -= std::norm(l(j, k));
        if (!(d > 0.0))
            throw ContractViolation("logdet_hermitian: input is not positive definite (pivot " +
                                    std::to_string(d) + " at index " + std::to_string(j) + ")");
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        logdet += 2.0 * std::log(ljj);
        for (std::size_t i = j + 1; i < n; ++i) {
            cd acc = a(i, j);
            for (std::size_t k = 0; k < j; ++k)
                acc -= l(i, k) * std::conj(l(j, k));
            l(i, j) = acc / ljj;
        }
    }
    return logdet;
}

} // namespace mmbeam
