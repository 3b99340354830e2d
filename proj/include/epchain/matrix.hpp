#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "epchain/errors.hpp"
#include "epchain/precision.hpp"

namespace epchain {

template <class Real>
using BasicVector = std::vector<std::complex<Real>>;

using CVector = BasicVector<double>;

/// Dense square complex matrix, row-major.
template <class Real>
class BasicMatrix {
public:
    using scalar = std::complex<Real>;

    BasicMatrix() = default;

    explicit BasicMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

    BasicMatrix(std::size_t dim, std::vector<scalar> entries) : dim_(dim), data_(std::move(entries)) {
        if (data_.size() != dim_ * dim_) {
            throw DimensionMismatch("matrix entries: expected " + std::to_string(dim_ * dim_) +
                                    " values, got " + std::to_string(data_.size()));
        }
    }

    static BasicMatrix identity(std::size_t dim) {
        BasicMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = scalar(1);
        return m;
    }

    std::size_t dim() const { return dim_; }

    scalar& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    const scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    std::span<const scalar> entries() const { return data_; }
    std::span<scalar> entries() { return data_; }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](const scalar& z) {
            return is_finite(z.real()) && is_finite(z.imag());
        });
    }

    BasicMatrix adjoint() const {
        BasicMatrix out(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    template <class Other>
    BasicMatrix<Other> cast() const {
        BasicMatrix<Other> out(dim_);
        for (std::size_t i = 0; i < data_.size(); ++i)
            out.entries()[i] = std::complex<Other>(Other(data_[i].real()), Other(data_[i].imag()));
        return out;
    }

    Real frobenius_norm() const {
        using std::sqrt;
        Real s(0);
        for (const auto& z : data_) s += abs2(z);
        return sqrt(s);
    }

    /// Maximum absolute column sum.
    Real one_norm() const {
        using std::abs;
        Real best(0);
        for (std::size_t j = 0; j < dim_; ++j) {
            Real s(0);
            for (std::size_t i = 0; i < dim_; ++i) s += abs((*this)(i, j));
            best = std::max(best, s);
        }
        return best;
    }

    /// Largest entry modulus of m - other.
    Real max_abs_diff(const BasicMatrix& other) const {
        using std::abs;
        check_same_dim(other);
        Real best(0);
        for (std::size_t i = 0; i < data_.size(); ++i) best = std::max(best, Real(abs(data_[i] - other.data_[i])));
        return best;
    }

    BasicMatrix& operator+=(const BasicMatrix& rhs) {
        check_same_dim(rhs);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
        return *this;
    }

    BasicMatrix& operator-=(const BasicMatrix& rhs) {
        check_same_dim(rhs);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
        return *this;
    }

    BasicMatrix& operator*=(const scalar& s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend BasicMatrix operator+(BasicMatrix lhs, const BasicMatrix& rhs) { return lhs += rhs; }
    friend BasicMatrix operator-(BasicMatrix lhs, const BasicMatrix& rhs) { return lhs -= rhs; }
    friend BasicMatrix operator*(const scalar& s, BasicMatrix m) { return m *= s; }

    friend BasicMatrix operator*(const BasicMatrix& a, const BasicMatrix& b) {
        a.check_same_dim(b);
        const std::size_t n = a.dim_;
        BasicMatrix out(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                const scalar aik = a(i, k);
                if (aik == scalar(0)) continue;
                const scalar* brow = &b.data_[k * n];
                scalar* orow = &out.data_[i * n];
                for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
            }
        }
        return out;
    }

    friend BasicVector<Real> operator*(const BasicMatrix& a, const BasicVector<Real>& x) {
        if (x.size() != a.dim_) {
            throw DimensionMismatch("matrix-vector product: dimension " + std::to_string(a.dim_) + " vs " +
                                    std::to_string(x.size()));
        }
        BasicVector<Real> y(a.dim_);
        for (std::size_t i = 0; i < a.dim_; ++i) {
            scalar s(0);
            const scalar* row = &a.data_[i * a.dim_];
            for (std::size_t j = 0; j < a.dim_; ++j) s += row[j] * x[j];
            y[i] = s;
        }
        return y;
    }

private:
    void check_same_dim(const BasicMatrix& other) const {
        if (other.dim_ != dim_) {
            throw DimensionMismatch("matrix dimensions differ: " + std::to_string(dim_) + " vs " +
                                    std::to_string(other.dim_));
        }
    }

    std::size_t dim_ = 0;
    std::vector<scalar> data_;
};

using ComplexMatrix = BasicMatrix<double>;

/// Dirac product sum_l conj(a_l) b_l.
template <class Real>
std::complex<Real> dot(std::span<const std::complex<Real>> a, std::span<const std::complex<Real>> b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("inner product: length " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    }
    std::complex<Real> s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

template <class Real>
std::complex<Real> dot(const BasicVector<Real>& a, const BasicVector<Real>& b) {
    return dot<Real>(std::span<const std::complex<Real>>(a), std::span<const std::complex<Real>>(b));
}

template <class Real>
Real norm2(std::span<const std::complex<Real>> v) {
    using std::sqrt;
    Real s(0);
    for (const auto& z : v) s += abs2(z);
    return sqrt(s);
}

template <class Real>
Real norm2(const BasicVector<Real>& v) {
    return norm2<Real>(std::span<const std::complex<Real>>(v));
}

/// [a, b] = ab - ba.
template <class Real>
BasicMatrix<Real> commutator(const BasicMatrix<Real>& a, const BasicMatrix<Real>& b) {
    return a * b - b * a;
}

} // namespace epchain
