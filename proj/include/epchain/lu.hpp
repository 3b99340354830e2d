#pragma once

#include <cstddef>
#include <vector>

#include "epchain/matrix.hpp"

namespace epchain {

/// LU factorization with partial pivoting, P A = L U stored in place.
template <class Real>
class LuDecomposition {
public:
    explicit LuDecomposition(BasicMatrix<Real> a) : lu_(std::move(a)), pivots_(lu_.dim()) {
        using std::abs;
        const std::size_t n = lu_.dim();
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            Real best = abs1(lu_(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                const Real v = abs1(lu_(i, k));
                if (v > best) {
                    best = v;
                    p = i;
                }
            }
            pivots_[k] = p;
            if (p != k)
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
            if (best == Real(0)) {
                singular_ = true;
                continue;
            }
            const std::complex<Real> inv = std::complex<Real>(1) / lu_(k, k);
            for (std::size_t i = k + 1; i < n; ++i) {
                const std::complex<Real> f = lu_(i, k) * inv;
                lu_(i, k) = f;
                if (f == std::complex<Real>(0)) continue;
                for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    bool singular() const { return singular_; }

    BasicVector<Real> solve(BasicVector<Real> b) const {
        const std::size_t n = lu_.dim();
        for (std::size_t k = 0; k < n; ++k)
            if (pivots_[k] != k) std::swap(b[k], b[pivots_[k]]);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) b[i] -= lu_(i, j) * b[j];
        for (std::size_t ii = n; ii-- > 0;) {
            for (std::size_t j = ii + 1; j < n; ++j) b[ii] -= lu_(ii, j) * b[j];
            b[ii] /= lu_(ii, ii);
        }
        return b;
    }

    /// Solves A X = B column by column.
    BasicMatrix<Real> solve(const BasicMatrix<Real>& b) const {
        const std::size_t n = lu_.dim();
        BasicMatrix<Real> x(n);
        BasicVector<Real> col(n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
            const auto sol = solve(col);
            for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
        }
        return x;
    }

private:
    BasicMatrix<Real> lu_;
    std::vector<std::size_t> pivots_;
    bool singular_ = false;
};

} // namespace epchain
