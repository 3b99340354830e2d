#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace epchain {

/// 50 significant digits. Used where boundaries sit at γ ~ 1e-16 next to
/// diagonal entries of order 100, which double precision cannot resolve.
using ExtendedReal = boost::multiprecision::cpp_bin_float_50;

/// 100 significant digits, for closed-form boundary equations whose terms
/// cancel to ~V^{-2N} relative.
using HighReal = boost::multiprecision::cpp_bin_float_100;

template <class Real>
using Complex = std::complex<Real>;

template <class Real>
inline Real epsilon_of() {
    return std::numeric_limits<Real>::epsilon();
}

template <class Real>
inline Real abs2(const std::complex<Real>& z) {
    return z.real() * z.real() + z.imag() * z.imag();
}

/// |re| + |im|, cheaper than the modulus and good enough for scaling decisions.
template <class Real>
inline Real abs1(const std::complex<Real>& z) {
    using std::abs;
    return abs(z.real()) + abs(z.imag());
}

template <class Real>
inline bool is_finite(const Real& x) {
    using std::isfinite;
    using boost::multiprecision::isfinite;
    return isfinite(x);
}

template <class Real>
inline double to_double(const Real& x) {
    return static_cast<double>(x);
}

} // namespace epchain
