#include "epchain/propagator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "epchain/lu.hpp"

namespace epchain {
namespace {

// Degree-13 Padé coefficients and the 1-norm bound below which no scaling is needed.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

ComplexMatrix combine(const ComplexMatrix& a2, const ComplexMatrix& a4, const ComplexMatrix& a6, double c6,
                      double c4, double c2, double c0) {
    const std::size_t n = a2.dim();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n * n; ++i)
        out.entries()[i] = c6 * a6.entries()[i] + c4 * a4.entries()[i] + c2 * a2.entries()[i];
    for (std::size_t i = 0; i < n; ++i) out(i, i) += c0;
    return out;
}

ComplexMatrix spectral_propagator(const ComplexMatrix& h, double dt) {
    const Spectrum spec = eig(h);
    const std::size_t n = h.dim();
    ComplexMatrix vecs(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) vecs(i, k) = spec.right_vectors[k][i];
    LuDecomposition<double> lu(vecs);
    if (lu.singular()) throw DefectivePropagation("spectral synthesis: eigenvector matrix is singular");
    const ComplexMatrix inv = lu.solve(ComplexMatrix::identity(n));
    // Rows of V^{-1} are the left eigenvectors normalized so that <u_n|v_n> = 1;
    // with unit-norm u_n the overlap is 1 / ||row_n||.
    for (std::size_t k = 0; k < n; ++k) {
        double row2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) row2 += std::norm(inv(k, j));
        const double overlap = 1.0 / std::sqrt(row2);
        if (!(overlap >= kDefectiveOverlap)) {
            throw DefectivePropagation("spectral synthesis: |<u|v>| = " + std::to_string(overlap) +
                                       " near a defective eigenvalue; use the Padé backend");
        }
    }
    // At an exact EP rounding splits the pair by ~sqrt(eps) and the overlaps stay
    // above the threshold, so also require V diag(ε) V^{-1} to reproduce h.
    ComplexMatrix scaled = vecs;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) scaled(i, k) *= spec.eigenvalues[k];
    const double recon = (scaled * inv).max_abs_diff(h);
    if (recon > 1e-10 * (1.0 + h.frobenius_norm())) {
        throw DefectivePropagation("spectral synthesis: eigenbasis reconstruction error " + std::to_string(recon) +
                                   " near a defective eigenvalue; use the Padé backend");
    }
    ComplexMatrix out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::complex<double> phase = std::exp(std::complex<double>(0.0, -dt) * spec.eigenvalues[k]);
        for (std::size_t i = 0; i < n; ++i) {
            const std::complex<double> vi = vecs(i, k) * phase;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * inv(k, j);
        }
    }
    return out;
}

} // namespace

ComplexMatrix expm(const ComplexMatrix& a) {
    if (!a.all_finite()) throw ConfigError("expm: matrix has non-finite entries");
    const double norm = a.one_norm();
    int squarings = 0;
    if (norm > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
    ComplexMatrix x = std::ldexp(1.0, -squarings) * a;

    const ComplexMatrix x2 = x * x;
    const ComplexMatrix x4 = x2 * x2;
    const ComplexMatrix x6 = x4 * x2;
    const auto& b = kPade13;
    const ComplexMatrix u_inner =
        x6 * combine(x2, x4, x6, b[13], b[11], b[9], 0.0) + combine(x2, x4, x6, b[7], b[5], b[3], b[1]);
    const ComplexMatrix u = x * u_inner;
    const ComplexMatrix v =
        x6 * combine(x2, x4, x6, b[12], b[10], b[8], 0.0) + combine(x2, x4, x6, b[6], b[4], b[2], b[0]);

    LuDecomposition<double> lu(v - u);
    if (lu.singular()) throw NonConvergence("expm: singular Padé denominator");
    ComplexMatrix r = lu.solve(v + u);
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

ComplexMatrix propagator_matrix(const ComplexMatrix& h, double dt, PropagatorBackend backend) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("propagator: dt must be positive and finite");
    if (backend == PropagatorBackend::Spectral) return spectral_propagator(h, dt);
    return expm(std::complex<double>(0.0, -dt) * h);
}

double growth_rate_bound(const ComplexMatrix& h) {
    const std::size_t n = h.dim();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double row = h(i, i).imag();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const std::complex<double> k = (h(i, j) - std::conj(h(j, i))) / std::complex<double>(0.0, 2.0);
            row += std::abs(k);
        }
        best = std::max(best, row);
    }
    return best;
}

StateVector apply_propagator(const ComplexMatrix& m, const StateVector& psi, double dt, PropagatorBackend backend) {
    if (psi.dim() != m.dim()) {
        throw DimensionMismatch("propagator: state dimension " + std::to_string(psi.dim()) + " vs matrix " +
                                std::to_string(m.dim()));
    }
    const ComplexMatrix u = propagator_matrix(m, dt, backend);
    return StateVector(psi.basis(), u * psi.amplitudes());
}

Propagator::Propagator(const ComplexMatrix& h, double dt, PropagatorBackend backend)
    : dt_(dt), u_(propagator_matrix(h, dt, backend)) {}

} // namespace epchain
