#pragma once

#include <complex>
#include <vector>

#include "epchain/matrix.hpp"

namespace epchain {

struct EigOptions {
    bool want_vectors = true;
    /// Also compute right eigenvectors of the adjoint, paired to eigenvalues by conjugation.
    bool want_left = false;
    bool balance = true;
    /// Iteration cap per deflated eigenvalue in the shifted QR sweep.
    int max_iterations_per_eigenvalue = 30;
};

/// Eigendecomposition of a general complex matrix.
///
/// Eigenvalues are sorted lexicographically by (real, imag). When vectors
/// are requested every right vector has unit Dirac norm and residual
/// ||Hv - εv|| <= 1e-9 (1 + ||H||); left vectors u_n satisfy the same bound
/// for H^† u = ε^* u.
template <class Real>
struct BasicSpectrum {
    std::vector<std::complex<Real>> eigenvalues;
    std::vector<BasicVector<Real>> right_vectors;
    std::vector<BasicVector<Real>> left_vectors;
    std::vector<Real> residuals;
    std::vector<Real> left_residuals;
    Real matrix_norm{0};

    std::size_t size() const { return eigenvalues.size(); }
    Real residual_tolerance() const { return Real(1e-9) * (Real(1) + matrix_norm); }
};

using Spectrum = BasicSpectrum<double>;

/// Hessenberg reduction followed by single-shift complex QR, with optional
/// diagonal balancing. Throws NonConvergence when the QR iteration cap is hit.
template <class Real>
BasicSpectrum<Real> eig(const BasicMatrix<Real>& m, const EigOptions& options = {});

/// Eigenvalues only, sorted as in eig().
template <class Real>
std::vector<std::complex<Real>> eigenvalues(const BasicMatrix<Real>& m, bool balance = true);

extern template BasicSpectrum<double> eig(const BasicMatrix<double>&, const EigOptions&);
extern template BasicSpectrum<ExtendedReal> eig(const BasicMatrix<ExtendedReal>&, const EigOptions&);
extern template std::vector<std::complex<double>> eigenvalues(const BasicMatrix<double>&, bool);
extern template std::vector<std::complex<ExtendedReal>> eigenvalues(const BasicMatrix<ExtendedReal>&, bool);

} // namespace epchain
