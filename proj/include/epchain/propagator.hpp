#pragma once

#include <optional>

#include "epchain/eig.hpp"
#include "epchain/matrix.hpp"
#include "epchain/state.hpp"

namespace epchain {

enum class PropagatorBackend {
    /// Scaling-and-squaring with a degree-13 Padé approximant. Works at EPs.
    Pade,
    /// sum_n e^{-i ε_n dt} v_n <u_n|psi> / <u_n|v_n>. Fails near defective points.
    Spectral,
};

/// |<u_n|v_n>| below this marks the decomposition as too close to an EP for spectral synthesis.
inline constexpr double kDefectiveOverlap = 1e-10;

/// exp(a) by scaling and squaring.
ComplexMatrix expm(const ComplexMatrix& a);

/// exp(-i h dt) for either backend.
ComplexMatrix propagator_matrix(const ComplexMatrix& h, double dt, PropagatorBackend backend);

/// Upper bound on d/dt log||psi(t)|| under psi' = -i h psi: the largest Gershgorin
/// bound of the Hermitian matrix (h - h^†) / (2i).
double growth_rate_bound(const ComplexMatrix& h);

/// exp(-i m dt) psi. The result is not renormalized.
StateVector apply_propagator(const ComplexMatrix& m, const StateVector& psi, double dt,
                             PropagatorBackend backend = PropagatorBackend::Pade);

/// A fixed-step propagator, built once and applied many times.
class Propagator {
public:
    Propagator(const ComplexMatrix& h, double dt, PropagatorBackend backend);

    double dt() const { return dt_; }
    const ComplexMatrix& matrix() const { return u_; }
    CVector apply(const CVector& psi) const { return u_ * psi; }

private:
    double dt_;
    ComplexMatrix u_;
};

} // namespace epchain
