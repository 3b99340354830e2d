#include "epchain/state.hpp"

#include <cmath>

namespace epchain {

std::string to_string(const Basis& basis) {
    return (basis.kind == BasisKind::MagnonPosition ? "magnon(" : "spin_z(") + std::to_string(basis.sites) + ")";
}

StateVector::StateVector(Basis basis, CVector amplitudes) : basis_(basis), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != basis_.dim()) {
        throw DimensionMismatch("state on " + to_string(basis_) + " needs " + std::to_string(basis_.dim()) +
                                " amplitudes, got " + std::to_string(amplitudes_.size()));
    }
    const double nrm = dirac_norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw ConfigError("state vector must have finite positive norm");
}

StateVector StateVector::normalized() const {
    CVector out = amplitudes_;
    const double nrm = dirac_norm();
    for (auto& z : out) z /= nrm;
    return StateVector(basis_, std::move(out));
}

std::complex<double> biorthogonal_overlap(const StateVector& left, const StateVector& right) {
    if (!(left.basis() == right.basis())) {
        throw DimensionMismatch("overlap between " + to_string(left.basis()) + " and " + to_string(right.basis()));
    }
    return dot(left.amplitudes(), right.amplitudes());
}

double fidelity(const StateVector& target, const StateVector& psi) {
    return std::abs(biorthogonal_overlap(target, psi)) / psi.dirac_norm();
}

} // namespace epchain
