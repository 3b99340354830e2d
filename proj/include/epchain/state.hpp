#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "epchain/matrix.hpp"

namespace epchain {

enum class BasisKind {
    /// Single-magnon positions |1>..|N>, |l> = sigma_l^+ |all down>.
    MagnonPosition,
    /// Computational basis of N spins; site 1 is the most significant bit, bit 1 = up.
    SpinZ,
};

struct Basis {
    BasisKind kind = BasisKind::MagnonPosition;
    int sites = 0;

    std::size_t dim() const {
        return kind == BasisKind::MagnonPosition ? static_cast<std::size_t>(sites) : std::size_t{1} << sites;
    }

    friend bool operator==(const Basis&, const Basis&) = default;
};

std::string to_string(const Basis& basis);

/// Complex amplitudes over a tagged basis. Invariant: length matches the
/// basis and the Dirac norm is positive.
class StateVector {
public:
    StateVector(Basis basis, CVector amplitudes);

    const Basis& basis() const { return basis_; }
    std::size_t dim() const { return amplitudes_.size(); }
    const CVector& amplitudes() const { return amplitudes_; }
    std::complex<double> operator[](std::size_t i) const { return amplitudes_[i]; }

    double dirac_norm() const { return norm2(amplitudes_); }
    StateVector normalized() const;

private:
    Basis basis_;
    CVector amplitudes_;
};

/// sum_l conj(left_l) right_l over the stored amplitudes.
std::complex<double> biorthogonal_overlap(const StateVector& left, const StateVector& right);

/// |<target|psi>| with psi Dirac-normalized; target is used as given.
double fidelity(const StateVector& target, const StateVector& psi);

} // namespace epchain
