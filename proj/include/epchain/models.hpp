#pragma once

#include <string>

#include "epchain/matrix.hpp"
#include "epchain/state.hpp"

namespace epchain {

enum class ModelKind {
    /// N-site hopping model of the single-magnon sector.
    XYMagnon,
    /// XY chain on the full 2^N spin space.
    XYFullSpace,
    /// -J sum zz + i γ sum z + Δ sum x on 2^N spins.
    TransverseIsing,
};

enum class IsingBoundary { Periodic, Open };

/// Largest spin count for full-space builders (2^12 = 4096 states).
inline constexpr int kMaxSpinSites = 12;

struct ModelSpec {
    ModelKind kind = ModelKind::XYMagnon;
    int sites = 6;
    /// Boundary potential V on the two end sites (XY models).
    double potential = 0.0;
    double gamma = 0.0;
    /// Ising coupling J; also the hopping scale of the XY models, fixed at 1 there.
    double coupling = 1.0;
    /// Transverse field Δ (Ising).
    double field = 0.0;
    IsingBoundary boundary = IsingBoundary::Periodic;

    /// Throws ConfigError / DimensionCap naming the offending field.
    void validate() const;
    Basis basis() const;
    std::size_t dim() const { return basis().dim(); }
};

std::string to_string(ModelKind kind);

/// Unit hopping on an open chain, V + iγ on site 1 and V - iγ on site N.
ComplexMatrix build_h_eq(const ModelSpec& spec);

/// build_h_eq with V = 0.
ComplexMatrix build_h_w(int sites, double gamma);

/// sum_l (s+_l s-_{l+1} + h.c.) + (V + iγ) n_1 + (V - iγ) n_N with n = (z + 1)/2,
/// so that the one-flip block is exactly build_h_eq.
ComplexMatrix build_h_chain_full(const ModelSpec& spec);

/// -J sum_l z_l z_{l+1} + iγ sum_l z_l + Δ sum_l x_l. The zz sum wraps around for
/// periodic boundaries and stops at N-1 for open ones.
ComplexMatrix build_h_ghz(const ModelSpec& spec);

/// Dispatches on spec.kind.
ComplexMatrix build_hamiltonian(const ModelSpec& spec);

/// build_hamiltonian with entries rounded once to 50 digits instead of to double.
/// Near high-order EPs of the Ising chain a single ulp on the diagonal is enough
/// to split a real spectrum.
BasicMatrix<ExtendedReal> build_hamiltonian_extended(const ModelSpec& spec);

/// Total z magnetization sum_l z_l, diagonal in the spin basis.
ComplexMatrix total_sz(int sites);

/// Index of s+_l |all down> in the spin basis, l in [1, N].
std::size_t magnon_index(int sites, int l);

/// Projects a 2^N matrix onto the single-flip sector after checking it commutes
/// with the total magnetization (tolerance 1e-10 on the Frobenius norm).
ComplexMatrix reduce_to_magnon_sector(const ComplexMatrix& h_full, int sites);

enum class TargetName { W, CalW, Bell, GHZ };

std::string to_string(TargetName name);
TargetName parse_target(const std::string& text);

/// W = N^{-1/2} sum_l (-i)^l |l>, CalW = N^{-1/2} sum_l i^l |l>,
/// Bell = (|1> - i|N>)/sqrt2 in the magnon basis; GHZ = (|down..> + |up..>)/sqrt2.
StateVector target_state(TargetName name, int sites);

/// Non-empty when the target is used outside the regime where it is meaningful
/// (W and CalW are only mutually orthogonal for even N).
std::string target_warning(TargetName name, int sites);

/// Single-site excitation |k> in the given basis (s+_k |all down> for spin bases).
StateVector site_state(const Basis& basis, int k);

/// Spin-basis product state from a string of '0' (down) and '1' (up), site 1 first.
StateVector bitstring_state(const std::string& bits);

/// Maps a magnon-basis state into the one-flip sector of the spin basis.
StateVector embed_magnon(const StateVector& magnon);

enum class Parity {
    /// i -> dim-1-i. On spin states this flips every spin.
    IndexReversal,
    /// Site l -> N+1-l on spin states.
    SiteReversal,
};

/// True when P conj(m) P = m entrywise to 1e-12 relative to the largest entry.
bool check_pt_spectrum(const ComplexMatrix& m, Parity parity);

/// Magnon bases use index reversal. Spin bases accept either site reversal or
/// the global spin flip.
bool check_pt_spectrum(const ComplexMatrix& m, const Basis& basis);

} // namespace epchain
