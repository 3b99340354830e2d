#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "epchain/state.hpp"

namespace epchain {

enum class RootBranch {
    /// Real k in (0, π), energy 2cos k.
    Scattering,
    /// Real κ > 0, energy 2cosh κ.
    BoundUpper,
    /// Real κ > 0, energy -2cosh κ.
    BoundLower,
    /// Complex k, energy 2cos k off the real axis.
    Complex,
};

struct BetheRoot {
    RootBranch branch = RootBranch::Scattering;
    /// k for Scattering and Complex roots, κ for the bound branches.
    std::complex<double> momentum;
    std::complex<double> energy;
    /// |D| divided by the largest value its terms can reach at this Im k.
    double residual = 0.0;
};

/// sin((N+1)k) + γ² sin((N-1)k).
double scattering_F(double k, int sites, double gamma);
double scattering_dF(double k, int sites, double gamma);

/// Scattering determinant with boundary potential V:
/// sin((N+1)k) - 2V sin(Nk) + (V² + γ²) sin((N-1)k). Reduces to scattering_F at V = 0.
std::complex<double> scattering_determinant(std::complex<double> k, int sites, double potential, double gamma);

/// sinh((N+1)κ) - 2V sinh(Nκ) + (V² + γ²) sinh((N-1)κ).
double bound_digamma(double kappa, int sites, double potential, double gamma);

/// Real roots k in (0, π) of the scattering determinant: 1e4-point scan,
/// bisection, Newton polish. Roots with relative residual above 1e-10 are dropped.
std::vector<BetheRoot> scattering_roots(int sites, double potential, double gamma);

/// Real κ > 0 roots of bound_digamma for +V (upper branch) and -V (lower branch).
std::vector<BetheRoot> bound_roots(int sites, double potential, double gamma);

/// Every eigenvalue of H_eq as a root of the scattering determinant: real
/// scattering and bound roots first, then complex roots found by Newton from a
/// seed grid until N distinct energies are collected. Sorted by energy as eig() sorts.
std::vector<BetheRoot> bethe_spectrum(int sites, double potential, double gamma);

/// Double root of F in (k, γ²) by 2-D Newton. Returns (k_c, γ_c).
std::pair<double, double> scattering_ep(int sites);

/// κ > 0 solving γ² cosh((N-1)κ) = cosh((N+1)κ), energy +2i sinh κ.
/// γ = 1 returns κ = 0; γ < 1 throws NoRoot.
BetheRoot broken_pair_kappa(int sites, double gamma);

/// Plane-wave eigenstate sum_j (A e^{ikj} + B e^{-ikj}) |j> of H_eq, with (A, B)
/// spanning the null space of the 2x2 boundary matrix. k may be complex.
StateVector bethe_scattering_state(std::complex<double> k, int sites, double gamma, double potential = 0.0);

struct EtaFactors {
    double eta_plus = 0.0;
    double eta_minus = 0.0;
    /// cosh κ at the bound-state EP; NaN when the square root is imaginary.
    double c = 0.0;
    double f_factor = 0.0;
};

EtaFactors eta_factors(int sites, double potential, double gamma);

/// Left minus right side of the boundary equation
/// (c + sqrt(c²-1))^{2N} = (η₊c - 2V - η₋ sqrt(c²-1)) / (η₊c - 2V + η₋ sqrt(c²-1)),
/// evaluated with 100-digit arithmetic and divided by the left side. NaN where c is not real and >= 1.
double epts_residual(int sites, double potential, double gamma);

/// Smallest γ solving the boundary equation: log-spaced scan of γ in [1e-40, 10]
/// followed by bisection in log γ to relative 1e-12. Requires |V| > 2.
double epts_gamma(int sites, double potential);

struct ExactBoundaryCheck {
    double gamma_exact = 0.0;
    double gamma_numeric = 0.0;
    double rel_gap = 0.0;
    bool mismatch = false;
};

/// Relative tolerance between the closed-form and diagonalization boundaries.
inline constexpr double kBoundaryAgreement = 1e-3;

/// epts_gamma next to the diagonalization boundary, without throwing on disagreement.
ExactBoundaryCheck compare_exact_boundary(int sites, double potential);

/// epts_gamma validated against the diagonalization boundary; throws
/// ValidationMismatch when they differ by more than kBoundaryAgreement.
double exact_boundary_gamma(int sites, double potential);

struct EffectiveModel {
    int sites = 0;
    double potential = 0.0;
    double theta = 0.0;
    /// phi_n for n = 2..N-1.
    std::vector<double> phi;
    double omega = 0.0;
    double lambda_eff = 0.0;
    double v_eff = 0.0;
};

/// Closed-form Ω(N) for even N >= 6.
double omega_closed_form(int sites);

/// Two-site reduction of H_eq for |V| > 2 and even N >= 6. λ_eff and V_eff
/// come from the finite sums over phi_n.
EffectiveModel effective_model(int sites, double potential);

struct EffectiveSpectrum {
    /// V + V_eff - sqrt(λ² - γ²), V + V_eff + sqrt(λ² - γ²).
    std::pair<std::complex<double>, std::complex<double>> eigenvalues;
    /// (iγ ± sqrt(λ² - γ²))|1> + λ|N>, normalized, in the N-site magnon basis.
    std::pair<StateVector, StateVector> states;
    /// i γ|1> + λ|N>, present when γ equals |λ_eff| to relative 1e-9.
    std::optional<StateVector> coalescent;
};

EffectiveSpectrum effective_spectrum(int sites, double potential, double gamma);

/// |λ_eff| from the finite sum.
double perturbative_boundary(int sites, double potential);

/// |Ω(N)| / V².
double asymptotic_boundary(int sites, double potential);

} // namespace epchain
