#pragma once

#include <string>
#include <vector>

#include "epchain/matrix.hpp"
#include "epchain/models.hpp"
#include "epchain/propagator.hpp"
#include "epchain/state.hpp"

namespace epchain {

enum class Renormalization {
    /// Divide by the Dirac norm after every propagator application.
    EverySubstep,
    /// Only at sampling times; sub-steps between samples run unnormalized.
    AtSamples,
};

struct EvolveOptions {
    PropagatorBackend backend = PropagatorBackend::Pade;
    Renormalization renormalization = Renormalization::EverySubstep;
    /// Each sub-step is short enough that the norm can grow by at most e^this.
    double max_log_growth = 50.0;
    /// Keep the Dirac-normalized state at every sample.
    bool keep_states = false;
};

struct EvolutionTrace {
    std::vector<double> times;
    /// |<target|psi(t)>| / ||psi(t)||.
    std::vector<double> fidelities;
    /// ln ||psi(t)|| of the unnormalized evolution, psi(0) = init as given.
    std::vector<double> log_norms;
    std::string target_name;
    ModelSpec spec;
    double gamma_used = 0.0;
    /// Filled only with EvolveOptions::keep_states.
    std::vector<CVector> states;
};

/// Samples t_k = k t_max / n_steps for k = 0..n_steps under psi' = -i H psi.
EvolutionTrace evolve_trace(const ModelSpec& spec, const StateVector& init, const StateVector& target, double t_max,
                            int n_steps, const EvolveOptions& options = {}, const std::string& target_name = "");

/// Same, for an explicit generator.
EvolutionTrace evolve_matrix(const ComplexMatrix& h, const StateVector& init, const StateVector& target,
                             double t_max, int n_steps, const EvolveOptions& options = {});

/// Minimum separation between the largest and next-largest Im ε.
inline constexpr double kDominantGap = 1e-10;

/// Normalized right eigenvector of the eigenvalue with the largest imaginary part.
/// Throws NoDominantState when that eigenvalue is not separated by kDominantGap.
StateVector dominant_state(const ComplexMatrix& m, const Basis& basis);
StateVector dominant_state(const ComplexMatrix& m);

/// Largest Im ε minus the second largest.
double im_gap(const ComplexMatrix& m);

/// Earliest sample t with |f(s) - f(t_max)| < tol for every later sample s.
/// +infinity if the trace holds non-finite fidelities.
double convergence_time(const EvolutionTrace& trace, double tol = 1e-3);

/// Least-squares rate r in 1 - f(t) ~ e^{-r t}, fitted on the samples after
/// 1 - f first drops below `upper` and while it stays above `lower`.
/// Throws DegenerateFit with fewer than three usable samples.
double fit_decay_rate(const EvolutionTrace& trace, double lower = 1e-11, double upper = 1e-3);

} // namespace epchain
