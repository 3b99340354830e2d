#include "epchain/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epchain/eig.hpp"

namespace epchain {
namespace {

void require_dim(const StateVector& s, std::size_t dim, const char* what) {
    if (s.dim() != dim) {
        throw DimensionMismatch(std::string(what) + " has dimension " + std::to_string(s.dim()) +
                                " but the Hamiltonian has " + std::to_string(dim));
    }
}

void rescale(CVector& v, double by) {
    for (auto& z : v) z /= by;
}

} // namespace

EvolutionTrace evolve_matrix(const ComplexMatrix& h, const StateVector& init, const StateVector& target,
                             double t_max, int n_steps, const EvolveOptions& options) {
    require_dim(init, h.dim(), "initial state");
    require_dim(target, h.dim(), "target state");
    if (n_steps < 2) throw ConfigError("steps must be at least 2");
    if (!(t_max > 0) || !std::isfinite(t_max)) throw ConfigError("t-max must be positive and finite");

    const double dt = t_max / n_steps;
    const double growth = std::max(0.0, growth_rate_bound(h));
    const int substeps = std::max(1, static_cast<int>(std::ceil(growth * dt / options.max_log_growth)));
    const Propagator step(h, dt / substeps, options.backend);

    EvolutionTrace trace;
    trace.times.reserve(n_steps + 1);
    trace.fidelities.reserve(n_steps + 1);
    trace.log_norms.reserve(n_steps + 1);

    CVector psi = init.amplitudes();
    double log_norm = std::log(init.dirac_norm());
    rescale(psi, init.dirac_norm());
    const CVector& t = target.amplitudes();

    auto sample = [&](int k) {
        const double nrm = norm2(psi);
        trace.times.push_back(k * dt);
        trace.fidelities.push_back(std::abs(dot(t, psi)) / nrm);
        trace.log_norms.push_back(log_norm);
        if (options.keep_states) {
            CVector copy = psi;
            rescale(copy, nrm);
            trace.states.push_back(std::move(copy));
        }
    };

    sample(0);
    for (int k = 1; k <= n_steps; ++k) {
        for (int s = 0; s < substeps; ++s) {
            psi = step.apply(psi);
            if (options.renormalization == Renormalization::EverySubstep || s + 1 == substeps) {
                const double nrm = norm2(psi);
                if (!(nrm > 0) || !std::isfinite(nrm))
                    throw NonConvergence("state norm left the representable range at t=" + std::to_string(k * dt));
                log_norm += std::log(nrm);
                rescale(psi, nrm);
            }
        }
        sample(k);
    }
    return trace;
}

EvolutionTrace evolve_trace(const ModelSpec& spec, const StateVector& init, const StateVector& target, double t_max,
                            int n_steps, const EvolveOptions& options, const std::string& target_name) {
    const ComplexMatrix h = build_hamiltonian(spec);
    if (!(init.basis() == spec.basis())) throw DimensionMismatch("initial state basis " + to_string(init.basis()) +
                                                                 " does not match " + to_string(spec.basis()));
    if (!(target.basis() == spec.basis())) throw DimensionMismatch("target basis " + to_string(target.basis()) +
                                                                   " does not match " + to_string(spec.basis()));
    EvolutionTrace trace = evolve_matrix(h, init, target, t_max, n_steps, options);
    trace.spec = spec;
    trace.gamma_used = spec.gamma;
    trace.target_name = target_name;
    return trace;
}

namespace {

struct TopTwo {
    std::size_t index;
    double first;
    double second;
};

TopTwo top_two_imag(const std::vector<std::complex<double>>& values) {
    TopTwo out{0, -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double im = values[i].imag();
        if (im > out.first) {
            out.second = out.first;
            out.first = im;
            out.index = i;
        } else if (im > out.second) {
            out.second = im;
        }
    }
    return out;
}

} // namespace

double im_gap(const ComplexMatrix& m) {
    const auto top = top_two_imag(eigenvalues(m));
    if (m.dim() < 2) return std::numeric_limits<double>::infinity();
    return top.first - top.second;
}

StateVector dominant_state(const ComplexMatrix& m, const Basis& basis) {
    if (basis.dim() != m.dim()) throw DimensionMismatch("dominant_state: basis does not match matrix");
    const Spectrum spec = eig(m);
    const auto top = top_two_imag(spec.eigenvalues);
    if (m.dim() > 1 && !(top.first - top.second > kDominantGap)) {
        throw NoDominantState("largest Im(eps) is not isolated (gap " + std::to_string(top.first - top.second) +
                              "); the spectrum has no unique growing mode");
    }
    return StateVector(basis, spec.right_vectors[top.index]);
}

StateVector dominant_state(const ComplexMatrix& m) {
    return dominant_state(m, Basis{BasisKind::MagnonPosition, static_cast<int>(m.dim())});
}

double convergence_time(const EvolutionTrace& trace, double tol) {
    if (trace.fidelities.empty()) throw ConfigError("convergence_time: empty trace");
    if (!(tol > 0)) throw ConfigError("tol must be positive");
    const auto& f = trace.fidelities;
    const double last = f.back();
    if (!std::all_of(f.begin(), f.end(), [](double x) { return std::isfinite(x); }))
        return std::numeric_limits<double>::infinity();
    std::size_t first = f.size() - 1;
    while (first > 0 && std::abs(f[first - 1] - last) < tol) --first;
    return trace.times[first];
}

double fit_decay_rate(const EvolutionTrace& trace, double lower, double upper) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    bool started = false;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double d = 1.0 - trace.fidelities[i];
        started = started || d < upper;
        if (!started) continue;
        if (!(d > lower)) break;
        const double t = trace.times[i], y = std::log(d);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++n;
    }
    const double den = n * sxx - sx * sx;
    if (n < 3 || !(den > 0)) throw DegenerateFit("decay fit needs at least three samples inside the window");
    return -(n * sxy - sx * sy) / den;
}

} // namespace epchain
