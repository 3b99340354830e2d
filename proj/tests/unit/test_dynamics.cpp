#include <doctest.h>

#include <cmath>
#include <limits>

#include "epchain/bethe.hpp"
#include "epchain/dynamics.hpp"
#include "epchain/eig.hpp"
#include "epchain/models.hpp"

using namespace epchain;
using cd = std::complex<double>;

namespace {

ModelSpec w_model(int n, double g) {
    ModelSpec s;
    s.sites = n;
    s.gamma = g;
    return s;
}

StateVector site1(int n) { return site_state(Basis{BasisKind::MagnonPosition, n}, 1); }

EvolutionTrace synthetic(double rate, int count, double dt) {
    EvolutionTrace t;
    for (int k = 0; k < count; ++k) {
        t.times.push_back(k * dt);
        t.fidelities.push_back(1.0 - std::exp(-rate * k * dt));
        t.log_norms.push_back(0.0);
    }
    return t;
}

} // namespace

TEST_CASE("stationary eigenvector keeps unit fidelity") {
    const auto spec = w_model(6, 0.0);
    const auto s = eig(build_hamiltonian(spec));
    const StateVector v(spec.basis(), s.right_vectors[2]);
    const auto trace = evolve_trace(spec, v.normalized(), v.normalized(), 10.0, 50);
    for (double f : trace.fidelities) CHECK(f == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("trace invariants") {
    const auto trace = evolve_trace(w_model(6, 1.2), site1(6), target_state(TargetName::W, 6), 40.0, 400);
    REQUIRE(trace.times.size() == 401);
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        CHECK(trace.fidelities[i] >= 0.0);
        CHECK(trace.fidelities[i] <= 1.0 + 1e-12);
        if (i) CHECK(trace.times[i] > trace.times[i - 1]);
    }
    CHECK(trace.gamma_used == 1.2);
    CHECK(trace.times.back() == doctest::Approx(40.0));
}

TEST_CASE("renormalization schedule does not change fidelities") {
    for (auto backend : {PropagatorBackend::Pade, PropagatorBackend::Spectral}) {
        EvolveOptions every, lazy;
        every.backend = lazy.backend = backend;
        // Force several sub-steps per sample.
        every.max_log_growth = lazy.max_log_growth = 0.05;
        lazy.renormalization = Renormalization::AtSamples;
        const auto spec = w_model(6, 1.2);
        const auto a = evolve_trace(spec, site1(6), target_state(TargetName::W, 6), 60.0, 200, every);
        const auto b = evolve_trace(spec, site1(6), target_state(TargetName::W, 6), 60.0, 200, lazy);
        for (std::size_t i = 0; i < a.fidelities.size(); ++i) {
            CHECK(std::abs(a.fidelities[i] - b.fidelities[i]) < 1e-10);
            CHECK(std::abs(a.log_norms[i] - b.log_norms[i]) < 1e-8 * (1 + std::abs(a.log_norms[i])));
        }
    }
}

TEST_CASE("steady fidelity equals dominant-state overlap") {
    for (double g : {1.05, 1.2, 1.5}) {
        const auto spec = w_model(6, g);
        const auto w = target_state(TargetName::W, 6);
        const auto trace = evolve_trace(spec, site1(6), w, 200.0, 2000);
        const auto dom = dominant_state(build_hamiltonian(spec), spec.basis());
        CHECK(std::abs(trace.fidelities.back() - fidelity(w, dom)) < 1e-6);
    }
}

TEST_CASE("1 - f decays at twice the imaginary gap") {
    const auto spec = w_model(6, 1.2);
    const auto h = build_hamiltonian(spec);
    const auto dom = dominant_state(h, spec.basis());
    // Measured against the dominant state itself, so 1 - f goes to zero.
    const auto trace = evolve_trace(spec, site1(6), dom, 100.0, 2000);
    const double rate = fit_decay_rate(trace);
    CHECK(rate == doctest::Approx(2 * im_gap(h)).epsilon(0.10));
}

TEST_CASE("Hermitian runs conserve the norm") {
    const auto trace = evolve_trace(w_model(6, 0.0), site1(6), target_state(TargetName::W, 6), 100.0, 500);
    for (double ln : trace.log_norms) CHECK(std::abs(ln) < 1e-8);
    ModelSpec v = w_model(8, 0.0);
    v.potential = 3.0;
    EvolveOptions lazy;
    lazy.renormalization = Renormalization::AtSamples;
    const auto t2 = evolve_trace(v, site1(8), site1(8), 50.0, 100, lazy);
    for (double ln : t2.log_norms) CHECK(std::abs(ln) < 1e-8);
}

TEST_CASE("log norm tracks the broken-pair growth") {
    const auto spec = w_model(6, 1.2);
    const auto trace = evolve_trace(spec, site1(6), site1(6), 200.0, 400);
    const double im = broken_pair_kappa(6, 1.2).energy.imag();
    const double slope = (trace.log_norms.back() - trace.log_norms[300]) / (trace.times.back() - trace.times[300]);
    CHECK(slope == doctest::Approx(im).epsilon(1e-6));
}

TEST_CASE("evolve argument checks") {
    const auto spec = w_model(6, 0.5);
    CHECK_THROWS_AS(evolve_trace(spec, site1(5), site1(6), 1.0, 10), DimensionMismatch);
    CHECK_THROWS_AS(evolve_trace(spec, site1(6), site1(6), 1.0, 1), ConfigError);
    CHECK_THROWS_AS(evolve_trace(spec, site1(6), site1(6), 0.0, 10), ConfigError);
    CHECK_THROWS_AS(evolve_trace(spec, embed_magnon(site1(6)), site1(6), 1.0, 10), DimensionMismatch);
}

TEST_CASE("dominant state") {
    ComplexMatrix d(2);
    d(0, 0) = cd(0, 1);
    d(1, 1) = cd(0, -1);
    const auto e = dominant_state(d);
    CHECK(std::abs(e[0]) == doctest::Approx(1.0));
    CHECK(std::abs(e[1]) < 1e-14);
    CHECK_THROWS_AS(dominant_state(build_h_w(6, 0.5)), NoDominantState);
    CHECK_THROWS_AS(dominant_state(ComplexMatrix::identity(3)), NoDominantState);
    CHECK_THROWS_AS(dominant_state(d, Basis{BasisKind::MagnonPosition, 3}), DimensionMismatch);
    CHECK(im_gap(build_h_w(6, 1.2)) == doctest::Approx(broken_pair_kappa(6, 1.2).energy.imag()).epsilon(1e-8));
}

TEST_CASE("convergence time") {
    EvolutionTrace flat;
    flat.times = {0.0, 1.0, 2.0};
    flat.fidelities = {0.5, 0.5, 0.5};
    flat.log_norms = {0, 0, 0};
    CHECK(convergence_time(flat) == 0.0);
    const auto t = synthetic(1.0, 101, 0.1);
    // 1 - f crosses 1e-3 near t = ln(1000).
    CHECK(convergence_time(t) == doctest::Approx(std::log(1000.0)).epsilon(0.02));
    CHECK(convergence_time(t, 1e-2) < convergence_time(t, 1e-3));
    flat.fidelities[1] = std::numeric_limits<double>::quiet_NaN();
    CHECK(std::isinf(convergence_time(flat)));
    CHECK_THROWS_AS(convergence_time(EvolutionTrace{}), ConfigError);
    CHECK_THROWS_AS(convergence_time(t, 0.0), ConfigError);
}

TEST_CASE("decay-rate fit") {
    CHECK(fit_decay_rate(synthetic(0.5, 200, 0.25)) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK_THROWS_AS(fit_decay_rate(synthetic(0.5, 5, 0.25)), DegenerateFit);
}
