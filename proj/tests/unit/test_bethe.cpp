#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "epchain/analysis.hpp"
#include "epchain/bethe.hpp"
#include "epchain/eig.hpp"
#include "epchain/models.hpp"

using namespace epchain;
using cd = std::complex<double>;

namespace {

ModelSpec xy(int n, double v, double g) {
    ModelSpec s;
    s.sites = n;
    s.potential = v;
    s.gamma = g;
    return s;
}

// Chebyshev U_m(x) by recurrence; the effective coupling of the two end sites
// equals 1/U_{N-2}(V/2) and V_eff equals U_{N-3}(V/2)/U_{N-2}(V/2).
double cheb_u(int m, double x) {
    double a = 1.0, b = 2 * x;
    if (m == 0) return a;
    for (int i = 1; i < m; ++i) {
        const double c = 2 * x * b - a;
        a = b;
        b = c;
    }
    return b;
}

double residual(const ComplexMatrix& h, const StateVector& psi, cd e) {
    CVector r = h * psi.amplitudes();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= e * psi[i];
    return norm2(r);
}

} // namespace

TEST_CASE("scattering function anchors") {
    CHECK(std::abs(scattering_F(std::numbers::pi / 2, 6, 1.0)) < 1e-15);
    CHECK(scattering_F(0.37, 6, 0.0) == doctest::Approx(std::sin(7 * 0.37)));
    CHECK(std::abs(scattering_determinant(cd(0.37, 0.1), 6, 0.0, 0.4) -
                   (std::sin(cd(0.37, 0.1) * 7.0) + 0.16 * std::sin(cd(0.37, 0.1) * 5.0))) < 1e-15);
}

TEST_CASE("scattering roots reproduce the unbroken spectrum") {
    const auto roots = scattering_roots(6, 0.0, 0.5);
    REQUIRE(roots.size() == 6);
    const auto vals = eigenvalues(build_h_w(6, 0.5));
    std::vector<double> e;
    for (const auto& r : roots) e.push_back(r.energy.real());
    std::sort(e.begin(), e.end());
    for (int i = 0; i < 6; ++i) CHECK(std::abs(e[i] - vals[i].real()) < 1e-9);
}

TEST_CASE("double root at k = pi/2, gamma = 1") {
    for (int n : {2, 4, 6, 8, 10}) {
        const auto [k, g] = scattering_ep(n);
        CHECK(std::abs(k - std::numbers::pi / 2) < 1e-10);
        CHECK(std::abs(g - 1.0) < 1e-10);
        CHECK(std::abs(scattering_F(k, n, g)) < 1e-12);
        CHECK(std::abs(scattering_dF(k, n, g)) < 1e-12);
    }
    CHECK_THROWS_AS(scattering_ep(5), ConfigError);
}

TEST_CASE("broken pair energies") {
    for (int n : {6, 8}) {
        for (double g : {1.05, 1.2, 1.5}) {
            const auto root = broken_pair_kappa(n, g);
            CHECK(root.residual < 1e-14);
            double im_max = 0;
            int complex_count = 0;
            for (auto e : eigenvalues(build_h_w(n, g))) {
                if (std::abs(e.imag()) > 1e-8) {
                    ++complex_count;
                    CHECK(std::abs(e.real()) < 1e-8);
                }
                im_max = std::max(im_max, e.imag());
            }
            CHECK(complex_count == 2);
            CHECK(std::abs(im_max - root.energy.imag()) < 1e-8);
        }
    }
    CHECK(broken_pair_kappa(6, 1.0).momentum == cd(0, 0));
    CHECK_THROWS_AS(broken_pair_kappa(6, 0.9), NoRoot);
    // Values from an independent high-precision solve.
    CHECK(broken_pair_kappa(6, 1.2).energy.imag() == doctest::Approx(0.4305012).epsilon(1e-7));
    CHECK(broken_pair_kappa(8, 1.05).energy.imag() == doctest::Approx(0.16744731).epsilon(1e-7));
}

TEST_CASE("bound roots of the digamma function") {
    CHECK(bound_digamma(0.0, 6, 3.0, 0.4) == 0.0);
    CHECK(bound_digamma(0.3, 6, 0.0, 0.4) ==
          doctest::Approx(std::sinh(7 * 0.3) + 0.16 * std::sinh(5 * 0.3)));
    const auto roots = bound_roots(6, 3.0, 0.0);
    REQUIRE(roots.size() == 2);
    auto vals = eigenvalues(build_h_eq(xy(6, 3.0, 0.0)));
    std::vector<double> top{vals[4].real(), vals[5].real()}, got;
    for (const auto& r : roots) got.push_back(r.energy.real());
    std::sort(got.begin(), got.end());
    CHECK(std::abs(got[0] - top[0]) < 1e-8);
    CHECK(std::abs(got[1] - top[1]) < 1e-8);
}

TEST_CASE("Bethe roots cover the whole spectrum") {
    for (double v : {0.0, 3.0, -3.0, 10.0})
        for (double g : {0.0, 0.3, 0.7, 1.3}) {
            const auto roots = bethe_spectrum(6, v, g);
            const auto vals = eigenvalues(build_h_eq(xy(6, v, g)));
            REQUIRE(roots.size() == vals.size());
            for (std::size_t i = 0; i < vals.size(); ++i) CHECK(std::abs(roots[i].energy - vals[i]) < 1e-8);
        }
}

TEST_CASE("Bethe eigenstates") {
    for (const auto& r : scattering_roots(6, 0.0, 0.5)) {
        const auto psi = bethe_scattering_state(r.momentum, 6, 0.5);
        CHECK(residual(build_h_w(6, 0.5), psi, r.energy) < 1e-8);
    }
    // Hermitian limit: standing wave sin(kj).
    const auto r0 = scattering_roots(6, 0.0, 0.0).front();
    const auto psi0 = bethe_scattering_state(r0.momentum, 6, 0.0);
    CVector sw(6);
    for (int j = 1; j <= 6; ++j) sw[j - 1] = std::sin(r0.momentum.real() * j);
    const StateVector sws(psi0.basis(), sw);
    CHECK(fidelity(sws.normalized(), psi0) == doctest::Approx(1.0).epsilon(1e-12));
    // At the EP the plane wave is the W state.
    const auto wpsi = bethe_scattering_state(std::numbers::pi / 2, 6, 1.0);
    CHECK(fidelity(target_state(TargetName::W, 6), wpsi) == doctest::Approx(1.0).epsilon(1e-12));
    // Complex roots carry bound and broken eigenstates too.
    for (const auto& r : bethe_spectrum(6, 3.0, 0.7)) {
        if (r.branch != RootBranch::Complex) continue;
        const auto psi = bethe_scattering_state(r.momentum, 6, 0.7, 3.0);
        CHECK(residual(build_h_eq(xy(6, 3.0, 0.7)), psi, r.energy) < 1e-8);
    }
    CHECK_THROWS_AS(bethe_scattering_state(0.3, 6, 0.5), ConfigError);
}

TEST_CASE("closed-form boundary against frozen high-precision values") {
    // Independent arbitrary-precision solve of the Bethe double-root conditions.
    const struct {
        int n;
        double v, g;
    } table[] = {{6, 10, 9.90000001257e-5},  {6, 30, 1.23319615912e-6}, {8, 10, 9.9e-7},
                 {8, 30, 1.37021795458e-9},  {10, 10, 9.9e-9},          {10, 30, 1.52246439398e-12}};
    for (const auto& row : table) CHECK(epts_gamma(row.n, row.v) == doctest::Approx(row.g).epsilon(1e-9));
    CHECK(std::abs(epts_residual(6, 10.0, epts_gamma(6, 10.0))) < 1e-9);
    CHECK(epts_gamma(6, -10.0) == epts_gamma(6, 10.0));
    CHECK_THROWS_AS(epts_gamma(6, 1.5), ConfigError);
}

TEST_CASE("closed-form boundary against diagonalization") {
    for (int n : {6, 8})
        for (double v : {10.0, 30.0}) {
            const auto chk = compare_exact_boundary(n, v);
            CHECK_FALSE(chk.mismatch);
            CHECK(chk.rel_gap < kBoundaryAgreement);
            CHECK(exact_boundary_gamma(n, v) == chk.gamma_exact);
        }
}

TEST_CASE("eta factors") {
    const auto e = eta_factors(6, 50.0, 1e-6);
    CHECK(e.eta_plus == doctest::Approx(1 + 2500.0));
    CHECK(e.eta_minus == doctest::Approx(1 - 2500.0));
    CHECK(e.c == doctest::Approx(50.0 / 2 + 1.0 / 100).epsilon(1e-4));
    CHECK(e.f_factor == doctest::Approx(50.0 * (12 * e.eta_plus + e.eta_minus) / (24 * (e.eta_plus - 1))));
}

TEST_CASE("effective two-site model") {
    const auto m = effective_model(6, 100.0);
    CHECK(m.theta == doctest::Approx(std::numbers::pi / 10));
    REQUIRE(m.phi.size() == 4);
    for (int n = 2; n <= 5; ++n) CHECK(m.phi[n - 2] == doctest::Approx(2 * (n - 1) * m.theta));
    CHECK(std::abs(m.v_eff - 0.01) < 1e-3);
    for (int n : {6, 8, 10})
        for (double v : {2.5, 10.0, 100.0}) {
            const auto e = effective_model(n, v);
            CHECK(e.lambda_eff == doctest::Approx(1.0 / cheb_u(n - 2, v / 2)).epsilon(1e-9));
            CHECK(e.v_eff == doctest::Approx(cheb_u(n - 3, v / 2) / cheb_u(n - 2, v / 2)).epsilon(1e-9));
        }
    // V^2 lambda_eff tends to the closed-form Omega.
    for (int n : {6, 8, 10}) CHECK(std::abs(1e8 * effective_model(n, 1e4).lambda_eff - omega_closed_form(n)) < 1e-6);
    CHECK_THROWS_AS(effective_model(4, 10.0), ConfigError);
    CHECK_THROWS_AS(effective_model(6, 1.0), ConfigError);
}

TEST_CASE("effective spectrum") {
    const auto m = effective_model(6, 10.0);
    const auto s0 = effective_spectrum(6, 10.0, 0.0);
    CHECK(std::abs(s0.eigenvalues.first - (10.0 + m.v_eff - m.lambda_eff)) < 1e-14);
    CHECK(std::abs(s0.eigenvalues.second - (10.0 + m.v_eff + m.lambda_eff)) < 1e-14);
    CHECK_FALSE(s0.coalescent.has_value());
    const double gc = perturbative_boundary(6, 10.0);
    const auto sc = effective_spectrum(6, 10.0, gc);
    CHECK(std::abs(sc.eigenvalues.first - sc.eigenvalues.second) < 1e-12);
    REQUIRE(sc.coalescent.has_value());
    CHECK(fidelity(target_state(TargetName::Bell, 6), *sc.coalescent) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("perturbative boundary") {
    CHECK(perturbative_boundary(6, 10.0) == doctest::Approx(1.0 / cheb_u(4, 5.0)));
    const double ratio = asymptotic_boundary(6, 10.0) / asymptotic_boundary(6, 20.0);
    if (asymptotic_boundary(6, 20.0) > 0) CHECK(ratio == doctest::Approx(4.0));
    const double gap = std::abs(perturbative_boundary(6, 50.0) - epts_gamma(6, 50.0)) / epts_gamma(6, 50.0);
    CHECK(gap < 0.10);
}
