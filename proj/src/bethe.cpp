#include "epchain/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "epchain/analysis.hpp"
#include "epchain/models.hpp"

namespace epchain {
namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr int kScanSamples = 10000;
constexpr double kRootResidual = 1e-10;

void require_sites(int sites) {
    if (sites < 2) throw ConfigError("N must be at least 2");
}

double determinant_scale(cd k, int sites, double v, double gamma) {
    const double y = std::abs(k.imag());
    return std::cosh((sites + 1) * y) + 2 * std::abs(v) * std::cosh(sites * y) +
           (v * v + gamma * gamma) * std::cosh((sites - 1) * y);
}

double relative_residual(cd k, int sites, double v, double gamma) {
    return std::abs(scattering_determinant(k, sites, v, gamma)) / determinant_scale(k, sites, v, gamma);
}

cd determinant_derivative(cd k, int sites, double v, double gamma) {
    const double n = sites;
    return (n + 1) * std::cos(k * (n + 1)) - 2 * v * n * std::cos(k * n) +
           (v * v + gamma * gamma) * (n - 1) * std::cos(k * (n - 1));
}

double digamma_derivative(double kappa, int sites, double v, double gamma) {
    const double n = sites;
    return (n + 1) * std::cosh((n + 1) * kappa) - 2 * v * n * std::cosh(n * kappa) +
           (v * v + gamma * gamma) * (n - 1) * std::cosh((n - 1) * kappa);
}

double digamma_scale(double kappa, int sites, double v, double gamma) {
    return std::cosh((sites + 1) * kappa) + 2 * std::abs(v) * std::cosh(sites * kappa) +
           (v * v + gamma * gamma) * std::cosh((sites - 1) * kappa);
}

// Bisection on [a, b] with f(a) f(b) < 0, then Newton steps while they reduce |f|.
template <class F, class DF>
double bracketed_root(F f, DF df, double a, double b) {
    double fa = f(a);
    for (int it = 0; it < 200 && b - a > 4 * std::numeric_limits<double>::epsilon() * std::abs(b); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    double x = 0.5 * (a + b);
    double fx = f(x);
    for (int it = 0; it < 3; ++it) {
        const double d = df(x);
        if (d == 0.0) break;
        const double y = x - fx / d;
        const double fy = f(y);
        if (!(std::abs(fy) < std::abs(fx))) break;
        x = y;
        fx = fy;
    }
    return x;
}

template <class F>
std::vector<std::pair<double, double>> sign_changes(F f, double lo, double hi, int samples) {
    std::vector<std::pair<double, double>> out;
    const double h = (hi - lo) / samples;
    double xa = lo + h, fa = f(xa);
    for (int i = 2; i < samples; ++i) {
        const double xb = lo + i * h, fb = f(xb);
        if (fa == 0.0 || (fa < 0) != (fb < 0)) out.emplace_back(xa, xb);
        xa = xb;
        fa = fb;
    }
    return out;
}

bool lex_less(cd a, cd b) {
    if (std::abs(a.real() - b.real()) > 1e-12 * (1 + std::abs(a.real()))) return a.real() < b.real();
    return a.imag() < b.imag();
}

template <class Real>
struct EtaT {
    Real eta_plus, eta_minus, c, f;
    bool real_c;
};

template <class Real>
EtaT<Real> eta_t(int sites, const Real& v, const Real& gamma) {
    using std::sqrt;
    const Real n(sites);
    EtaT<Real> e;
    e.eta_plus = 1 + v * v + gamma * gamma;
    e.eta_minus = 1 - v * v - gamma * gamma;
    const Real q = 2 * n * e.eta_plus + e.eta_minus;
    e.f = v * q / (4 * n * (e.eta_plus - 1));
    const Real disc =
        1 - 4 * n * (e.eta_plus - 1) * (n * e.eta_minus * e.eta_minus + e.eta_plus * e.eta_minus + 4 * n * v * v) /
                (v * v * q * q);
    e.real_c = disc >= 0;
    e.c = e.real_c ? e.f * (1 + sqrt(disc)) : Real(0);
    return e;
}

HighReal epts_residual_high(int sites, const HighReal& v, const HighReal& gamma, bool& defined) {
    using std::pow;
    using std::sqrt;
    const auto e = eta_t<HighReal>(sites, v, gamma);
    defined = e.real_c && e.c >= 1;
    if (!defined) return HighReal(0);
    const HighReal s = sqrt(e.c * e.c - 1);
    const HighReal lhs = pow(e.c + s, 2 * sites);
    const HighReal num = e.eta_plus * e.c - 2 * v - e.eta_minus * s;
    const HighReal den = e.eta_plus * e.c - 2 * v + e.eta_minus * s;
    if (den == 0) {
        defined = false;
        return HighReal(0);
    }
    return (lhs - num / den) / lhs;
}

} // namespace

double scattering_F(double k, int sites, double gamma) {
    return std::sin(k * (sites + 1)) + gamma * gamma * std::sin(k * (sites - 1));
}

double scattering_dF(double k, int sites, double gamma) {
    return (sites + 1) * std::cos(k * (sites + 1)) + gamma * gamma * (sites - 1) * std::cos(k * (sites - 1));
}

cd scattering_determinant(cd k, int sites, double potential, double gamma) {
    const double n = sites;
    return std::sin(k * (n + 1)) - 2 * potential * std::sin(k * n) +
           (potential * potential + gamma * gamma) * std::sin(k * (n - 1));
}

double bound_digamma(double kappa, int sites, double potential, double gamma) {
    return std::sinh((sites + 1) * kappa) - 2 * potential * std::sinh(sites * kappa) +
           (potential * potential + gamma * gamma) * std::sinh((sites - 1) * kappa);
}

std::vector<BetheRoot> scattering_roots(int sites, double potential, double gamma) {
    require_sites(sites);
    auto f = [&](double k) { return scattering_determinant(cd(k, 0), sites, potential, gamma).real(); };
    auto df = [&](double k) { return determinant_derivative(cd(k, 0), sites, potential, gamma).real(); };
    std::vector<BetheRoot> out;
    for (auto [a, b] : sign_changes(f, 0.0, kPi, kScanSamples)) {
        const double k = bracketed_root(f, df, a, b);
        const double r = relative_residual(cd(k, 0), sites, potential, gamma);
        if (r > kRootResidual) continue;
        out.push_back({RootBranch::Scattering, cd(k, 0), cd(2 * std::cos(k), 0), r});
    }
    return out;
}

std::vector<BetheRoot> bound_roots(int sites, double potential, double gamma) {
    require_sites(sites);
    // Bound energies are bounded by the Gershgorin radius of H_eq.
    const double emax = std::abs(potential) + gamma + 2.0;
    const double kmax = std::acosh(std::max(emax / 2, 1.0)) + 1.0;
    std::vector<BetheRoot> out;
    for (int sign : {+1, -1}) {
        const double v = sign * potential;
        auto f = [&](double x) { return bound_digamma(x, sites, v, gamma) / std::cosh((sites + 1) * x); };
        auto df = [&](double x) {
            const double c = std::cosh((sites + 1) * x);
            return digamma_derivative(x, sites, v, gamma) / c -
                   bound_digamma(x, sites, v, gamma) * (sites + 1) * std::sinh((sites + 1) * x) / (c * c);
        };
        for (auto [a, b] : sign_changes(f, 0.0, kmax, kScanSamples)) {
            const double kappa = bracketed_root(f, df, a, b);
            const double scale = digamma_scale(kappa, sites, v, gamma);
            const double r = std::abs(bound_digamma(kappa, sites, v, gamma)) / scale;
            if (r > kRootResidual) continue;
            out.push_back({sign > 0 ? RootBranch::BoundUpper : RootBranch::BoundLower, cd(kappa, 0),
                           cd(sign * 2 * std::cosh(kappa), 0), r});
        }
    }
    return out;
}

std::vector<BetheRoot> bethe_spectrum(int sites, double potential, double gamma) {
    require_sites(sites);
    std::vector<BetheRoot> roots = scattering_roots(sites, potential, gamma);
    for (auto& r : bound_roots(sites, potential, gamma)) roots.push_back(r);

    auto known = [&](cd e) {
        return std::any_of(roots.begin(), roots.end(),
                           [&](const BetheRoot& r) { return std::abs(r.energy - e) < 1e-8 * (1 + std::abs(e)); });
    };

    if (roots.size() < static_cast<std::size_t>(sites)) {
        // Remaining roots are off the real k axis. Energies 2cos k with Im k > 0 and
        // Re k in (0, 2π) cover each complex eigenvalue once.
        const double emax = std::abs(potential) + gamma + 2.0;
        const double kmax = std::acosh(std::max(emax / 2, 1.0)) + 1.0;
        const int nre = 48, nim = 24;
        for (int i = 0; i < nre && roots.size() < static_cast<std::size_t>(sites); ++i) {
            for (int j = 1; j <= nim && roots.size() < static_cast<std::size_t>(sites); ++j) {
                cd k(2 * kPi * (i + 0.5) / nre, kmax * j / nim);
                bool converged = false;
                for (int it = 0; it < 100; ++it) {
                    const cd d = determinant_derivative(k, sites, potential, gamma);
                    if (d == 0.0) break;
                    const cd step = scattering_determinant(k, sites, potential, gamma) / d;
                    k -= step;
                    if (std::abs(step) < 1e-15 * (1 + std::abs(k))) {
                        converged = true;
                        break;
                    }
                }
                if (!converged || !std::isfinite(k.real()) || !std::isfinite(k.imag())) continue;
                // Trivial zeros at k = 0, π, 2π carry no eigenvector.
                if (std::abs(std::sin(k)) < 1e-6) continue;
                const double r = relative_residual(k, sites, potential, gamma);
                if (r > kRootResidual) continue;
                const cd e = 2.0 * std::cos(k);
                if (known(e)) continue;
                roots.push_back({std::abs(e.imag()) > 0 ? RootBranch::Complex : RootBranch::Scattering, k, e, r});
            }
        }
    }
    if (roots.size() != static_cast<std::size_t>(sites)) {
        throw NoRoot("Bethe roots: found " + std::to_string(roots.size()) + " of " + std::to_string(sites) +
                     " eigenvalues");
    }
    std::sort(roots.begin(), roots.end(), [](const BetheRoot& a, const BetheRoot& b) { return lex_less(a.energy, b.energy); });
    return roots;
}

std::pair<double, double> scattering_ep(int sites) {
    require_sites(sites);
    if (sites % 2 != 0) throw ConfigError("scattering_ep needs even N");
    const double np = sites + 1, nm = sites - 1;
    double k = kPi / 2 - 0.05, g = 0.9;
    for (int it = 0; it < 100; ++it) {
        const double f = std::sin(np * k) + g * std::sin(nm * k);
        const double fp = np * std::cos(np * k) + g * nm * std::cos(nm * k);
        if (std::abs(f) < 1e-15 && std::abs(fp) < 1e-14) return {k, std::sqrt(g)};
        // Jacobian of (F, dF/dk) with respect to (k, g = γ²).
        const double a = fp, b = std::sin(nm * k);
        const double c = -np * np * std::sin(np * k) - g * nm * nm * std::sin(nm * k), d = nm * std::cos(nm * k);
        const double det = a * d - b * c;
        if (det == 0.0) break;
        k -= (d * f - b * fp) / det;
        g -= (a * fp - c * f) / det;
    }
    throw NonConvergence("scattering_ep: Newton iteration did not converge for N=" + std::to_string(sites));
}

BetheRoot broken_pair_kappa(int sites, double gamma) {
    require_sites(sites);
    if (!(gamma >= 1.0)) throw NoRoot("broken_pair_kappa: gamma <= 1 gives a real spectrum");
    if (gamma == 1.0) return {RootBranch::Complex, cd(0, 0), cd(0, 0), 0.0};
    const double g2 = gamma * gamma;
    // cosh((N+1)κ)/cosh((N-1)κ) increases from 1, so the root is unique.
    auto f = [&](double x) { return g2 - std::cosh((sites + 1) * x) / std::cosh((sites - 1) * x); };
    double hi = 1.0;
    while (f(hi) > 0) hi *= 2;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 2 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double m = 0.5 * (lo + hi);
        (f(m) > 0 ? lo : hi) = m;
    }
    const double kappa = 0.5 * (lo + hi);
    const double a = g2 * std::cosh((sites - 1) * kappa), b = std::cosh((sites + 1) * kappa);
    return {RootBranch::Complex, cd(kappa, 0), cd(0, 2 * std::sinh(kappa)), std::abs(a - b) / (a + b)};
}

StateVector bethe_scattering_state(cd k, int sites, double gamma, double potential) {
    require_sites(sites);
    if (relative_residual(k, sites, potential, gamma) > kRootResidual)
        throw ConfigError("bethe_scattering_state: k is not a root of the scattering determinant");
    const cd u(potential, gamma), w(potential, -gamma);
    const cd i(0, 1);
    const double n = sites;
    // Boundary conditions f_0 = (V + iγ) f_1 and f_{N+1} = (V - iγ) f_N.
    const cd m00 = 1.0 - u * std::exp(i * k), m01 = 1.0 - u * std::exp(-i * k);
    const cd m10 = std::exp(i * k * (n + 1)) - w * std::exp(i * k * n);
    const cd m11 = std::exp(-i * k * (n + 1)) - w * std::exp(-i * k * n);
    // Singular values of the 2x2 boundary matrix.
    const double fro2 = std::norm(m00) + std::norm(m01) + std::norm(m10) + std::norm(m11);
    const double det = std::abs(m00 * m11 - m01 * m10);
    const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4 * det * det));
    const double smax = std::sqrt(0.5 * (fro2 + disc));
    if (!(smax > 1e-12)) throw NullSpaceRankError("boundary matrix vanishes; null space is two-dimensional");
    cd a, b;
    if (std::norm(m00) + std::norm(m01) >= std::norm(m10) + std::norm(m11)) {
        a = m01;
        b = -m00;
    } else {
        a = m11;
        b = -m10;
    }
    CVector amp(static_cast<std::size_t>(sites));
    for (int j = 1; j <= sites; ++j) amp[j - 1] = a * std::exp(i * k * double(j)) + b * std::exp(-i * k * double(j));
    return StateVector(Basis{BasisKind::MagnonPosition, sites}, std::move(amp)).normalized();
}

EtaFactors eta_factors(int sites, double potential, double gamma) {
    require_sites(sites);
    const auto e = eta_t<double>(sites, potential, gamma);
    return {e.eta_plus, e.eta_minus, e.real_c ? e.c : std::nan(""), e.f};
}

double epts_residual(int sites, double potential, double gamma) {
    bool defined = false;
    const HighReal r = epts_residual_high(sites, HighReal(std::abs(potential)), HighReal(gamma), defined);
    return defined ? static_cast<double>(r) : std::nan("");
}

double epts_gamma(int sites, double potential) {
    require_sites(sites);
    const double v = std::abs(potential);
    if (!(v > 2.0)) throw ConfigError("exact boundary needs |V| > 2");
    const HighReal hv(v);
    auto eval = [&](double log_g, bool& defined) {
        return epts_residual_high(sites, hv, exp(HighReal(log_g)), defined);
    };
    const double lo = std::log(1e-40), hi = std::log(10.0);
    const int samples = 2000;
    bool da = false;
    double xa = lo;
    HighReal fa = eval(xa, da);
    for (int i = 1; i <= samples; ++i) {
        const double xb = lo + (hi - lo) * i / samples;
        bool db = false;
        const HighReal fb = eval(xb, db);
        if (da && db && (fa < 0) != (fb < 0)) {
            double a = xa, b = xb;
            HighReal fl = fa;
            for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
                const double m = 0.5 * (a + b);
                bool dm = false;
                const HighReal fm = eval(m, dm);
                if (!dm) break;
                if ((fm < 0) == (fl < 0)) {
                    a = m;
                    fl = fm;
                } else {
                    b = m;
                }
            }
            bool dr = false;
            const double root = 0.5 * (a + b);
            const HighReal fr = eval(root, dr);
            // A sign change across a pole of the right-hand side is not a root.
            if (dr && abs(fr) < HighReal(1e-6)) return std::exp(root);
        }
        xa = xb;
        fa = fb;
        da = db;
    }
    throw NoBracket("exact boundary: no sign change for gamma in [1e-40, 10] at N=" + std::to_string(sites) +
                    ", V=" + std::to_string(potential));
}

ExactBoundaryCheck compare_exact_boundary(int sites, double potential) {
    ExactBoundaryCheck out;
    out.gamma_exact = epts_gamma(sites, potential);
    ModelSpec spec;
    spec.sites = sites;
    out.gamma_numeric = numeric_boundary_gamma(spec, potential);
    out.rel_gap = std::abs(out.gamma_exact - out.gamma_numeric) / out.gamma_numeric;
    out.mismatch = !(out.rel_gap <= kBoundaryAgreement);
    return out;
}

double exact_boundary_gamma(int sites, double potential) {
    const auto check = compare_exact_boundary(sites, potential);
    if (check.mismatch) {
        throw ValidationMismatch("exact boundary " + std::to_string(check.gamma_exact) + " vs numeric " +
                                 std::to_string(check.gamma_numeric) + " (relative gap " +
                                 std::to_string(check.rel_gap) + ")");
    }
    return check.gamma_exact;
}

double omega_closed_form(int sites) {
    if (sites < 6 || sites % 2 != 0) throw ConfigError("Omega needs even N >= 6");
    const double n = sites;
    const double theta = kPi / (2 * (n - 1));
    const double d1 = std::sin((n - 4) * theta), d2 = std::sin(n * theta);
    if (std::abs(d1) < 1e-12 || std::abs(d2) < 1e-12) throw DegenerateOmega("Omega denominator vanishes");
    const double sign = (sites / 2) % 2 == 0 ? 1.0 : -1.0;
    return std::cos((n - 4) * kPi / 2) * std::sin((n - 4) * (n - 2) * theta) / ((n - 1) * d1) -
           sign * std::sin((n - 2) * n * theta) / ((n - 1) * d2);
}

EffectiveModel effective_model(int sites, double potential) {
    if (sites < 6 || sites % 2 != 0) throw ConfigError("effective model needs even N >= 6");
    if (!(std::abs(potential) > 2.0)) throw ConfigError("effective model needs |V| > 2");
    EffectiveModel m;
    m.sites = sites;
    m.potential = potential;
    m.theta = kPi / (2.0 * (sites - 1));
    m.omega = omega_closed_form(sites);
    for (int n = 2; n <= sites - 1; ++n) {
        const double phi = 2.0 * (n - 1) * m.theta;
        m.phi.push_back(phi);
        const double den = potential - 2 * std::cos(phi);
        if (std::abs(den) < 1e-12) throw DegenerateOmega("V - 2cos(phi_n) vanishes");
        m.v_eff += std::sin(phi) * std::sin(phi) / den;
        m.lambda_eff += std::sin(phi) * std::sin((sites - 2) * phi) / den;
    }
    m.v_eff *= 2.0 / (sites - 1);
    m.lambda_eff *= 2.0 / (sites - 1);
    return m;
}

EffectiveSpectrum effective_spectrum(int sites, double potential, double gamma) {
    const EffectiveModel m = effective_model(sites, potential);
    const double lam = m.lambda_eff;
    const cd root = std::sqrt(cd(lam * lam - gamma * gamma, 0));
    const double center = potential + m.v_eff;
    const Basis basis{BasisKind::MagnonPosition, sites};
    auto state = [&](cd first) {
        CVector v(static_cast<std::size_t>(sites));
        v.front() = first;
        v.back() = lam;
        return StateVector(basis, std::move(v)).normalized();
    };
    const cd ig(0, gamma);
    EffectiveSpectrum out{{center - root, center + root}, {state(ig - root), state(ig + root)}, std::nullopt};
    if (std::abs(gamma - std::abs(lam)) <= 1e-9 * std::abs(lam)) out.coalescent = state(ig);
    return out;
}

double perturbative_boundary(int sites, double potential) {
    return std::abs(effective_model(sites, potential).lambda_eff);
}

double asymptotic_boundary(int sites, double potential) {
    if (!(std::abs(potential) > 2.0)) throw ConfigError("asymptotic boundary needs |V| > 2");
    return std::abs(omega_closed_form(sites)) / (potential * potential);
}

} // namespace epchain
