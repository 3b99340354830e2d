#include "epchain/eig.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "epchain/lu.hpp"

namespace epchain {
namespace {

template <class Real>
using C = std::complex<Real>;

/// Diagonal similarity D^{-1} A D with power-of-two entries that roughly
/// equalizes row and column norms. Returns the diagonal of D.
template <class Real>
std::vector<Real> balance_in_place(BasicMatrix<Real>& a) {
    const std::size_t n = a.dim();
    std::vector<Real> scale(n, Real(1));
    const Real radix(2);
    const Real radix2(4);
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            Real c(0);
            Real r(0);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += abs1(a(j, i));
                r += abs1(a(i, j));
            }
            if (c == Real(0) || r == Real(0)) continue;
            Real g = r / radix;
            Real f(1);
            const Real s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix2;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix2;
            }
            if ((c + r) / f < Real(0.95) * s) {
                done = false;
                scale[i] *= f;
                const Real inv = Real(1) / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
    return scale;
}

/// Householder reduction to upper Hessenberg form; accumulates Q when given.
template <class Real>
void hessenberg_in_place(BasicMatrix<Real>& a, BasicMatrix<Real>* q) {
    using std::abs;
    using std::sqrt;
    const std::size_t n = a.dim();
    if (n < 3) return;
    std::vector<C<Real>> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t len = n - k - 1;
        Real tail2(0);
        for (std::size_t i = 0; i < len; ++i) {
            v[i] = a(k + 1 + i, k);
            if (i > 0) tail2 += abs2(v[i]);
        }
        if (tail2 == Real(0)) continue;
        const Real alpha2 = abs2(v[0]) + tail2;
        const Real alpha = sqrt(alpha2);
        const Real x0abs = abs(v[0]);
        const C<Real> phase = x0abs == Real(0) ? C<Real>(1) : v[0] / x0abs;
        const C<Real> beta = -phase * alpha;
        v[0] -= beta;
        const Real vnorm2 = abs2(v[0]) + tail2;
        const Real two_over = Real(2) / vnorm2;

        for (std::size_t j = k; j < n; ++j) {
            C<Real> s(0);
            for (std::size_t i = 0; i < len; ++i) s += std::conj(v[i]) * a(k + 1 + i, j);
            s *= two_over;
            for (std::size_t i = 0; i < len; ++i) a(k + 1 + i, j) -= v[i] * s;
        }
        for (std::size_t i = 0; i < n; ++i) {
            C<Real> s(0);
            for (std::size_t j = 0; j < len; ++j) s += a(i, k + 1 + j) * v[j];
            s *= two_over;
            for (std::size_t j = 0; j < len; ++j) a(i, k + 1 + j) -= s * std::conj(v[j]);
        }
        if (q) {
            for (std::size_t i = 0; i < n; ++i) {
                C<Real> s(0);
                for (std::size_t j = 0; j < len; ++j) s += (*q)(i, k + 1 + j) * v[j];
                s *= two_over;
                for (std::size_t j = 0; j < len; ++j) (*q)(i, k + 1 + j) -= s * std::conj(v[j]);
            }
        }
        a(k + 1, k) = beta;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = C<Real>(0);
    }
}

/// Rotation R = [[c, s], [-conj(s), c]] with R [f; g] = [r; 0].
template <class Real>
struct Givens {
    Real c;
    C<Real> s;
};

template <class Real>
Givens<Real> make_givens(const C<Real>& f, const C<Real>& g) {
    using std::abs;
    using std::sqrt;
    if (g == C<Real>(0)) return {Real(1), C<Real>(0)};
    if (f == C<Real>(0)) return {Real(0), std::conj(g) / abs(g)};
    const Real fa = abs(f);
    const Real ga = abs(g);
    const Real scale = std::max(fa, ga);
    const Real rho = scale * sqrt((fa / scale) * (fa / scale) + (ga / scale) * (ga / scale));
    const C<Real> fphase = f / fa;
    return {fa / rho, fphase * std::conj(g) / rho};
}

template <class Real>
class SchurSolver {
public:
    SchurSolver(BasicMatrix<Real>& t, BasicMatrix<Real>* q, int max_per_eigenvalue)
        : t_(t), q_(q), max_per_eigenvalue_(max_per_eigenvalue) {}

    void run() {
        const std::size_t n = t_.dim();
        if (n == 0) return;
        norm_ = t_.frobenius_norm();
        std::size_t iu = n - 1;
        int iter = 0;
        long total = 0;
        const long cap = static_cast<long>(max_per_eigenvalue_) * static_cast<long>(n);
        while (true) {
            while (iu > 0) {
                if (negligible(iu - 1)) {
                    t_(iu, iu - 1) = C<Real>(0);
                    iter = 0;
                    --iu;
                } else {
                    break;
                }
            }
            if (iu == 0) break;
            ++iter;
            ++total;
            if (total > cap) {
                throw NonConvergence("complex QR iteration did not converge after " + std::to_string(total) +
                                     " sweeps (dimension " + std::to_string(n) + ")");
            }
            std::size_t il = iu - 1;
            while (il > 0 && !negligible(il - 1)) --il;
            // The sweep below never touches column il - 1 again; a stale coupling
            // there would be inconsistent with the rotated block.
            if (il > 0) t_(il, il - 1) = C<Real>(0);
            sweep(il, iu, shift(iu, iter));
        }
    }

private:
    bool negligible(std::size_t i) {
        Real tst = abs1(t_(i, i)) + abs1(t_(i + 1, i + 1));
        if (tst == Real(0)) tst = norm_;
        return abs1(t_(i + 1, i)) <= epsilon_of<Real>() * tst;
    }

    C<Real> shift(std::size_t iu, int iter) {
        using std::sqrt;
        if (iter % 10 == 0) {
            Real extra = abs1(t_(iu, iu - 1));
            if (iu >= 2) extra += abs1(t_(iu - 1, iu - 2));
            return t_(iu, iu) + C<Real>(Real(0.75) * extra, Real(0));
        }
        const C<Real> a = t_(iu - 1, iu - 1);
        const C<Real> b = t_(iu - 1, iu);
        const C<Real> c = t_(iu, iu - 1);
        const C<Real> d = t_(iu, iu);
        Real scale = std::max({abs1(a), abs1(b), abs1(c), abs1(d)});
        if (scale == Real(0)) return C<Real>(0);
        const C<Real> as = a / scale, bs = b / scale, cs = c / scale, ds = d / scale;
        const C<Real> half = (as - ds) / Real(2);
        const C<Real> disc = sqrt(half * half + bs * cs);
        const C<Real> mid = (as + ds) / Real(2);
        const C<Real> e1 = mid + disc;
        const C<Real> e2 = mid - disc;
        return scale * (abs1(e1 - ds) < abs1(e2 - ds) ? e1 : e2);
    }

    /// T <- R T R^H on rows/columns (i, i+1); Q <- Q R^H.
    void rotate(std::size_t i, const Givens<Real>& g, std::size_t iu, std::size_t col_begin) {
        const std::size_t n = t_.dim();
        const bool full = q_ != nullptr;
        const std::size_t col_end = full ? n : iu + 1;
        for (std::size_t j = col_begin; j < col_end; ++j) {
            const C<Real> a = t_(i, j);
            const C<Real> b = t_(i + 1, j);
            t_(i, j) = g.c * a + g.s * b;
            t_(i + 1, j) = -std::conj(g.s) * a + g.c * b;
        }
        const std::size_t row_end = std::min(i + 2, iu) + 1;
        const std::size_t row_begin = full ? 0 : row_lo_;
        for (std::size_t k = row_begin; k < row_end; ++k) {
            const C<Real> a = t_(k, i);
            const C<Real> b = t_(k, i + 1);
            t_(k, i) = g.c * a + std::conj(g.s) * b;
            t_(k, i + 1) = -g.s * a + g.c * b;
        }
        if (q_) {
            for (std::size_t k = 0; k < n; ++k) {
                const C<Real> a = (*q_)(k, i);
                const C<Real> b = (*q_)(k, i + 1);
                (*q_)(k, i) = g.c * a + std::conj(g.s) * b;
                (*q_)(k, i + 1) = -g.s * a + g.c * b;
            }
        }
    }

    void sweep(std::size_t il, std::size_t iu, const C<Real>& mu) {
        row_lo_ = il;
        auto g = make_givens<Real>(t_(il, il) - mu, t_(il + 1, il));
        rotate(il, g, iu, il);
        for (std::size_t i = il + 1; i < iu; ++i) {
            g = make_givens<Real>(t_(i, i - 1), t_(i + 1, i - 1));
            rotate(i, g, iu, i - 1);
            t_(i + 1, i - 1) = C<Real>(0);
        }
    }

    BasicMatrix<Real>& t_;
    BasicMatrix<Real>* q_;
    int max_per_eigenvalue_;
    Real norm_{0};
    std::size_t row_lo_ = 0;
};

/// Back substitution for eigenvectors of the upper triangular Schur factor.
template <class Real>
BasicVector<Real> triangular_eigenvector(const BasicMatrix<Real>& t, std::size_t k, const Real& tnorm) {
    using std::abs;
    BasicVector<Real> x(t.dim(), C<Real>(0));
    x[k] = C<Real>(1);
    const C<Real> lambda = t(k, k);
    const Real eps = epsilon_of<Real>();
    Real smin = std::max(eps * abs1(lambda), eps * tnorm);
    if (smin == Real(0)) smin = std::numeric_limits<Real>::min();
    const Real big = Real(1) / (eps * eps);
    for (std::size_t ii = k; ii-- > 0;) {
        C<Real> s(0);
        for (std::size_t j = ii + 1; j <= k; ++j) s += t(ii, j) * x[j];
        C<Real> d = t(ii, ii) - lambda;
        if (abs1(d) < smin) d = C<Real>(smin);
        x[ii] = -s / d;
        const Real mag = abs1(x[ii]);
        if (mag > big) {
            const Real inv = Real(1) / mag;
            for (std::size_t j = ii; j <= k; ++j) x[j] *= inv;
        }
    }
    return x;
}

template <class Real>
Real residual_of(const BasicMatrix<Real>& a, const BasicVector<Real>& v, const C<Real>& lambda) {
    auto av = a * v;
    for (std::size_t i = 0; i < av.size(); ++i) av[i] -= lambda * v[i];
    return norm2(av);
}

template <class Real>
void normalize(BasicVector<Real>& v) {
    const Real nrm = norm2(v);
    if (nrm > Real(0))
        for (auto& z : v) z /= nrm;
}

/// A few steps of shifted inverse iteration to tighten a poor eigenvector.
template <class Real>
void polish(const BasicMatrix<Real>& a, BasicVector<Real>& v, const C<Real>& lambda, Real& residual, const Real& tol) {
    const std::size_t n = a.dim();
    const Real anorm = a.frobenius_norm();
    const Real nudge = std::max(epsilon_of<Real>() * (Real(1) + anorm), std::numeric_limits<Real>::min());
    BasicMatrix<Real> shifted = a;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= lambda + C<Real>(nudge);
    LuDecomposition<Real> lu(shifted);
    if (lu.singular()) return;
    for (int it = 0; it < 3 && residual > tol; ++it) {
        auto y = lu.solve(v);
        normalize(y);
        if (!is_finite(y[0].real())) return;
        const Real r = residual_of(a, y, lambda);
        if (r < residual) {
            v = std::move(y);
            residual = r;
        } else {
            return;
        }
    }
}

template <class Real>
struct RawEig {
    std::vector<C<Real>> values;
    std::vector<BasicVector<Real>> vectors;
};

template <class Real>
RawEig<Real> eig_unsorted(const BasicMatrix<Real>& m, bool vectors, bool balance, int max_per_eigenvalue) {
    if (m.dim() == 0) throw ConfigError("eig: empty matrix");
    if (!m.all_finite()) throw ConfigError("eig: matrix has non-finite entries");
    const std::size_t n = m.dim();
    BasicMatrix<Real> t = m;
    std::vector<Real> scale(n, Real(1));
    if (balance) scale = balance_in_place(t);
    BasicMatrix<Real> q;
    if (vectors) q = BasicMatrix<Real>::identity(n);
    hessenberg_in_place(t, vectors ? &q : nullptr);
    SchurSolver<Real> schur(t, vectors ? &q : nullptr, max_per_eigenvalue);
    schur.run();

    RawEig<Real> out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = t(i, i);
    if (!vectors) return out;

    const Real tnorm = t.frobenius_norm();
    out.vectors.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto x = triangular_eigenvector(t, k, tnorm);
        BasicVector<Real> v(n, C<Real>(0));
        for (std::size_t i = 0; i < n; ++i) {
            C<Real> s(0);
            for (std::size_t j = 0; j <= k; ++j) s += q(i, j) * x[j];
            v[i] = s * scale[i];
        }
        normalize(v);
        out.vectors.push_back(std::move(v));
    }
    return out;
}

} // namespace

template <class Real>
BasicSpectrum<Real> eig(const BasicMatrix<Real>& m, const EigOptions& options) {
    const bool vectors = options.want_vectors || options.want_left;
    auto raw = eig_unsorted(m, vectors, options.balance, options.max_iterations_per_eigenvalue);
    const std::size_t n = m.dim();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = raw.values[a];
        const auto& y = raw.values[b];
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    // Conjugate pairs often differ in the real part by rounding only. Values whose
    // real parts agree to a few ulps of the matrix norm are ordered by imaginary part.
    {
        using std::abs;
        const Real tie = Real(64) * epsilon_of<Real>() * (Real(1) + m.frobenius_norm());
        std::size_t start = 0;
        while (start < n) {
            std::size_t stop = start + 1;
            while (stop < n && abs(raw.values[order[stop]].real() - raw.values[order[start]].real()) <= tie) ++stop;
            std::stable_sort(order.begin() + start, order.begin() + stop, [&](std::size_t a, std::size_t b) {
                return raw.values[a].imag() < raw.values[b].imag();
            });
            start = stop;
        }
    }

    BasicSpectrum<Real> spec;
    spec.matrix_norm = m.frobenius_norm();
    spec.eigenvalues.reserve(n);
    for (auto i : order) spec.eigenvalues.push_back(raw.values[i]);
    if (!vectors) return spec;

    const Real tol = spec.residual_tolerance();
    spec.right_vectors.reserve(n);
    spec.residuals.reserve(n);
    for (auto i : order) {
        auto v = std::move(raw.vectors[i]);
        Real r = residual_of(m, v, raw.values[i]);
        if (r > tol) polish(m, v, raw.values[i], r, tol);
        if (r > tol) {
            throw NonConvergence("eigenvector residual " + std::to_string(to_double(r)) + " exceeds tolerance " +
                                 std::to_string(to_double(tol)));
        }
        spec.right_vectors.push_back(std::move(v));
        spec.residuals.push_back(r);
    }

    if (options.want_left) {
        const BasicMatrix<Real> adj = m.adjoint();
        auto left = eig_unsorted(adj, true, options.balance, options.max_iterations_per_eigenvalue);
        std::vector<bool> used(n, false);
        spec.left_vectors.resize(n);
        spec.left_residuals.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const C<Real> target = std::conj(spec.eigenvalues[k]);
            std::size_t best = n;
            Real best_dist(0);
            for (std::size_t j = 0; j < n; ++j) {
                if (used[j]) continue;
                const Real dist = abs1(left.values[j] - target);
                if (best == n || dist < best_dist) {
                    best = j;
                    best_dist = dist;
                }
            }
            used[best] = true;
            auto u = std::move(left.vectors[best]);
            Real r = residual_of(adj, u, target);
            if (r > tol) polish(adj, u, target, r, tol);
            if (r > tol) {
                throw NonConvergence("left eigenvector residual " + std::to_string(to_double(r)) +
                                     " exceeds tolerance");
            }
            spec.left_vectors[k] = std::move(u);
            spec.left_residuals[k] = r;
        }
    }
    if (!options.want_vectors) {
        spec.right_vectors.clear();
        spec.residuals.clear();
    }
    return spec;
}

template <class Real>
std::vector<std::complex<Real>> eigenvalues(const BasicMatrix<Real>& m, bool balance) {
    EigOptions opts;
    opts.want_vectors = false;
    opts.balance = balance;
    return eig(m, opts).eigenvalues;
}

template BasicSpectrum<double> eig(const BasicMatrix<double>&, const EigOptions&);
template BasicSpectrum<ExtendedReal> eig(const BasicMatrix<ExtendedReal>&, const EigOptions&);
template std::vector<std::complex<double>> eigenvalues(const BasicMatrix<double>&, bool);
template std::vector<std::complex<ExtendedReal>> eigenvalues(const BasicMatrix<ExtendedReal>&, bool);

} // namespace epchain
