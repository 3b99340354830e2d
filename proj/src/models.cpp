#include "epchain/models.hpp"

#include <bit>
#include <cmath>

namespace epchain {
namespace {

using cd = std::complex<double>;

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) throw ConfigError(std::string(name) + " must be finite");
}

void require_spin_cap(int sites) {
    if (sites > kMaxSpinSites) {
        throw DimensionCap("2^" + std::to_string(sites) + " states exceed the cap of 2^" +
                           std::to_string(kMaxSpinSites));
    }
}

// Bit of site l (1-based); site 1 is the most significant.
std::size_t site_bit(int sites, int l) { return std::size_t{1} << (sites - l); }

double sz(std::size_t state, int sites, int l) { return (state & site_bit(sites, l)) ? 1.0 : -1.0; }

constexpr double kInvSqrt2 = 0.70710678118654752440;

} // namespace

void ModelSpec::validate() const {
    require_finite(potential, "V");
    require_finite(gamma, "gamma");
    require_finite(coupling, "J");
    require_finite(field, "Delta");
    if (gamma < 0) throw ConfigError("gamma must be non-negative");
    const int min_sites = kind == ModelKind::TransverseIsing ? 1 : 2;
    if (sites < min_sites) throw ConfigError("N must be at least " + std::to_string(min_sites));
    if (kind != ModelKind::XYMagnon) require_spin_cap(sites);
}

Basis ModelSpec::basis() const {
    return Basis{kind == ModelKind::XYMagnon ? BasisKind::MagnonPosition : BasisKind::SpinZ, sites};
}

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::XYMagnon: return "xy";
    case ModelKind::XYFullSpace: return "xy_full";
    case ModelKind::TransverseIsing: return "ising";
    }
    return "?";
}

ComplexMatrix build_h_eq(const ModelSpec& spec) {
    ModelSpec s = spec;
    s.kind = ModelKind::XYMagnon;
    s.validate();
    const std::size_t n = static_cast<std::size_t>(s.sites);
    ComplexMatrix h(n);
    for (std::size_t l = 0; l + 1 < n; ++l) h(l, l + 1) = h(l + 1, l) = 1.0;
    h(0, 0) += cd(s.potential, s.gamma);
    h(n - 1, n - 1) += cd(s.potential, -s.gamma);
    return h;
}

ComplexMatrix build_h_w(int sites, double gamma) {
    ModelSpec s;
    s.sites = sites;
    s.gamma = gamma;
    return build_h_eq(s);
}

ComplexMatrix build_h_chain_full(const ModelSpec& spec) {
    ModelSpec s = spec;
    s.kind = ModelKind::XYFullSpace;
    s.validate();
    const int n = s.sites;
    const std::size_t dim = std::size_t{1} << n;
    ComplexMatrix h(dim);
    const cd first(s.potential, s.gamma), last(s.potential, -s.gamma);
    for (std::size_t a = 0; a < dim; ++a) {
        for (int l = 1; l < n; ++l) {
            const std::size_t bl = site_bit(n, l), br = site_bit(n, l + 1);
            if (((a & bl) != 0) != ((a & br) != 0)) h(a ^ bl ^ br, a) += 1.0;
        }
        if (a & site_bit(n, 1)) h(a, a) += first;
        if (a & site_bit(n, n)) h(a, a) += last;
    }
    return h;
}

namespace {

template <class Real>
BasicMatrix<Real> ising_matrix(const ModelSpec& spec) {
    ModelSpec s = spec;
    s.kind = ModelKind::TransverseIsing;
    s.validate();
    const int n = s.sites;
    const std::size_t dim = std::size_t{1} << n;
    const int bonds = s.boundary == IsingBoundary::Periodic ? n : n - 1;
    const Real j(s.coupling), g(s.gamma), delta(s.field);
    BasicMatrix<Real> h(dim);
    for (std::size_t a = 0; a < dim; ++a) {
        int zz = 0, z = 0;
        for (int b = 1; b <= bonds; ++b) zz += static_cast<int>(sz(a, n, b) * sz(a, n, b % n + 1));
        for (int l = 1; l <= n; ++l) {
            z += static_cast<int>(sz(a, n, l));
            h(a ^ site_bit(n, l), a) += delta;
        }
        h(a, a) += std::complex<Real>(-j * zz, g * z);
    }
    return h;
}

} // namespace

ComplexMatrix build_h_ghz(const ModelSpec& spec) { return ising_matrix<double>(spec); }

BasicMatrix<ExtendedReal> build_hamiltonian_extended(const ModelSpec& spec) {
    if (spec.kind == ModelKind::TransverseIsing) return ising_matrix<ExtendedReal>(spec);
    // XY entries are sums of at most two parameters and stay exact in double.
    return build_hamiltonian(spec).cast<ExtendedReal>();
}

ComplexMatrix build_hamiltonian(const ModelSpec& spec) {
    switch (spec.kind) {
    case ModelKind::XYMagnon: return build_h_eq(spec);
    case ModelKind::XYFullSpace: return build_h_chain_full(spec);
    case ModelKind::TransverseIsing: return build_h_ghz(spec);
    }
    throw ConfigError("unknown model kind");
}

ComplexMatrix total_sz(int sites) {
    require_spin_cap(sites);
    const std::size_t dim = std::size_t{1} << sites;
    ComplexMatrix m(dim);
    for (std::size_t a = 0; a < dim; ++a) m(a, a) = 2.0 * std::popcount(a) - sites;
    return m;
}

std::size_t magnon_index(int sites, int l) {
    if (l < 1 || l > sites) throw ConfigError("site index " + std::to_string(l) + " outside [1, N]");
    return site_bit(sites, l);
}

ComplexMatrix reduce_to_magnon_sector(const ComplexMatrix& h_full, int sites) {
    require_spin_cap(sites);
    if (sites < 1 || h_full.dim() != (std::size_t{1} << sites)) {
        throw DimensionMismatch("sector reduction: matrix of dimension " + std::to_string(h_full.dim()) +
                                " is not 2^" + std::to_string(sites));
    }
    // [J_z, H]_{ab} = (m_a - m_b) H_{ab} with m the diagonal of J_z.
    double comm2 = 0.0;
    for (std::size_t a = 0; a < h_full.dim(); ++a)
        for (std::size_t b = 0; b < h_full.dim(); ++b) {
            const double dm = 2.0 * (static_cast<double>(std::popcount(a)) - std::popcount(b));
            comm2 += dm * dm * std::norm(h_full(a, b));
        }
    if (std::sqrt(comm2) > 1e-10) {
        throw SectorNotInvariant("matrix does not commute with J_z: ||[J_z, H]|| = " +
                                 std::to_string(std::sqrt(comm2)));
    }
    ComplexMatrix out(static_cast<std::size_t>(sites));
    for (int i = 1; i <= sites; ++i)
        for (int j = 1; j <= sites; ++j) out(i - 1, j - 1) = h_full(magnon_index(sites, i), magnon_index(sites, j));
    return out;
}

std::string to_string(TargetName name) {
    switch (name) {
    case TargetName::W: return "w";
    case TargetName::CalW: return "calw";
    case TargetName::Bell: return "bell";
    case TargetName::GHZ: return "ghz";
    }
    return "?";
}

TargetName parse_target(const std::string& text) {
    if (text == "w") return TargetName::W;
    if (text == "calw") return TargetName::CalW;
    if (text == "bell") return TargetName::Bell;
    if (text == "ghz") return TargetName::GHZ;
    throw ConfigError("unknown target '" + text + "' (expected w, calw, bell or ghz)");
}

StateVector target_state(TargetName name, int sites) {
    if (sites < 2) throw ConfigError("targets need N >= 2");
    const std::size_t n = static_cast<std::size_t>(sites);
    switch (name) {
    case TargetName::W:
    case TargetName::CalW: {
        const cd unit = name == TargetName::W ? cd(0, -1) : cd(0, 1);
        const double amp = 1.0 / std::sqrt(static_cast<double>(n));
        CVector v(n);
        cd phase = unit;
        for (std::size_t l = 0; l < n; ++l) {
            v[l] = amp * phase;
            phase *= unit;
        }
        return StateVector(Basis{BasisKind::MagnonPosition, sites}, std::move(v));
    }
    case TargetName::Bell: {
        CVector v(n);
        v[0] = kInvSqrt2;
        v[n - 1] = cd(0, -kInvSqrt2);
        return StateVector(Basis{BasisKind::MagnonPosition, sites}, std::move(v));
    }
    case TargetName::GHZ: {
        require_spin_cap(sites);
        CVector v(std::size_t{1} << sites);
        v.front() = kInvSqrt2;
        v.back() = kInvSqrt2;
        return StateVector(Basis{BasisKind::SpinZ, sites}, std::move(v));
    }
    }
    throw ConfigError("unknown target");
}

std::string target_warning(TargetName name, int sites) {
    if ((name == TargetName::W || name == TargetName::CalW) && sites % 2 != 0)
        return "W and CalW are not orthogonal for odd N=" + std::to_string(sites);
    return {};
}

StateVector site_state(const Basis& basis, int k) {
    if (k < 1 || k > basis.sites) throw ConfigError("site " + std::to_string(k) + " outside [1, N]");
    CVector v(basis.dim());
    if (basis.kind == BasisKind::MagnonPosition)
        v[static_cast<std::size_t>(k - 1)] = 1.0;
    else
        v[magnon_index(basis.sites, k)] = 1.0;
    return StateVector(basis, std::move(v));
}

StateVector bitstring_state(const std::string& bits) {
    const int n = static_cast<int>(bits.size());
    if (n < 1) throw ConfigError("empty bit string");
    require_spin_cap(n);
    std::size_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw ConfigError("bit string may only contain 0 and 1");
        index = (index << 1) | static_cast<std::size_t>(c == '1');
    }
    CVector v(std::size_t{1} << n);
    v[index] = 1.0;
    return StateVector(Basis{BasisKind::SpinZ, n}, std::move(v));
}

StateVector embed_magnon(const StateVector& magnon) {
    if (magnon.basis().kind != BasisKind::MagnonPosition) throw ConfigError("embed_magnon expects a magnon state");
    const int n = magnon.basis().sites;
    require_spin_cap(n);
    CVector v(std::size_t{1} << n);
    for (int l = 1; l <= n; ++l) v[magnon_index(n, l)] = magnon[static_cast<std::size_t>(l - 1)];
    return StateVector(Basis{BasisKind::SpinZ, n}, std::move(v));
}

bool check_pt_spectrum(const ComplexMatrix& m, Parity parity) {
    const std::size_t dim = m.dim();
    std::vector<std::size_t> p(dim);
    if (parity == Parity::IndexReversal) {
        for (std::size_t i = 0; i < dim; ++i) p[i] = dim - 1 - i;
    } else {
        if (!std::has_single_bit(dim)) return false;
        const int n = std::countr_zero(dim);
        for (std::size_t a = 0; a < dim; ++a) {
            std::size_t r = 0;
            for (int b = 0; b < n; ++b)
                if (a & (std::size_t{1} << b)) r |= std::size_t{1} << (n - 1 - b);
            p[a] = r;
        }
    }
    double scale = 0.0;
    for (const auto& z : m.entries()) scale = std::max(scale, std::abs(z));
    const double tol = 1e-12 * std::max(1.0, scale);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            if (std::abs(std::conj(m(p[i], p[j])) - m(i, j)) > tol) return false;
    return true;
}

bool check_pt_spectrum(const ComplexMatrix& m, const Basis& basis) {
    if (m.dim() != basis.dim()) throw DimensionMismatch("PT check: matrix does not match " + to_string(basis));
    if (basis.kind == BasisKind::MagnonPosition) return check_pt_spectrum(m, Parity::IndexReversal);
    return check_pt_spectrum(m, Parity::SiteReversal) || check_pt_spectrum(m, Parity::IndexReversal);
}

} // namespace epchain
