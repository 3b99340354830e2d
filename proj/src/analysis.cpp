#include "epchain/analysis.hpp"

#include <cmath>
#include <sstream>

#include "epchain/dynamics.hpp"
#include "epchain/eig.hpp"
#include "epchain/parallel.hpp"

namespace epchain {
namespace {

double parse_number(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) throw ConfigError(what + ": '" + text + "' is not a number");
    return v;
}

double extended_noise_ratio() {
    static const double r = std::sqrt(to_double(epsilon_of<ExtendedReal>()) / std::numeric_limits<double>::epsilon());
    return r;
}

constexpr double kGoldenRatio = 0.61803398874989484820;

} // namespace

Precision resolve_precision(Precision p, std::size_t dim) {
    if (p != Precision::Auto) return p;
    return dim <= kAutoExtendedDim ? Precision::Extended : Precision::Double;
}

double broken_threshold(double matrix_norm, Precision resolved, double tau) {
    const double base = tau * (1.0 + matrix_norm);
    return resolved == Precision::Extended ? base * extended_noise_ratio() : base;
}

double max_im_epsilon(const ComplexMatrix& m, Precision precision) {
    double best = 0.0;
    if (resolve_precision(precision, m.dim()) == Precision::Extended) {
        for (const auto& e : eigenvalues(m.cast<ExtendedReal>())) best = std::max(best, std::abs(to_double(e.imag())));
    } else {
        for (const auto& e : eigenvalues(m)) best = std::max(best, std::abs(e.imag()));
    }
    return best;
}

double max_im_epsilon(const ModelSpec& spec, Precision precision) {
    if (resolve_precision(precision, spec.dim()) == Precision::Double) return max_im_epsilon(build_hamiltonian(spec));
    double best = 0.0;
    for (const auto& e : eigenvalues(build_hamiltonian_extended(spec)))
        best = std::max(best, std::abs(to_double(e.imag())));
    return best;
}

bool is_broken(const ModelSpec& spec, Precision precision, double tau) {
    const Precision p = resolve_precision(precision, spec.dim());
    return max_im_epsilon(spec, p) > broken_threshold(build_hamiltonian(spec).one_norm(), p, tau);
}

bool is_broken(const ComplexMatrix& m, Precision precision, double tau) {
    const Precision p = resolve_precision(precision, m.dim());
    return max_im_epsilon(m, p) > broken_threshold(m.one_norm(), p, tau);
}

Axis Axis::parse(const std::string& name, const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 4) throw ConfigError(name + " range '" + text + "' must be min:max:{log|lin}:count");
    Axis a;
    a.name = name;
    a.min = parse_number(parts[0], name + " range min");
    a.max = parse_number(parts[1], name + " range max");
    if (parts[2] == "log")
        a.scale = AxisScale::Log;
    else if (parts[2] == "lin")
        a.scale = AxisScale::Linear;
    else
        throw ConfigError(name + " range scale must be log or lin, got '" + parts[2] + "'");
    const double count = parse_number(parts[3], name + " range count");
    if (count != std::floor(count) || count < 1 || count > 1e6)
        throw ConfigError(name + " range count must be a positive integer");
    a.count = static_cast<int>(count);
    a.validate();
    return a;
}

void Axis::validate() const {
    if (!std::isfinite(min) || !std::isfinite(max)) throw ConfigError(name + " range must be finite");
    if (min > max) throw ConfigError(name + " range has min > max");
    if (count < 1) throw ConfigError(name + " range needs at least one sample");
    if (scale == AxisScale::Log && !(min > 0)) throw ConfigError(name + " log range must be positive");
}

std::vector<double> Axis::samples() const {
    validate();
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double u = count == 1 ? 0.0 : double(i) / (count - 1);
        out[i] = scale == AxisScale::Log ? std::exp(std::log(min) + u * (std::log(max) - std::log(min)))
                                         : min + u * (max - min);
    }
    if (count > 1) out.back() = max;
    return out;
}

std::string Axis::to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << min << ':' << max << ':' << (scale == AxisScale::Log ? "log" : "lin") << ':' << count;
    return os.str();
}

void set_control(ModelSpec& spec, double value) {
    if (spec.kind == ModelKind::TransverseIsing)
        spec.field = value;
    else
        spec.potential = value;
}

std::string control_name(const ModelSpec& spec) { return spec.kind == ModelKind::TransverseIsing ? "Delta" : "V"; }

PhaseGrid sweep_grid(const ModelSpec& model, const Axis& x_axis, const Axis& y_axis, const SweepOptions& options) {
    PhaseGrid grid;
    grid.model = model;
    grid.x_axis = x_axis;
    grid.y_axis = y_axis;
    grid.x_values = x_axis.samples();
    grid.y_values = y_axis.samples();
    grid.broken_threshold = options.tau;
    const std::size_t nx = grid.x_values.size(), ny = grid.y_values.size();
    for (double g : grid.y_values)
        if (g < 0) throw ConfigError("gamma range must be non-negative");
    grid.values.assign(nx * ny, std::nan(""));
    grid.thresholds.assign(nx * ny, std::nan(""));
    {
        ModelSpec probe = model;
        set_control(probe, grid.x_values.front());
        probe.gamma = grid.y_values.front();
        probe.validate();
    }
    parallel_for(nx * ny, options.threads, [&](std::size_t i) {
        ModelSpec s = model;
        set_control(s, grid.x_values[i / ny]);
        s.gamma = grid.y_values[i % ny];
        try {
            const Precision p = resolve_precision(options.precision, s.dim());
            grid.values[i] = max_im_epsilon(s, p);
            grid.thresholds[i] = broken_threshold(build_hamiltonian(s).one_norm(), p, options.tau);
        } catch (const NumericError&) {
            // Left as NaN and counted below.
        }
    });
    for (double v : grid.values) grid.failures += std::isnan(v) ? 1 : 0;
    return grid;
}

double numeric_boundary_gamma(const ModelSpec& model, double control, const BoundaryOptions& options) {
    ModelSpec s = model;
    set_control(s, control);
    s.gamma = 0.0;
    s.validate();
    if (!(options.gamma_max > 0) || options.scan_points < 2 || !(options.rel_tol > 0))
        throw ConfigError("boundary search options out of range");
    const Precision p = resolve_precision(options.precision, s.dim());
    const double gamma_min = p == Precision::Extended ? 1e-30 : 1e-14;

    auto broken_at = [&](double log_g) {
        ModelSpec t = s;
        t.gamma = std::exp(log_g);
        return is_broken(t, p, options.tau);
    };

    const double lo = std::log(gamma_min), hi = std::log(options.gamma_max);
    double prev = lo;
    if (broken_at(lo)) {
        throw NoTransition("spectrum already complex at gamma=" + std::to_string(gamma_min) + " for " +
                           control_name(s) + "=" + std::to_string(control));
    }
    for (int i = 1; i < options.scan_points; ++i) {
        const double x = lo + (hi - lo) * i / (options.scan_points - 1);
        if (!broken_at(x)) {
            prev = x;
            continue;
        }
        double a = prev, b = x;
        while (b - a > options.rel_tol) {
            const double m = 0.5 * (a + b);
            (broken_at(m) ? b : a) = m;
        }
        return std::exp(0.5 * (a + b));
    }
    throw NoTransition("spectrum stays real for gamma <= " + std::to_string(options.gamma_max) + " at " +
                       control_name(s) + "=" + std::to_string(control));
}

std::string to_string(BoundaryMethod method) {
    switch (method) {
    case BoundaryMethod::ExactEpts: return "exact_epts";
    case BoundaryMethod::Perturbative: return "perturbative";
    case BoundaryMethod::NumericScan: return "numeric_scan";
    }
    return "?";
}

double fit_boundary_slope(const BoundaryCurve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 3) throw DegenerateFit("slope fit needs at least three points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        if (!(x > 0) || !(y > 0)) throw DegenerateFit("slope fit needs positive control and gamma values");
        const double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(pts.size());
    const double den = n * sxx - sx * sx;
    if (!(den > 1e-12 * n * sxx)) throw DegenerateFit("slope fit needs distinct control values");
    return (n * sxy - sx * sy) / den;
}

OptimizeResult optimize_gamma(const ModelSpec& model, const StateVector& init, const StateVector& target,
                              double t_max, const OptimizeOptions& options) {
    if (options.iterations < 1 || !(options.upper_factor > 1)) throw ConfigError("optimizer options out of range");
    const double control = model.kind == ModelKind::TransverseIsing ? model.field : model.potential;
    OptimizeResult out;
    out.gamma_c = numeric_boundary_gamma(model, control, options.boundary);

    auto score = [&](double g) {
        ModelSpec s = model;
        s.gamma = g;
        return evolve_trace(s, init, target, t_max, options.steps).fidelities.back();
    };

    double a = out.gamma_c, b = out.gamma_c * options.upper_factor;
    double c = b - kGoldenRatio * (b - a), d = a + kGoldenRatio * (b - a);
    double fc = score(c), fd = score(d);
    for (int it = 0; it < options.iterations; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGoldenRatio * (b - a);
            fc = score(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGoldenRatio * (b - a);
            fd = score(d);
        }
    }
    if (fc >= fd) {
        out.gamma_star = c;
        out.f_star = fc;
    } else {
        out.gamma_star = d;
        out.f_star = fd;
    }
    // The upper end is part of the interval; keep it if it beats the interior.
    const double fb = score(out.gamma_c * options.upper_factor);
    if (fb > out.f_star) {
        out.gamma_star = out.gamma_c * options.upper_factor;
        out.f_star = fb;
    }
    return out;
}

} // namespace epchain
