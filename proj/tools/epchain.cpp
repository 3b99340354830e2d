// epchain: spectra, phase diagrams, dynamics and boundaries of non-Hermitian spin chains.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "epchain/analysis.hpp"
#include "epchain/bethe.hpp"
#include "epchain/dynamics.hpp"
#include "epchain/eig.hpp"
#include "epchain/io.hpp"
#include "epchain/models.hpp"

namespace fs = std::filesystem;
using namespace epchain;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitMismatch = 4;

// Raised for bad flag values; the message starts with the flag name.
struct FlagError : ConfigError {
    using ConfigError::ConfigError;
};

struct ModelFlags {
    std::string model = "xy";
    int n = 6;
    double v = 0.0;
    double gamma = 0.0;
    double j = 1.0;
    double delta = 1.0;
    std::string boundary = "periodic";
    std::string precision = "auto";

    void add(CLI::App* app) {
        app->add_option("--model", model, "xy, xy-full or ising")
            ->check(CLI::IsMember({"xy", "xy-full", "ising"}))
            ->capture_default_str();
        app->add_option("--n", n, "number of sites")->capture_default_str();
        app->add_option("--v", v, "boundary potential V (XY)")->capture_default_str();
        app->add_option("--gamma", gamma, "gain/loss strength")->capture_default_str();
        app->add_option("--j", j, "Ising coupling J")->capture_default_str();
        app->add_option("--delta", delta, "transverse field Delta (Ising)")->capture_default_str();
        app->add_option("--boundary", boundary, "Ising boundary: periodic or open")
            ->check(CLI::IsMember({"periodic", "open"}))
            ->capture_default_str();
        app->add_option("--precision", precision, "eigenvalue precision: double, extended or auto")
            ->check(CLI::IsMember({"double", "extended", "auto"}))
            ->capture_default_str();
    }

    ModelSpec spec() const {
        ModelSpec s;
        s.kind = model == "ising" ? ModelKind::TransverseIsing
                 : model == "xy-full" ? ModelKind::XYFullSpace
                                      : ModelKind::XYMagnon;
        const int min_sites = s.kind == ModelKind::TransverseIsing ? 1 : 2;
        if (n < min_sites) throw FlagError("--n must be at least " + std::to_string(min_sites) + ", got " + std::to_string(n));
        if (s.kind != ModelKind::XYMagnon && n > kMaxSpinSites)
            throw FlagError("--n above " + std::to_string(kMaxSpinSites) + " exceeds the 2^N dimension cap");
        if (!std::isfinite(gamma) || gamma < 0) throw FlagError("--gamma must be a non-negative number");
        if (!std::isfinite(v)) throw FlagError("--v must be finite");
        if (!std::isfinite(j)) throw FlagError("--j must be finite");
        if (!std::isfinite(delta)) throw FlagError("--delta must be finite");
        s.sites = n;
        s.potential = v;
        s.gamma = gamma;
        if (s.kind == ModelKind::TransverseIsing) {
            s.coupling = j;
            s.field = delta;
        }
        s.boundary = boundary == "open" ? IsingBoundary::Open : IsingBoundary::Periodic;
        s.validate();
        return s;
    }

    Precision prec() const {
        if (precision == "double") return Precision::Double;
        if (precision == "extended") return Precision::Extended;
        return Precision::Auto;
    }
};

struct OutputFlags {
    std::string out;
    std::string format = "csv";
    bool plot = false;

    void add(CLI::App* app) {
        app->add_option("--out", out, "output file (stdout when omitted)");
        app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
        app->add_flag("--plot", plot, "also write an SVG next to --out");
    }

    bool to_stdout() const { return out.empty() || out == "-"; }

    void emit(const std::string& content) const {
        if (to_stdout())
            std::cout << content << std::flush;
        else
            write_atomic(out, content);
    }

    void emit_plot(const std::string& svg) const {
        if (!plot) return;
        if (to_stdout()) throw FlagError("--plot needs --out to name the SVG file");
        fs::path p(out);
        p.replace_extension(".svg");
        write_atomic(p, svg);
    }

    // Summaries go to stdout unless stdout already carries the data.
    std::ostream& summary() const { return to_stdout() ? std::cerr : std::cout; }
};

Axis parse_axis(const std::string& flag, const std::string& name, const std::string& text) {
    try {
        return Axis::parse(name, text);
    } catch (const ConfigError& e) {
        throw FlagError(flag + ": " + e.what());
    }
}

StateVector parse_init(const std::string& text, const ModelSpec& spec) {
    const Basis basis = spec.basis();
    if (text.rfind("site:", 0) == 0) {
        int k = 0;
        try {
            std::size_t used = 0;
            k = std::stoi(text.substr(5), &used);
            if (used != text.size() - 5) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw FlagError("--init: '" + text + "' is not site:<k>");
        }
        if (k < 1 || k > spec.sites) throw FlagError("--init: site " + std::to_string(k) + " outside [1, N]");
        return site_state(basis, k);
    }
    if (text.rfind("bits:", 0) == 0) {
        if (basis.kind != BasisKind::SpinZ) throw FlagError("--init bits: needs a spin-space model (xy-full or ising)");
        const std::string bits = text.substr(5);
        if (static_cast<int>(bits.size()) != spec.sites)
            throw FlagError("--init: bit string length " + std::to_string(bits.size()) + " does not match --n");
        try {
            return bitstring_state(bits);
        } catch (const ConfigError& e) {
            throw FlagError(std::string("--init: ") + e.what());
        }
    }
    throw FlagError("--init must be site:<k> or bits:<string>, got '" + text + "'");
}

StateVector make_target(const std::string& text, const ModelSpec& spec) {
    TargetName name;
    try {
        name = parse_target(text);
    } catch (const ConfigError& e) {
        throw FlagError(std::string("--target: ") + e.what());
    }
    const bool spin = spec.basis().kind == BasisKind::SpinZ;
    if (name == TargetName::GHZ) {
        if (!spin) throw FlagError("--target ghz needs a spin-space model (xy-full or ising)");
        return target_state(name, spec.sites);
    }
    const StateVector t = target_state(name, spec.sites);
    return spin ? embed_magnon(t) : t;
}

std::string default_target(const ModelSpec& spec) { return spec.kind == ModelKind::TransverseIsing ? "ghz" : "w"; }

// ---------------------------------------------------------------- spectrum

struct SpectrumCmd {
    ModelFlags model;
    OutputFlags output;
    bool vectors = false;

    void add(CLI::App& app) {
        auto* sub = app.add_subcommand("spectrum", "eigenvalues of one Hamiltonian");
        model.add(sub);
        output.add(sub);
        sub->add_flag("--vectors", vectors, "also write right eigenvectors to <out>.vectors.csv");
        sub->callback([this] { run(); });
    }

    static Spectrum extended_spectrum(const ModelSpec& spec) {
        const auto s = eig(build_hamiltonian_extended(spec));
        Spectrum out;
        out.matrix_norm = to_double(s.matrix_norm);
        for (std::size_t i = 0; i < s.size(); ++i) {
            out.eigenvalues.emplace_back(to_double(s.eigenvalues[i].real()), to_double(s.eigenvalues[i].imag()));
            out.residuals.push_back(to_double(s.residuals[i]));
            CVector v;
            for (const auto& z : s.right_vectors[i]) v.emplace_back(to_double(z.real()), to_double(z.imag()));
            out.right_vectors.push_back(std::move(v));
        }
        return out;
    }

    void run() {
        const ModelSpec spec = model.spec();
        const Precision p = resolve_precision(model.prec(), spec.dim());
        const Spectrum s = p == Precision::Extended ? extended_spectrum(spec) : eig(build_hamiltonian(spec));
        if (output.format == "json") {
            Json j = to_json(s);
            j["model"] = to_json(spec);
            j["precision"] = p == Precision::Extended ? "extended" : "double";
            output.emit(j.dump(2) + "\n");
        } else {
            output.emit(spectrum_csv(s));
        }
        if (vectors) {
            if (output.to_stdout()) throw FlagError("--vectors needs --out");
            std::ostringstream os;
            os << "index,component,re,im\n";
            for (std::size_t k = 0; k < s.size(); ++k)
                for (std::size_t c = 0; c < s.right_vectors[k].size(); ++c)
                    os << k << ',' << c << ',' << format_double(s.right_vectors[k][c].real()) << ','
                       << format_double(s.right_vectors[k][c].imag()) << '\n';
            write_atomic(output.out + ".vectors.csv", os.str());
        }
        if (output.plot) {
            LinePlot plot;
            plot.title = "spectrum, " + to_string(spec.kind) + " N=" + std::to_string(spec.sites);
            plot.x_label = "Re e";
            plot.y_label = "Im e";
            Series pts{"eigenvalues", {}, {}};
            for (auto e : s.eigenvalues) {
                pts.x.push_back(e.real());
                pts.y.push_back(e.imag());
            }
            plot.points.push_back(pts);
            output.emit_plot(line_plot_svg(plot));
        }
    }
};

// ---------------------------------------------------------------- phase-diagram

std::string default_x_range(const ModelSpec& spec) {
    return spec.kind == ModelKind::TransverseIsing ? "0.08:4:lin:50" : "2:100:log:60";
}

std::string default_gamma_range(const ModelSpec& spec) {
    return spec.kind == ModelKind::TransverseIsing ? "0.08:4:lin:50" : "1e-4:1:log:60";
}

struct PhaseCmd {
    ModelFlags model;
    OutputFlags output;
    std::string x_range, gamma_range;
    unsigned threads = 0;

    void add(CLI::App& app) {
        auto* sub = app.add_subcommand("phase-diagram", "max|Im e| over a (control, gamma) grid");
        model.add(sub);
        output.add(sub);
        sub->add_option("--x-range", x_range, "control axis min:max:{log|lin}:count (V for xy, Delta for ising)");
        sub->add_option("--gamma-range", gamma_range, "gamma axis min:max:{log|lin}:count");
        sub->add_option("--threads", threads, "worker threads (0: EPCHAIN_THREADS or all cores)");
        sub->callback([this] { run(); });
    }

    void run() {
        const ModelSpec spec = model.spec();
        const Axis x = parse_axis("--x-range", control_name(spec), x_range.empty() ? default_x_range(spec) : x_range);
        const Axis y = parse_axis("--gamma-range", "gamma", gamma_range.empty() ? default_gamma_range(spec) : gamma_range);
        if (y.min < 0) throw FlagError("--gamma-range must be non-negative");
        SweepOptions opts;
        opts.threads = threads;
        opts.precision = model.prec();
        const PhaseGrid grid = sweep_grid(spec, x, y, opts);
        output.emit(output.format == "json" ? to_json(grid).dump(2) + "\n" : phase_grid_csv(grid));
        output.emit_plot(phase_grid_svg(grid, to_string(spec.kind) + " N=" + std::to_string(spec.sites)));
        std::size_t broken = 0;
        for (std::size_t i = 0; i < grid.values.size(); ++i) broken += grid.values[i] > grid.thresholds[i];
        output.summary() << "nodes=" << grid.values.size() << " broken=" << broken << " failures=" << grid.failures
                         << "\n";
        if (grid.failures > 0) throw NumericError(std::to_string(grid.failures) + " grid nodes failed (NaN in output)");
    }
};

// ---------------------------------------------------------------- evolve

struct EvolveCmd {
    ModelFlags model;
    OutputFlags output;
    std::string target, init = "site:1", backend = "pade", renorm = "every";
    double t_max = 100.0, tol = 1e-3;
    int steps = 2000;
    bool optimize = false;
    int iterations = 30;

    void add(CLI::App& app) {
        auto* sub = app.add_subcommand("evolve", "fidelity trace under non-unitary evolution");
        model.add(sub);
        output.add(sub);
        sub->add_option("--target", target, "w, calw, bell or ghz (default w for xy, ghz for ising)");
        sub->add_option("--init", init, "site:<k> or bits:<string>")->capture_default_str();
        sub->add_option("--t-max", t_max, "final time")->capture_default_str();
        sub->add_option("--steps", steps, "number of samples after t=0")->capture_default_str();
        sub->add_option("--tol", tol, "convergence tolerance on the fidelity")->capture_default_str();
        sub->add_option("--backend", backend, "pade or spectral")
            ->check(CLI::IsMember({"pade", "spectral"}))
            ->capture_default_str();
        sub->add_option("--renormalize", renorm, "every (sub-step) or samples")
            ->check(CLI::IsMember({"every", "samples"}))
            ->capture_default_str();
        sub->add_flag("--optimize", optimize, "replace --gamma by the f(t_max)-optimal gamma in the broken region");
        sub->add_option("--iterations", iterations, "golden-section iterations for --optimize")->capture_default_str();
        sub->callback([this] { run(); });
    }

    void run() {
        if (!(t_max > 0) || !std::isfinite(t_max)) throw FlagError("--t-max must be positive");
        if (steps < 2) throw FlagError("--steps must be at least 2");
        if (!(tol > 0)) throw FlagError("--tol must be positive");
        if (iterations < 1) throw FlagError("--iterations must be at least 1");
        ModelSpec spec = model.spec();
        const std::string tname = target.empty() ? default_target(spec) : target;
        const StateVector tgt = make_target(tname, spec);
        const StateVector psi0 = parse_init(init, spec);
        const std::string warn = target_warning(parse_target(tname), spec.sites);
        if (!warn.empty()) std::cerr << "warning: " << warn << "\n";

        std::optional<OptimizeResult> opt;
        if (optimize) {
            OptimizeOptions o;
            o.iterations = iterations;
            o.boundary.precision = model.prec();
            opt = optimize_gamma(spec, psi0, tgt, t_max, o);
            spec.gamma = opt->gamma_star;
        }
        EvolveOptions eo;
        eo.backend = backend == "spectral" ? PropagatorBackend::Spectral : PropagatorBackend::Pade;
        eo.renormalization = renorm == "samples" ? Renormalization::AtSamples : Renormalization::EverySubstep;
        const EvolutionTrace trace = evolve_trace(spec, psi0, tgt, t_max, steps, eo, tname);

        const double t_conv = convergence_time(trace, tol);
        double f_dom = std::numeric_limits<double>::quiet_NaN();
        try {
            f_dom = fidelity(tgt, dominant_state(build_hamiltonian(spec), spec.basis()));
        } catch (const NoDominantState&) {
        }
        if (output.format == "json") {
            Json j = to_json(trace);
            j["convergence_time"] = std::isfinite(t_conv) ? Json(t_conv) : Json(nullptr);
            j["dominant_fidelity"] = std::isfinite(f_dom) ? Json(f_dom) : Json(nullptr);
            if (opt) j["optimize"] = Json{{"gamma_c", opt->gamma_c}, {"gamma_star", opt->gamma_star}, {"f_star", opt->f_star}};
            output.emit(j.dump(2) + "\n");
        } else {
            output.emit(trace_csv(trace));
        }
        if (output.plot) {
            LinePlot plot;
            plot.title = tname + " fidelity, N=" + std::to_string(spec.sites) + ", gamma=" + format_double(spec.gamma);
            plot.x_label = "t";
            plot.y_label = "f(t)";
            plot.series.push_back({"f", trace.times, trace.fidelities});
            output.emit_plot(line_plot_svg(plot));
        }
        auto& os = output.summary();
        if (opt)
            os << "gamma_c=" << format_double(opt->gamma_c) << " gamma_star=" << format_double(opt->gamma_star) << " ";
        os << "final_fidelity=" << format_double(trace.fidelities.back())
           << " convergence_time=" << format_double(t_conv) << " dominant_fidelity=" << format_double(f_dom) << "\n";
    }
};

// ---------------------------------------------------------------- boundary

std::vector<double> parse_list(const std::string& flag, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw FlagError(flag + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw FlagError(flag + " is empty");
    return out;
}

struct BoundaryCmd {
    ModelFlags model;
    OutputFlags output;
    std::string values = "10,30,100", x_range;
    double rel_tol = 1e-6;

    void add(CLI::App& app) {
        auto* sub = app.add_subcommand("boundary", "exact, perturbative and numeric phase boundaries");
        model.add(sub);
        output.add(sub);
        sub->add_option("--values", values, "comma-separated control values (V or Delta)")->capture_default_str();
        sub->add_option("--x-range", x_range, "control values as min:max:{log|lin}:count (overrides --values)");
        sub->add_option("--rel-tol", rel_tol, "bisection tolerance in log gamma")->capture_default_str();
        sub->callback([this] { run(); });
    }

    void run() {
        if (!(rel_tol > 0)) throw FlagError("--rel-tol must be positive");
        const ModelSpec spec = model.spec();
        const std::vector<double> xs = x_range.empty() ? parse_list("--values", values)
                                                       : parse_axis("--x-range", control_name(spec), x_range).samples();
        std::vector<BoundaryRow> rows;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        BoundaryOptions bo;
        bo.precision = model.prec();
        bo.rel_tol = rel_tol;
        for (double x : xs) {
            if (spec.kind == ModelKind::XYMagnon)
                rows.push_back(boundary_row(spec.sites, x, bo));
            else
                rows.push_back({x, nan, nan, numeric_boundary_gamma(spec, x, bo), nan, false});
        }
        if (output.format == "json") {
            Json j{{"model", to_json(spec)}, {"rows", Json::array()}};
            for (const auto& r : rows) j["rows"].push_back(to_json(r));
            output.emit(j.dump(2) + "\n");
        } else {
            output.emit(boundary_csv(rows));
        }
        if (output.plot) {
            LinePlot plot;
            plot.title = "phase boundary, N=" + std::to_string(spec.sites);
            plot.x_label = control_name(spec);
            plot.y_label = "gamma_c";
            plot.log_x = plot.log_y = true;
            Series num{"numeric", {}, {}}, ex{"exact", {}, {}}, pert{"perturbative", {}, {}};
            for (const auto& r : rows) {
                num.x.push_back(r.control), num.y.push_back(r.gamma_numeric);
                ex.x.push_back(r.control), ex.y.push_back(r.gamma_exact);
                pert.x.push_back(r.control), pert.y.push_back(r.gamma_perturbative);
            }
            plot.series = {num, pert};
            plot.points = {ex};
            output.emit_plot(line_plot_svg(plot));
        }
        BoundaryCurve curve;
        for (const auto& r : rows)
            if (r.control > 0) curve.points.emplace_back(r.control, r.gamma_numeric);
        try {
            const double slope = fit_boundary_slope(curve);
            output.summary() << "numeric_slope=" << format_double(slope) << "\n";
        } catch (const DegenerateFit&) {
        }
        for (const auto& r : rows)
            if (r.mismatch)
                throw ValidationMismatch("closed-form and numeric boundaries differ by " +
                                         format_double(r.rel_gap_exact_numeric) + " at " + control_name(spec) + "=" +
                                         format_double(r.control));
    }
};

// ---------------------------------------------------------------- reproduce

struct Manifest {
    Json j;
    fs::path dir;

    std::string put(const std::string& name, const std::string& content) {
        write_atomic(dir / name, content);
        j["files"].push_back(name);
        return name;
    }
};

void figure1(Manifest& m, bool quick) {
    const std::vector<double> gammas{1.02, 1.05, 1.2, 1.5};
    const double t_max = 100.0;
    const int steps = quick ? 400 : 2000;
    m.j["parameters"] = {{"model", "xy"}, {"V", 0.0}, {"target", "W"}, {"init", "site:1"}, {"N", {6, 8}},
                         {"gamma", gammas}, {"t_max", t_max}, {"steps", steps}};
    Json summary = Json::array();
    for (int n : {6, 8}) {
        LinePlot plot{"W fidelity, N=" + std::to_string(n), "t", "f(t)", false, false, {}, {}};
        for (double g : gammas) {
            ModelSpec s;
            s.sites = n;
            s.gamma = g;
            const auto tr = evolve_trace(s, site_state(s.basis(), 1), target_state(TargetName::W, n), t_max, steps, {}, "W");
            m.put("fig1_N" + std::to_string(n) + "_gamma" + format_double(g) + ".csv", trace_csv(tr));
            plot.series.push_back({"gamma=" + format_double(g), tr.times, tr.fidelities});
            summary.push_back({{"N", n}, {"gamma", g}, {"final_fidelity", tr.fidelities.back()},
                               {"convergence_time", convergence_time(tr)}});
        }
        m.put("fig1_N" + std::to_string(n) + ".svg", line_plot_svg(plot));
    }
    m.j["summary"] = summary;
}

void figure2(Manifest& m, bool quick, unsigned threads) {
    const Axis x = Axis::parse("V", quick ? "2:100:log:16" : "2:100:log:60");
    const Axis y = Axis::parse("gamma", quick ? "1e-18:1:log:16" : "1e-18:1:log:60");
    m.j["parameters"] = {{"model", "xy"}, {"N", {6, 8, 10}}, {"x_range", x.to_string()}, {"gamma_range", y.to_string()},
                         {"precision", "auto"}, {"overlay", "closed-form boundary at each V > 2"}};
    SweepOptions so;
    so.threads = threads;
    so.precision = Precision::Auto;
    for (int n : {6, 8, 10}) {
        ModelSpec s;
        s.sites = n;
        const PhaseGrid grid = sweep_grid(s, x, y, so);
        std::vector<std::pair<double, double>> overlay;
        for (double v : grid.x_values)
            if (v > 2.0) overlay.emplace_back(v, epts_gamma(n, v));
        const std::string stem = "fig2_N" + std::to_string(n);
        m.put(stem + ".csv", phase_grid_csv(grid));
        std::ostringstream os;
        os << "V,gamma_exact\n";
        for (auto [v, g] : overlay) os << format_double(v) << ',' << format_double(g) << '\n';
        m.put(stem + "_exact.csv", os.str());
        m.put(stem + ".svg", phase_grid_svg(grid, "XY N=" + std::to_string(n), overlay));
    }
}

void figure3(Manifest& m, bool quick) {
    const std::vector<double> vs{5.0, 10.0};
    const double k = 30.0;
    const int iterations = quick ? 12 : 30;
    m.j["parameters"] = {{"model", "xy"}, {"target", "Bell"}, {"init", "site:1"}, {"N", {6, 8}}, {"V", vs},
                         {"t_max", "30 / gamma_c"}, {"optimizer_iterations", iterations}, {"steps", 2000}};
    Json summary = Json::array();
    for (int n : {6, 8}) {
        LinePlot plot{"Bell fidelity, N=" + std::to_string(n), "t", "f(t)", false, false, {}, {}};
        for (double v : vs) {
            ModelSpec s;
            s.sites = n;
            s.potential = v;
            const auto init = site_state(s.basis(), 1);
            const auto bell = target_state(TargetName::Bell, n);
            const double t_max = k / numeric_boundary_gamma(s, v);
            OptimizeOptions o;
            o.iterations = iterations;
            const auto r = optimize_gamma(s, init, bell, t_max, o);
            s.gamma = r.gamma_star;
            const auto tr = evolve_trace(s, init, bell, t_max, 2000, {}, "Bell");
            m.put("fig3_N" + std::to_string(n) + "_V" + format_double(v) + ".csv", trace_csv(tr));
            plot.series.push_back({"V=" + format_double(v), tr.times, tr.fidelities});
            summary.push_back({{"N", n}, {"V", v}, {"gamma_c", r.gamma_c}, {"gamma_star", r.gamma_star},
                               {"f_star", r.f_star}, {"t_max", t_max}, {"convergence_time", convergence_time(tr)}});
        }
        m.put("fig3_N" + std::to_string(n) + ".svg", line_plot_svg(plot));
    }
    m.j["summary"] = summary;
}

void figure4(Manifest& m, bool quick, unsigned threads) {
    const Axis x = Axis::parse("Delta", quick ? "0.25:4:lin:12" : "0.08:4:lin:50");
    const Axis y = Axis::parse("gamma", quick ? "0.25:4:lin:12" : "0.08:4:lin:50");
    m.j["parameters"] = {{"model", "ising"}, {"J", 1.0}, {"boundary", "periodic"}, {"N", {6, 8}},
                         {"x_range", x.to_string()}, {"gamma_range", y.to_string()}, {"precision", "double"}};
    SweepOptions so;
    so.threads = threads;
    for (int n : {6, 8}) {
        ModelSpec s;
        s.kind = ModelKind::TransverseIsing;
        s.sites = n;
        const PhaseGrid grid = sweep_grid(s, x, y, so);
        const std::string stem = "fig4_N" + std::to_string(n);
        m.put(stem + ".csv", phase_grid_csv(grid));
        m.put(stem + ".svg", phase_grid_svg(grid, "Ising N=" + std::to_string(n)));
    }
}

void figure5(Manifest& m, bool quick) {
    const std::vector<double> deltas{0.3, 0.4, 0.5};
    const double k = 30.0;
    const int iterations = quick ? 10 : 30;
    const int n = 6;
    m.j["parameters"] = {{"model", "ising"}, {"J", 1.0}, {"N", n}, {"boundary", "periodic"}, {"target", "GHZ"},
                         {"init", "site:1"}, {"Delta", deltas}, {"t_max", "30 / gamma_c"},
                         {"optimizer_iterations", iterations}, {"steps", 2000}};
    Json summary = Json::array();
    LinePlot plot{"GHZ fidelity, N=6", "t", "f(t)", false, false, {}, {}};
    for (double d : deltas) {
        ModelSpec s;
        s.kind = ModelKind::TransverseIsing;
        s.sites = n;
        s.field = d;
        const auto init = site_state(s.basis(), 1);
        const auto ghz = target_state(TargetName::GHZ, n);
        OptimizeOptions o;
        o.iterations = iterations;
        o.boundary.rel_tol = 1e-4;
        const double t_max = k / numeric_boundary_gamma(s, d, o.boundary);
        const auto r = optimize_gamma(s, init, ghz, t_max, o);
        s.gamma = r.gamma_star;
        const auto tr = evolve_trace(s, init, ghz, t_max, 2000, {}, "GHZ");
        m.put("fig5_Delta" + format_double(d) + ".csv", trace_csv(tr));
        plot.series.push_back({"Delta=" + format_double(d), tr.times, tr.fidelities});
        summary.push_back({{"Delta", d}, {"gamma_c", r.gamma_c}, {"gamma_star", r.gamma_star}, {"f_star", r.f_star},
                           {"t_max", t_max}});
    }
    m.put("fig5.svg", line_plot_svg(plot));
    m.j["summary"] = summary;
}

struct ReproduceCmd {
    int figure = 0;
    std::string out_dir = "reproduce";
    bool quick = false;
    unsigned threads = 0;

    void add(CLI::App& app) {
        auto* sub = app.add_subcommand("reproduce", "datasets and SVGs for one figure");
        sub->add_option("--figure", figure, "figure number, 1 to 5")->required();
        sub->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
        sub->add_flag("--quick", quick, "coarser grids and fewer optimizer iterations");
        sub->add_option("--threads", threads, "worker threads for grids");
        sub->callback([this] { run(); });
    }

    void run() {
        if (figure < 1 || figure > 5) throw FlagError("--figure must be 1 to 5, got " + std::to_string(figure));
        Manifest m{Json{{"figure", figure}, {"quick", quick}, {"files", Json::array()}}, out_dir};
        fs::create_directories(m.dir);
        switch (figure) {
        case 1: figure1(m, quick); break;
        case 2: figure2(m, quick, threads); break;
        case 3: figure3(m, quick); break;
        case 4: figure4(m, quick, threads); break;
        case 5: figure5(m, quick); break;
        }
        write_atomic(m.dir / "manifest.json", m.j.dump(2) + "\n");
        std::cout << "figure " << figure << ": " << m.j["files"].size() << " files in " << m.dir.string() << "\n";
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exceptional points and dissipative state preparation in non-Hermitian spin chains"};
    app.require_subcommand(1);
    SpectrumCmd spectrum;
    PhaseCmd phase;
    EvolveCmd evolve;
    BoundaryCmd boundary;
    ReproduceCmd reproduce;
    spectrum.add(app);
    phase.add(app);
    evolve.add(app);
    boundary.add(app);
    reproduce.add(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ValidationMismatch& e) {
        std::cerr << "validation mismatch: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
