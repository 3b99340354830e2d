#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "epchain/analysis.hpp"
#include "epchain/bethe.hpp"
#include "epchain/dynamics.hpp"
#include "epchain/eig.hpp"
#include "epchain/io.hpp"
#include "epchain/models.hpp"

namespace py = pybind11;
using namespace epchain;
using cd = std::complex<double>;
using CArray = py::array_t<cd, py::array::c_style | py::array::forcecast>;

namespace {

CArray to_numpy(const ComplexMatrix& m) {
    CArray out({m.dim(), m.dim()});
    std::memcpy(out.mutable_data(), m.entries().data(), m.dim() * m.dim() * sizeof(cd));
    return out;
}

CArray to_numpy(const CVector& v) {
    CArray out(v.size());
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(cd));
    return out;
}

ComplexMatrix from_numpy(const CArray& a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw DimensionMismatch("expected a square 2-D array");
    const auto n = static_cast<std::size_t>(a.shape(0));
    return ComplexMatrix(n, std::vector<cd>(a.data(), a.data() + n * n));
}

StateVector state_from(const CArray& a, const Basis& basis) {
    if (a.ndim() != 1) throw DimensionMismatch("expected a 1-D state array");
    return StateVector(basis, CVector(a.data(), a.data() + a.shape(0)));
}

std::vector<double> column(const CVector& v, bool imag) {
    std::vector<double> out;
    for (auto z : v) out.push_back(imag ? z.imag() : z.real());
    return out;
}

PropagatorBackend parse_backend(const std::string& s) {
    if (s == "pade") return PropagatorBackend::Pade;
    if (s == "spectral") return PropagatorBackend::Spectral;
    throw ConfigError("backend: expected pade or spectral, got '" + s + "'");
}

Precision parse_precision(const std::string& s) {
    if (s == "double") return Precision::Double;
    if (s == "extended") return Precision::Extended;
    if (s == "auto") return Precision::Auto;
    throw ConfigError("precision: expected double, extended or auto, got '" + s + "'");
}

py::dict trace_dict(const EvolutionTrace& t) {
    py::dict d;
    d["times"] = py::array_t<double>(t.times.size(), t.times.data());
    d["fidelities"] = py::array_t<double>(t.fidelities.size(), t.fidelities.data());
    d["log_norms"] = py::array_t<double>(t.log_norms.size(), t.log_norms.data());
    d["gamma"] = t.gamma_used;
    d["target"] = t.target_name;
    return d;
}

} // namespace

PYBIND11_MODULE(_epchain, m) {
    m.doc() = "PT-symmetric spin chains: spectra, phase boundaries and non-Hermitian state preparation";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto config = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", config.ptr());
    py::register_exception<DimensionCap>(m, "DimensionCap", config.ptr());
    auto numeric = py::register_exception<NumericError>(m, "NumericError", error.ptr());
    py::register_exception<NonConvergence>(m, "NonConvergence", numeric.ptr());
    py::register_exception<DefectivePropagation>(m, "DefectivePropagation", numeric.ptr());
    py::register_exception<NoRoot>(m, "NoRoot", numeric.ptr());
    py::register_exception<NoTransition>(m, "NoTransition", numeric.ptr());
    py::register_exception<NoDominantState>(m, "NoDominantState", numeric.ptr());
    py::register_exception<DegenerateFit>(m, "DegenerateFit", numeric.ptr());
    py::register_exception<ValidationMismatch>(m, "ValidationMismatch", error.ptr());

    py::enum_<ModelKind>(m, "ModelKind")
        .value("XY", ModelKind::XYMagnon)
        .value("XY_FULL", ModelKind::XYFullSpace)
        .value("ISING", ModelKind::TransverseIsing);
    py::enum_<IsingBoundary>(m, "IsingBoundary")
        .value("PERIODIC", IsingBoundary::Periodic)
        .value("OPEN", IsingBoundary::Open);

    py::class_<ModelSpec>(m, "ModelSpec")
        .def(py::init([](ModelKind kind, int sites, double potential, double gamma, double coupling, double field,
                         IsingBoundary boundary) {
                 ModelSpec s;
                 s.kind = kind;
                 s.sites = sites;
                 s.potential = potential;
                 s.gamma = gamma;
                 s.coupling = coupling;
                 s.field = field;
                 s.boundary = boundary;
                 s.validate();
                 return s;
             }),
             py::arg("kind") = ModelKind::XYMagnon, py::arg("sites") = 6, py::arg("potential") = 0.0,
             py::arg("gamma") = 0.0, py::arg("coupling") = 1.0, py::arg("field") = 0.0,
             py::arg("boundary") = IsingBoundary::Periodic)
        .def_readwrite("kind", &ModelSpec::kind)
        .def_readwrite("sites", &ModelSpec::sites)
        .def_readwrite("potential", &ModelSpec::potential)
        .def_readwrite("gamma", &ModelSpec::gamma)
        .def_readwrite("coupling", &ModelSpec::coupling)
        .def_readwrite("field", &ModelSpec::field)
        .def_readwrite("boundary", &ModelSpec::boundary)
        .def_property_readonly("dim", &ModelSpec::dim)
        .def("validate", &ModelSpec::validate)
        .def("__repr__", [](const ModelSpec& s) { return "ModelSpec(" + to_json(s).dump() + ")"; });

    m.def("hamiltonian", [](const ModelSpec& s) { return to_numpy(build_hamiltonian(s)); }, py::arg("spec"));

    m.def(
        "eig",
        [](const CArray& a, bool vectors) {
            EigOptions o;
            o.want_vectors = vectors;
            const auto s = eig(from_numpy(a), o);
            py::dict d;
            d["eigenvalues"] = to_numpy(CVector(s.eigenvalues));
            if (vectors) {
                const std::size_t n = s.size();
                CArray v({n, n});
                auto w = v.mutable_unchecked<2>();
                for (std::size_t k = 0; k < n; ++k)
                    for (std::size_t i = 0; i < n; ++i) w(i, k) = s.right_vectors[k][i];
                d["vectors"] = v;
                d["residuals"] = py::array_t<double>(n, s.residuals.data());
            }
            return d;
        },
        py::arg("matrix"), py::arg("vectors") = true,
        "Eigenvalues sorted by (real, imag); vectors are the columns of 'vectors'.");

    m.def(
        "max_im_epsilon",
        [](const ModelSpec& s, const std::string& precision) { return max_im_epsilon(s, parse_precision(precision)); },
        py::arg("spec"), py::arg("precision") = "auto");
    m.def(
        "is_broken",
        [](const ModelSpec& s, const std::string& precision) { return is_broken(s, parse_precision(precision)); },
        py::arg("spec"), py::arg("precision") = "auto");

    m.def(
        "target_state", [](const std::string& name, int sites) { return to_numpy(target_state(parse_target(name), sites).amplitudes()); },
        py::arg("name"), py::arg("sites"));
    m.def(
        "site_state", [](const ModelSpec& s, int k) { return to_numpy(site_state(s.basis(), k).amplitudes()); },
        py::arg("spec"), py::arg("k"));

    m.def(
        "evolve",
        [](const ModelSpec& s, const CArray& init, const CArray& target, double t_max, int steps,
           const std::string& backend) {
            EvolveOptions o;
            o.backend = parse_backend(backend);
            py::gil_scoped_release release;
            auto t = evolve_trace(s, state_from(init, s.basis()), state_from(target, s.basis()), t_max, steps, o);
            py::gil_scoped_acquire acquire;
            return trace_dict(t);
        },
        py::arg("spec"), py::arg("init"), py::arg("target"), py::arg("t_max"), py::arg("steps") = 400,
        py::arg("backend") = "pade");
    m.def(
        "dominant_state", [](const ModelSpec& s) { return to_numpy(dominant_state(build_hamiltonian(s), s.basis()).amplitudes()); },
        py::arg("spec"));

    m.def("scattering_ep", &scattering_ep, py::arg("sites"));
    m.def(
        "broken_pair_kappa",
        [](int sites, double gamma) {
            const auto r = broken_pair_kappa(sites, gamma);
            return py::make_tuple(r.momentum.real(), r.energy);
        },
        py::arg("sites"), py::arg("gamma"), "(kappa, energy) of the broken pair.");
    m.def(
        "bethe_spectrum",
        [](int sites, double potential, double gamma) {
            CVector e;
            for (const auto& r : bethe_spectrum(sites, potential, gamma)) e.push_back(r.energy);
            return to_numpy(e);
        },
        py::arg("sites"), py::arg("potential"), py::arg("gamma"));
    m.def("epts_gamma", &epts_gamma, py::arg("sites"), py::arg("potential"));
    m.def("perturbative_boundary", &perturbative_boundary, py::arg("sites"), py::arg("potential"));
    m.def(
        "effective_model",
        [](int sites, double potential) {
            const auto e = effective_model(sites, potential);
            py::dict d;
            d["theta"] = e.theta;
            d["phi"] = e.phi;
            d["omega"] = e.omega;
            d["lambda_eff"] = e.lambda_eff;
            d["v_eff"] = e.v_eff;
            return d;
        },
        py::arg("sites"), py::arg("potential"));

    m.def(
        "numeric_boundary",
        [](const ModelSpec& s, double control, double rel_tol, const std::string& precision) {
            BoundaryOptions o;
            o.rel_tol = rel_tol;
            o.precision = parse_precision(precision);
            py::gil_scoped_release release;
            return numeric_boundary_gamma(s, control, o);
        },
        py::arg("spec"), py::arg("control"), py::arg("rel_tol") = 1e-6, py::arg("precision") = "auto");
    m.def(
        "sweep",
        [](const ModelSpec& s, const std::string& x_axis, const std::string& gamma_axis, unsigned threads,
           const std::string& precision) {
            SweepOptions o;
            o.threads = threads;
            o.precision = parse_precision(precision);
            const auto x = Axis::parse(control_name(s), x_axis);
            const auto y = Axis::parse("gamma", gamma_axis);
            PhaseGrid g;
            {
                py::gil_scoped_release release;
                g = sweep_grid(s, x, y, o);
            }
            py::array_t<double> values({g.x_values.size(), g.y_values.size()});
            py::array_t<bool> broken({g.x_values.size(), g.y_values.size()});
            auto v = values.mutable_unchecked<2>();
            auto b = broken.mutable_unchecked<2>();
            for (std::size_t i = 0; i < g.x_values.size(); ++i)
                for (std::size_t j = 0; j < g.y_values.size(); ++j) {
                    v(i, j) = g.at(i, j);
                    b(i, j) = g.broken(i, j);
                }
            py::dict d;
            d["x"] = py::array_t<double>(g.x_values.size(), g.x_values.data());
            d["gamma"] = py::array_t<double>(g.y_values.size(), g.y_values.data());
            d["max_im_eps"] = values;
            d["broken"] = broken;
            d["failures"] = g.failures;
            return d;
        },
        py::arg("spec"), py::arg("x_axis"), py::arg("gamma_axis"), py::arg("threads") = 0,
        py::arg("precision") = "double",
        "Axes are 'min:max:{log|lin}:count'; x is V for XY models and Delta for Ising.");
    m.def(
        "optimize_gamma",
        [](const ModelSpec& s, const CArray& init, const CArray& target, double t_max, int iterations) {
            OptimizeOptions o;
            o.iterations = iterations;
            py::gil_scoped_release release;
            const auto r = optimize_gamma(s, state_from(init, s.basis()), state_from(target, s.basis()), t_max, o);
            return std::make_tuple(r.gamma_star, r.f_star, r.gamma_c);
        },
        py::arg("spec"), py::arg("init"), py::arg("target"), py::arg("t_max"), py::arg("iterations") = 30,
        "(gamma_star, f_star, gamma_c).");
}
