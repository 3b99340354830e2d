#include "epchain/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

namespace epchain {
namespace {

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double num_from(const Json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

Json num_array(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

std::vector<double> num_array_from(const Json& j) {
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& x : j) v.push_back(num_from(x));
    return v;
}

std::string kind_name(ModelKind k) { return to_string(k); }

ModelKind kind_from(const std::string& s) {
    if (s == "xy") return ModelKind::XYMagnon;
    if (s == "xy_full") return ModelKind::XYFullSpace;
    if (s == "ising") return ModelKind::TransverseIsing;
    throw ConfigError("unknown model kind '" + s + "'");
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fmt(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 150, kTop = 40, kBottom = 60;

struct Scale {
    double lo, hi;
    bool log;
    double a, b;  // pixel range

    double operator()(double v) const {
        const double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo))
                             : (v - lo) / (hi - lo);
        return a + t * (b - a);
    }
};

void fix_range(double& lo, double& hi, bool log) {
    if (!(lo < hi)) {
        if (log) {
            lo = lo > 0 ? lo / 2 : 1e-3;
            hi = lo * 4;
        } else {
            lo -= 0.5;
            hi += 0.5;
        }
    }
}

std::vector<double> ticks(double lo, double hi, bool log) {
    std::vector<double> t;
    if (log) {
        for (double e = std::ceil(std::log10(lo)); e <= std::floor(std::log10(hi)) + 1e-9; e += 1) t.push_back(std::pow(10, e));
        if (t.size() > 8) {
            std::vector<double> thin;
            const std::size_t step = (t.size() + 7) / 8;
            for (std::size_t i = 0; i < t.size(); i += step) thin.push_back(t[i]);
            t = thin;
        }
        if (t.empty()) t = {lo, hi};
    } else {
        for (int i = 0; i <= 5; ++i) t.push_back(lo + (hi - lo) * i / 5);
    }
    return t;
}

void axes(std::ostringstream& os, const Scale& sx, const Scale& sy, const std::string& xl, const std::string& yl,
          const std::string& title) {
    os << "<rect x='" << kLeft << "' y='" << kTop << "' width='" << kWidth - kLeft - kRight << "' height='"
       << kHeight - kTop - kBottom << "' fill='none' stroke='black'/>\n";
    for (double t : ticks(sx.lo, sx.hi, sx.log)) {
        const double x = sx(t);
        os << "<line x1='" << x << "' y1='" << kHeight - kBottom << "' x2='" << x << "' y2='" << kHeight - kBottom + 5
           << "' stroke='black'/>\n";
        os << "<text x='" << x << "' y='" << kHeight - kBottom + 20 << "' font-size='11' text-anchor='middle'>"
           << fmt(t, 3) << "</text>\n";
    }
    for (double t : ticks(sy.lo, sy.hi, sy.log)) {
        const double y = sy(t);
        os << "<line x1='" << kLeft - 5 << "' y1='" << y << "' x2='" << kLeft << "' y2='" << y
           << "' stroke='black'/>\n";
        os << "<text x='" << kLeft - 8 << "' y='" << y + 4 << "' font-size='11' text-anchor='end'>" << fmt(t, 3)
           << "</text>\n";
    }
    os << "<text x='" << (kLeft + kWidth - kRight) / 2 << "' y='" << kHeight - 15
       << "' font-size='13' text-anchor='middle'>" << escape_xml(xl) << "</text>\n";
    os << "<text x='20' y='" << (kTop + kHeight - kBottom) / 2 << "' font-size='13' text-anchor='middle' transform='rotate(-90 20 "
       << (kTop + kHeight - kBottom) / 2 << ")'>" << escape_xml(yl) << "</text>\n";
    os << "<text x='" << (kLeft + kWidth - kRight) / 2 << "' y='25' font-size='14' text-anchor='middle'>"
       << escape_xml(title) << "</text>\n";
}

std::string svg_open() {
    std::ostringstream os;
    os << "<?xml version='1.0' encoding='UTF-8'?>\n<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth
       << "' height='" << kHeight << "' viewBox='0 0 " << kWidth << ' ' << kHeight << "'>\n"
       << "<rect width='100%' height='100%' fill='white'/>\n";
    return os.str();
}

// Piecewise-linear approximation of the viridis map.
std::string colormap(double t) {
    static const std::array<std::array<int, 3>, 5> stops{
        {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * 4;
    const int i = std::min(3, static_cast<int>(t));
    const double f = t - i;
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])),
                  static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])),
                  static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])));
    return buf;
}

const std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

} // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw ConfigError("failed writing " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw ConfigError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

BoundaryRow boundary_row(int sites, double potential, const BoundaryOptions& options) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    BoundaryRow row{potential, nan, nan, nan, nan, false};
    ModelSpec spec;
    spec.sites = sites;
    row.gamma_numeric = numeric_boundary_gamma(spec, potential, options);
    if (potential == 0.0 && sites % 2 == 0)
        row.gamma_exact = scattering_ep(sites).second;
    else if (std::abs(potential) > 2.0)
        row.gamma_exact = epts_gamma(sites, potential);
    if (std::abs(potential) > 2.0 && sites >= 6 && sites % 2 == 0)
        row.gamma_perturbative = perturbative_boundary(sites, potential);
    if (std::isfinite(row.gamma_exact)) {
        row.rel_gap_exact_numeric = std::abs(row.gamma_exact - row.gamma_numeric) / row.gamma_numeric;
        row.mismatch = !(row.rel_gap_exact_numeric <= kBoundaryAgreement);
    }
    return row;
}

std::string spectrum_csv(const Spectrum& spectrum) {
    std::ostringstream os;
    os << "index,re,im,residual\n";
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        os << k << ',' << format_double(spectrum.eigenvalues[k].real()) << ','
           << format_double(spectrum.eigenvalues[k].imag()) << ','
           << format_double(k < spectrum.residuals.size() ? spectrum.residuals[k] : 0.0) << '\n';
    }
    return os.str();
}

std::string phase_grid_csv(const PhaseGrid& grid) {
    std::ostringstream os;
    os << "x_value,gamma,max_im_eps,broken\n";
    for (std::size_t ix = 0; ix < grid.x_values.size(); ++ix)
        for (std::size_t iy = 0; iy < grid.y_values.size(); ++iy)
            os << format_double(grid.x_values[ix]) << ',' << format_double(grid.y_values[iy]) << ','
               << format_double(grid.at(ix, iy)) << ',' << (grid.broken(ix, iy) ? 1 : 0) << '\n';
    return os.str();
}

std::string trace_csv(const EvolutionTrace& trace) {
    std::ostringstream os;
    os << "t,fidelity,log_norm\n";
    for (std::size_t k = 0; k < trace.times.size(); ++k)
        os << format_double(trace.times[k]) << ',' << format_double(trace.fidelities[k]) << ','
           << format_double(trace.log_norms[k]) << '\n';
    return os.str();
}

std::string boundary_csv(const std::vector<BoundaryRow>& rows) {
    std::ostringstream os;
    os << "control_value,gamma_exact,gamma_perturbative,gamma_numeric,rel_gap_exact_numeric,validation_mismatch\n";
    for (const auto& r : rows)
        os << format_double(r.control) << ',' << format_double(r.gamma_exact) << ','
           << format_double(r.gamma_perturbative) << ',' << format_double(r.gamma_numeric) << ','
           << format_double(r.rel_gap_exact_numeric) << ',' << (r.mismatch ? 1 : 0) << '\n';
    return os.str();
}

Json to_json(const ModelSpec& spec) {
    return Json{{"kind", kind_name(spec.kind)},
                {"N", spec.sites},
                {"V", spec.potential},
                {"gamma", spec.gamma},
                {"J", spec.coupling},
                {"Delta", spec.field},
                {"boundary", spec.boundary == IsingBoundary::Periodic ? "periodic" : "open"}};
}

ModelSpec model_spec_from_json(const Json& j) {
    ModelSpec s;
    s.kind = kind_from(j.at("kind").get<std::string>());
    s.sites = j.at("N").get<int>();
    s.potential = j.at("V").get<double>();
    s.gamma = j.at("gamma").get<double>();
    s.coupling = j.at("J").get<double>();
    s.field = j.at("Delta").get<double>();
    s.boundary = j.at("boundary").get<std::string>() == "open" ? IsingBoundary::Open : IsingBoundary::Periodic;
    return s;
}

Json to_json(const Axis& axis) {
    return Json{{"name", axis.name},
                {"scale", axis.scale == AxisScale::Log ? "log" : "lin"},
                {"min", axis.min},
                {"max", axis.max},
                {"count", axis.count}};
}

Axis axis_from_json(const Json& j) {
    Axis a;
    a.name = j.at("name").get<std::string>();
    a.scale = j.at("scale").get<std::string>() == "log" ? AxisScale::Log : AxisScale::Linear;
    a.min = j.at("min").get<double>();
    a.max = j.at("max").get<double>();
    a.count = j.at("count").get<int>();
    return a;
}

Json to_json(const Spectrum& spectrum) {
    Json vals = Json::array();
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        Json e{{"re", spectrum.eigenvalues[k].real()}, {"im", spectrum.eigenvalues[k].imag()}};
        if (k < spectrum.residuals.size()) e["residual"] = spectrum.residuals[k];
        vals.push_back(e);
    }
    return Json{{"eigenvalues", vals}, {"matrix_norm", spectrum.matrix_norm}};
}

Json to_json(const PhaseGrid& grid) {
    return Json{{"model", to_json(grid.model)},
                {"x_axis", to_json(grid.x_axis)},
                {"y_axis", to_json(grid.y_axis)},
                {"x_values", num_array(grid.x_values)},
                {"y_values", num_array(grid.y_values)},
                {"values", num_array(grid.values)},
                {"thresholds", num_array(grid.thresholds)},
                {"broken_threshold", grid.broken_threshold},
                {"failures", grid.failures}};
}

PhaseGrid phase_grid_from_json(const Json& j) {
    PhaseGrid g;
    g.model = model_spec_from_json(j.at("model"));
    g.x_axis = axis_from_json(j.at("x_axis"));
    g.y_axis = axis_from_json(j.at("y_axis"));
    g.x_values = num_array_from(j.at("x_values"));
    g.y_values = num_array_from(j.at("y_values"));
    g.values = num_array_from(j.at("values"));
    g.thresholds = num_array_from(j.at("thresholds"));
    g.broken_threshold = j.at("broken_threshold").get<double>();
    g.failures = j.at("failures").get<int>();
    if (g.values.size() != g.x_values.size() * g.y_values.size() || g.thresholds.size() != g.values.size())
        throw ConfigError("phase grid JSON: value count does not match the axes");
    return g;
}

Json to_json(const EvolutionTrace& trace) {
    return Json{{"spec", to_json(trace.spec)},        {"target", trace.target_name},
                {"gamma_used", trace.gamma_used},     {"times", num_array(trace.times)},
                {"fidelities", num_array(trace.fidelities)}, {"log_norms", num_array(trace.log_norms)}};
}

EvolutionTrace trace_from_json(const Json& j) {
    EvolutionTrace t;
    t.spec = model_spec_from_json(j.at("spec"));
    t.target_name = j.at("target").get<std::string>();
    t.gamma_used = j.at("gamma_used").get<double>();
    t.times = num_array_from(j.at("times"));
    t.fidelities = num_array_from(j.at("fidelities"));
    t.log_norms = num_array_from(j.at("log_norms"));
    if (t.fidelities.size() != t.times.size() || t.log_norms.size() != t.times.size())
        throw ConfigError("trace JSON: column lengths differ");
    return t;
}

Json to_json(const BoundaryRow& row) {
    return Json{{"control_value", num(row.control)},
                {"gamma_exact", num(row.gamma_exact)},
                {"gamma_perturbative", num(row.gamma_perturbative)},
                {"gamma_numeric", num(row.gamma_numeric)},
                {"rel_gap_exact_numeric", num(row.rel_gap_exact_numeric)},
                {"validation_mismatch", row.mismatch}};
}

BoundaryRow boundary_row_from_json(const Json& j) {
    return {num_from(j.at("control_value")),     num_from(j.at("gamma_exact")),
            num_from(j.at("gamma_perturbative")), num_from(j.at("gamma_numeric")),
            num_from(j.at("rel_gap_exact_numeric")), j.at("validation_mismatch").get<bool>()};
}

std::string line_plot_svg(const LinePlot& plot) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
    auto extend = [&](const Series& s) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            const double x = s.x[i], y = s.y[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if ((plot.log_x && x <= 0) || (plot.log_y && y <= 0)) continue;
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
        }
    };
    for (const auto& s : plot.series) extend(s);
    for (const auto& s : plot.points) extend(s);
    if (!std::isfinite(xlo)) {
        xlo = plot.log_x ? 1 : 0;
        xhi = xlo + 1;
        ylo = plot.log_y ? 1 : 0;
        yhi = ylo + 1;
    }
    fix_range(xlo, xhi, plot.log_x);
    fix_range(ylo, yhi, plot.log_y);
    const Scale sx{xlo, xhi, plot.log_x, kLeft, kWidth - kRight};
    const Scale sy{ylo, yhi, plot.log_y, kHeight - kBottom, kTop};

    std::ostringstream os;
    os << svg_open();
    axes(os, sx, sy, plot.x_label, plot.y_label, plot.title);
    std::size_t colour = 0;
    double legend_y = kTop + 10;
    auto legend = [&](const std::string& label, const char* c) {
        if (label.empty()) return;
        os << "<rect x='" << kWidth - kRight + 10 << "' y='" << legend_y - 8 << "' width='12' height='8' fill='" << c
           << "'/>\n<text x='" << kWidth - kRight + 26 << "' y='" << legend_y << "' font-size='11'>"
           << escape_xml(label) << "</text>\n";
        legend_y += 16;
    };
    for (const auto& s : plot.series) {
        const char* c = kPalette[colour++ % kPalette.size()];
        os << "<polyline fill='none' stroke='" << c << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if ((plot.log_x && s.x[i] <= 0) || (plot.log_y && s.y[i] <= 0)) continue;
            os << fmt(sx(s.x[i]), 6) << ',' << fmt(sy(s.y[i]), 6) << ' ';
        }
        os << "'/>\n";
        legend(s.label, c);
    }
    for (const auto& s : plot.points) {
        const char* c = kPalette[colour++ % kPalette.size()];
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if ((plot.log_x && s.x[i] <= 0) || (plot.log_y && s.y[i] <= 0)) continue;
            os << "<circle cx='" << fmt(sx(s.x[i]), 6) << "' cy='" << fmt(sy(s.y[i]), 6) << "' r='3' fill='" << c
               << "'/>\n";
        }
        legend(s.label, c);
    }
    os << "</svg>\n";
    return os.str();
}

std::string phase_grid_svg(const PhaseGrid& grid, const std::string& title,
                           const std::vector<std::pair<double, double>>& overlay) {
    const bool lx = grid.x_axis.scale == AxisScale::Log, ly = grid.y_axis.scale == AxisScale::Log;
    const std::size_t nx = grid.x_values.size(), ny = grid.y_values.size();
    // Cell edges halfway between samples (geometric midpoints on log axes).
    auto edges = [](const std::vector<double>& v, bool log) {
        std::vector<double> e(v.size() + 1);
        if (v.size() == 1) {
            e[0] = log ? v[0] / 1.5 : v[0] - 0.5;
            e[1] = log ? v[0] * 1.5 : v[0] + 0.5;
            return e;
        }
        for (std::size_t i = 1; i < v.size(); ++i) e[i] = log ? std::sqrt(v[i - 1] * v[i]) : 0.5 * (v[i - 1] + v[i]);
        e[0] = log ? v[0] * v[0] / e[1] : 2 * v[0] - e[1];
        e.back() = log ? v.back() * v.back() / e[v.size() - 1] : 2 * v.back() - e[v.size() - 1];
        return e;
    };
    const auto ex = edges(grid.x_values, lx), ey = edges(grid.y_values, ly);
    double xlo = ex.front(), xhi = ex.back(), ylo = ey.front(), yhi = ey.back();
    if (!lx && xlo < 0 && grid.x_values.front() >= 0) xlo = 0;
    if (!ly && ylo < 0 && grid.y_values.front() >= 0) ylo = 0;
    const Scale sx{xlo, xhi, lx, kLeft, kWidth - kRight};
    const Scale sy{ylo, yhi, ly, kHeight - kBottom, kTop};

    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        if (!(grid.values[i] > grid.thresholds[i])) continue;
        vmin = std::min(vmin, std::log10(grid.values[i]));
        vmax = std::max(vmax, std::log10(grid.values[i]));
    }
    if (!(vmax > vmin)) vmax = vmin + 1;

    std::ostringstream os;
    os << svg_open();
    for (std::size_t ix = 0; ix < nx; ++ix) {
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const double v = grid.at(ix, iy);
            std::string fill;
            if (std::isnan(v))
                fill = "#bbbbbb";
            else if (!grid.broken(ix, iy))
                fill = "#ffffff";
            else
                fill = colormap((std::log10(v) - vmin) / (vmax - vmin));
            const double x0 = sx(std::max(ex[ix], xlo)), x1 = sx(ex[ix + 1]);
            const double y0 = sy(ey[iy + 1]), y1 = sy(std::max(ey[iy], ylo));
            os << "<rect x='" << fmt(x0, 6) << "' y='" << fmt(y0, 6) << "' width='" << fmt(x1 - x0 + 0.3, 5)
               << "' height='" << fmt(y1 - y0 + 0.3, 5) << "' fill='" << fill << "'/>\n";
        }
    }
    for (auto [x, y] : overlay) {
        if (!std::isfinite(x) || !std::isfinite(y) || x < xlo || x > xhi || y < ylo || y > yhi) continue;
        os << "<circle cx='" << fmt(sx(x), 6) << "' cy='" << fmt(sy(y), 6)
           << "' r='2.5' fill='none' stroke='#e41a1c' stroke-width='1.2'/>\n";
    }
    axes(os, sx, sy, grid.x_axis.name, grid.y_axis.name, title);
    // Colour bar.
    const double bx = kWidth - kRight + 20, by0 = kTop, by1 = kHeight - kBottom;
    for (int i = 0; i < 50; ++i) {
        const double t = i / 49.0;
        os << "<rect x='" << bx << "' y='" << fmt(by1 - (i + 1) * (by1 - by0) / 50, 6) << "' width='16' height='"
           << fmt((by1 - by0) / 50 + 0.5, 4) << "' fill='" << colormap(t) << "'/>\n";
    }
    os << "<text x='" << bx + 20 << "' y='" << by1 << "' font-size='11'>1e" << fmt(vmin, 3) << "</text>\n";
    os << "<text x='" << bx + 20 << "' y='" << by0 + 10 << "' font-size='11'>1e" << fmt(vmax, 3) << "</text>\n";
    os << "<text x='" << bx << "' y='" << by0 - 8 << "' font-size='11'>|Im e|</text>\n";
    os << "</svg>\n";
    return os.str();
}

} // namespace epchain
