#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "epchain/analysis.hpp"
#include "epchain/bethe.hpp"
#include "epchain/dynamics.hpp"
#include "epchain/eig.hpp"
#include "epchain/models.hpp"

namespace epchain {

using Json = nlohmann::json;

/// %.17g; NaN and infinities as "nan", "inf", "-inf".
std::string format_double(double x);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct BoundaryRow {
    double control = 0.0;
    double gamma_exact = 0.0;
    double gamma_perturbative = 0.0;
    double gamma_numeric = 0.0;
    double rel_gap_exact_numeric = 0.0;
    bool mismatch = false;
};

/// One row of the boundary table for the XY chain. Unavailable methods are NaN:
/// the closed form needs V = 0 (γ_c from the scattering double root) or |V| > 2,
/// the perturbative value needs |V| > 2 and even N >= 6.
BoundaryRow boundary_row(int sites, double potential, const BoundaryOptions& options = {});

std::string spectrum_csv(const Spectrum& spectrum);
std::string phase_grid_csv(const PhaseGrid& grid);
std::string trace_csv(const EvolutionTrace& trace);
std::string boundary_csv(const std::vector<BoundaryRow>& rows);

Json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const Json& j);
Json to_json(const Axis& axis);
Axis axis_from_json(const Json& j);
Json to_json(const Spectrum& spectrum);
Json to_json(const PhaseGrid& grid);
PhaseGrid phase_grid_from_json(const Json& j);
Json to_json(const EvolutionTrace& trace);
EvolutionTrace trace_from_json(const Json& j);
Json to_json(const BoundaryRow& row);
BoundaryRow boundary_row_from_json(const Json& j);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
    /// Drawn as unconnected markers.
    std::vector<Series> points;
};

std::string line_plot_svg(const LinePlot& plot);

/// Heat map of log10 max|Im ε| with the broken mask outlined; `overlay`
/// points (control, γ) are drawn on top.
std::string phase_grid_svg(const PhaseGrid& grid, const std::string& title,
                           const std::vector<std::pair<double, double>>& overlay = {});

} // namespace epchain
