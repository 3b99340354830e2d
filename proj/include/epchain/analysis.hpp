#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "epchain/matrix.hpp"
#include "epchain/models.hpp"
#include "epchain/state.hpp"

namespace epchain {

enum class Precision {
    Double,
    /// 50-digit eigenvalues. Needed when γ_c is many orders below ||H||.
    Extended,
    /// Extended for dimensions up to kAutoExtendedDim, Double above.
    Auto,
};

inline constexpr std::size_t kAutoExtendedDim = 32;

Precision resolve_precision(Precision p, std::size_t dim);

/// Default |Im ε| threshold per unit of (1 + ||H||_1) in double precision.
inline constexpr double kBrokenThreshold = 1e-10;

/// Threshold actually applied to max|Im ε| for a matrix of the given norm.
/// Extended precision rescales by sqrt(eps_ext / eps_double), since
/// eigenvalue noise near a second-order EP grows like sqrt(eps).
double broken_threshold(double matrix_norm, Precision resolved, double tau = kBrokenThreshold);

/// max_n |Im ε_n|.
double max_im_epsilon(const ComplexMatrix& m, Precision precision = Precision::Double);

/// True when max|Im ε| exceeds broken_threshold for this matrix.
bool is_broken(const ComplexMatrix& m, Precision precision = Precision::Auto, double tau = kBrokenThreshold);

/// Same, building the model's Hamiltonian directly in the resolved precision.
double max_im_epsilon(const ModelSpec& spec, Precision precision);
bool is_broken(const ModelSpec& spec, Precision precision = Precision::Auto, double tau = kBrokenThreshold);

enum class AxisScale { Log, Linear };

struct Axis {
    /// "V", "Delta" or "gamma".
    std::string name;
    AxisScale scale = AxisScale::Log;
    double min = 1.0;
    double max = 1.0;
    int count = 1;

    /// Parses "min:max:{log|lin}:count".
    static Axis parse(const std::string& name, const std::string& text);
    void validate() const;
    std::vector<double> samples() const;
    std::string to_string() const;
};

/// Sets the control parameter the axis names: V for XY models, Δ for Ising.
void set_control(ModelSpec& spec, double value);
std::string control_name(const ModelSpec& spec);

struct PhaseGrid {
    ModelSpec model;
    Axis x_axis;
    Axis y_axis;
    std::vector<double> x_values;
    std::vector<double> y_values;
    /// max|Im ε|, row-major with x as the slow index. NaN marks a failed node.
    std::vector<double> values;
    /// Per-node thresholds used for the broken mask.
    std::vector<double> thresholds;
    double broken_threshold = kBrokenThreshold;
    int failures = 0;

    double at(std::size_t ix, std::size_t iy) const { return values[ix * y_values.size() + iy]; }
    bool broken(std::size_t ix, std::size_t iy) const {
        const std::size_t i = ix * y_values.size() + iy;
        return values[i] > thresholds[i];
    }
};

struct SweepOptions {
    /// 0 uses EPCHAIN_THREADS or the hardware concurrency.
    unsigned threads = 0;
    Precision precision = Precision::Double;
    double tau = kBrokenThreshold;
};

/// max|Im ε| on every (x, γ) node. Output order does not depend on threads.
PhaseGrid sweep_grid(const ModelSpec& model, const Axis& x_axis, const Axis& y_axis, const SweepOptions& options = {});

struct BoundaryOptions {
    Precision precision = Precision::Auto;
    double gamma_max = 10.0;
    double rel_tol = 1e-6;
    int scan_points = 80;
    double tau = kBrokenThreshold;
};

/// Smallest γ in (0, gamma_max] at which the spectrum leaves the real axis:
/// log-spaced scan, then bisection in log γ. Throws NoTransition if the
/// spectrum stays real up to gamma_max.
double numeric_boundary_gamma(const ModelSpec& model, double control, const BoundaryOptions& options = {});

enum class BoundaryMethod { ExactEpts, Perturbative, NumericScan };

std::string to_string(BoundaryMethod method);

struct BoundaryCurve {
    BoundaryMethod method = BoundaryMethod::NumericScan;
    /// (control, γ_c), sorted by control.
    std::vector<std::pair<double, double>> points;
};

/// Least-squares slope of ln γ_c against ln control. Needs three distinct positive controls.
double fit_boundary_slope(const BoundaryCurve& curve);

struct OptimizeOptions {
    int iterations = 30;
    /// Search interval is (γ_c, upper_factor γ_c].
    double upper_factor = 10.0;
    int steps = 400;
    BoundaryOptions boundary;
};

struct OptimizeResult {
    double gamma_star = 0.0;
    double f_star = 0.0;
    double gamma_c = 0.0;
};

/// Golden-section maximization of f(t_max) over γ in the broken region above
/// the numeric boundary at the model's current control value.
OptimizeResult optimize_gamma(const ModelSpec& model, const StateVector& init, const StateVector& target,
                              double t_max, const OptimizeOptions& options = {});

} // namespace epchain
