#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pottsgram/table.hpp"

namespace pottsgram {

// Grid-search ranges for the scaling collapse. Steps are fixed by the
// resolution of the reported exponents: 0.02 in Tc, 0.25 in nu and gamma.
struct CollapseGridSpec {
    double tc_min = 0.14;
    double tc_max = 0.34;
    double nu_min = 1.0;
    double nu_max = 4.0;
    double gamma_min = 1.0;
    double gamma_max = 4.0;

    // Rows enter the collapse when |T - Tc| <= window * Tc.
    double window = 0.5;

    static constexpr double kTcStep = 0.02;
    static constexpr double kExponentStep = 0.25;
};

struct ScalingResult {
    double Tc = 0.0;
    double nu = 0.0;
    double gamma = 0.0;
    double quality = 0.0;
    CollapseGridSpec grid;
};

struct QualityPoint {
    double Tc, nu, gamma, quality;
};

// Collapse residual of chi~ under (Tc, nu, gamma): rescale rows to
// x = N^{1/nu} (T-Tc)/Tc, y = chi~ / N^{gamma/nu}, fit a master curve by
// local linear regression over the sizes other than the point's own, and
// return mean squared residual normalized by the variance of y.
// Throws InsufficientOverlap unless >= 3 sizes overlap in x.
double collapse_quality(const ObservableTable& table, double Tc, double nu, double gamma,
                        double window = 0.5);

// Minimizing grid point; ties break to the lexicographically smallest
// (Tc, nu, gamma).
ScalingResult grid_search_exponents(const ObservableTable& table, const CollapseGridSpec& grid);

// Full quality landscape over the grid (NaN quality where the overlap
// precondition fails).
std::vector<QualityPoint> collapse_landscape(const ObservableTable& table,
                                             const CollapseGridSpec& grid);

// Rescaled (x, y) points at fixed (Tc, nu, gamma), for collapse plots.
struct CollapsePoint {
    std::size_t N;
    double kT, x, y;
};
std::vector<CollapsePoint> collapse_points(const ObservableTable& table, double Tc, double nu,
                                           double gamma, double window = 0.5);

enum class TcMethod { BinderDeparture, SusceptibilityPeak, FssGrid };

const char* tc_method_name(TcMethod method);

// The transition is flagged when U < -0.05 (Binder departure), when the
// susceptibility has an interior peak at least twice both scan endpoints,
// or when the grid search finds an interior minimizer with quality below
// 0.1.
inline constexpr double kBinderDepartureThreshold = -0.05;
inline constexpr double kPeakProminenceFactor = 2.0;
inline constexpr double kFssQualityThreshold = 0.1;

struct TcEstimate {
    TcMethod method = TcMethod::BinderDeparture;
    bool transition = false;  // false = NoTransition
    double Tc = 0.0;
    double uncertainty = 0.0;
};

// Throws RangeTooNarrow when the table cannot support any criterion
// (fewer than 3 temperatures or fewer than 2 sizes).
TcEstimate estimate_critical_temperature(const ObservableTable& table, TcMethod method,
                                         const CollapseGridSpec* fss_grid = nullptr);

enum class PhaseAxis { q, t };

struct PhaseDiagramPoint {
    double axis_value = 0.0;
    TcMethod method = TcMethod::BinderDeparture;
    std::optional<TcEstimate> estimate;  // empty when the scan was too narrow
};

// estimate_critical_temperature per axis value and method; RangeTooNarrow
// points are reported, not fatal.
std::vector<PhaseDiagramPoint> build_phase_diagram(const ObservableTable& table, PhaseAxis axis,
                                                   const std::vector<TcMethod>& methods,
                                                   const CollapseGridSpec* fss_grid = nullptr);

}  // namespace pottsgram
