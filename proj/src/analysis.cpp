#include "pottsgram/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace pottsgram {

namespace {

struct ScaledPoint {
    double x, y;
    std::size_t N;
    double kT;
};

std::vector<ScaledPoint> rescale(const ObservableTable& table, double Tc, double nu,
                                 double gamma, double window) {
    std::vector<ScaledPoint> pts;
    for (const auto& r : table.rows()) {
        if (!r.ok()) continue;
        if (std::fabs(r.kT - Tc) > window * Tc) continue;
        const double n = static_cast<double>(r.N);
        pts.push_back({std::pow(n, 1.0 / nu) * (r.kT - Tc) / Tc,
                       r.chi_tilde / std::pow(n, gamma / nu), r.N, r.kT});
    }
    std::sort(pts.begin(), pts.end(), [](const ScaledPoint& a, const ScaledPoint& b) {
        return std::tie(a.x, a.N, a.kT) < std::tie(b.x, b.N, b.kT);
    });
    return pts;
}

// Linear fit through the m points from other sizes nearest in x; constant
// fit when their abscissas are degenerate.
double master_curve_at(const std::vector<ScaledPoint>& pts, std::size_t self,
                       std::size_t max_neighbors, bool& usable) {
    const double x0 = pts[self].x;
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i].N != pts[self].N) candidates.push_back(i);
    if (candidates.size() < 2) {
        usable = false;
        return 0.0;
    }
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        const double da = std::fabs(pts[a].x - x0), db = std::fabs(pts[b].x - x0);
        return std::tie(da, a) < std::tie(db, b);
    });
    const std::size_t m = std::min(max_neighbors, candidates.size());

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& p = pts[candidates[i]];
        sx += p.x;
        sy += p.y;
        sxx += p.x * p.x;
        sxy += p.x * p.y;
    }
    const double dm = static_cast<double>(m);
    const double denom = dm * sxx - sx * sx;
    usable = true;
    if (denom <= 1e-12 * dm * sxx) return sy / dm;
    const double slope = (dm * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / dm;
    return intercept + slope * x0;
}

constexpr std::size_t kCollapseNeighbors = 6;

}  // namespace

double collapse_quality(const ObservableTable& table, double Tc, double nu, double gamma,
                        double window) {
    const auto pts = rescale(table, Tc, nu, gamma, window);

    // Per-size x ranges; a point participates when another size covers it.
    std::map<std::size_t, std::pair<double, double>> ranges;
    for (const auto& p : pts) {
        auto [it, fresh] = ranges.emplace(p.N, std::make_pair(p.x, p.x));
        if (!fresh) {
            it->second.first = std::min(it->second.first, p.x);
            it->second.second = std::max(it->second.second, p.x);
        }
    }

    std::vector<std::size_t> evaluable;
    std::set<std::size_t> sizes_covered;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool covered = false;
        for (const auto& [n, range] : ranges)
            if (n != pts[i].N && pts[i].x >= range.first && pts[i].x <= range.second) {
                covered = true;
                break;
            }
        if (covered) {
            evaluable.push_back(i);
            sizes_covered.insert(pts[i].N);
        }
    }
    if (sizes_covered.size() < 3)
        throw InsufficientOverlap("collapse needs >= 3 sizes with overlapping rescaled ranges");

    double mean_y = 0.0;
    for (const auto i : evaluable) mean_y += pts[i].y;
    mean_y /= static_cast<double>(evaluable.size());
    double var_y = 0.0;
    for (const auto i : evaluable) var_y += (pts[i].y - mean_y) * (pts[i].y - mean_y);
    var_y /= static_cast<double>(evaluable.size());
    if (var_y == 0.0) return 0.0;

    double sum_sq = 0.0;
    std::size_t used = 0;
    for (const auto i : evaluable) {
        bool usable = false;
        const double fit = master_curve_at(pts, i, kCollapseNeighbors, usable);
        if (!usable) continue;
        const double r = pts[i].y - fit;
        sum_sq += r * r;
        ++used;
    }
    if (used == 0)
        throw InsufficientOverlap("no point has enough cross-size neighbors");
    return sum_sq / static_cast<double>(used) / var_y;
}

namespace {

std::vector<double> grid_values(double lo, double hi, double step) {
    std::vector<double> out;
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) out.push_back(lo + i * step);
    return out;
}

}  // namespace

std::vector<QualityPoint> collapse_landscape(const ObservableTable& table,
                                             const CollapseGridSpec& grid) {
    const auto tcs = grid_values(grid.tc_min, grid.tc_max, CollapseGridSpec::kTcStep);
    const auto nus = grid_values(grid.nu_min, grid.nu_max, CollapseGridSpec::kExponentStep);
    const auto gammas =
        grid_values(grid.gamma_min, grid.gamma_max, CollapseGridSpec::kExponentStep);

    std::vector<QualityPoint> landscape(tcs.size() * nus.size() * gammas.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t a = 0; a < tcs.size(); ++a) {
        for (std::size_t b = 0; b < nus.size(); ++b)
            for (std::size_t c = 0; c < gammas.size(); ++c) {
                QualityPoint point{tcs[a], nus[b], gammas[c], std::nan("")};
                if (point.Tc > 0.0 && point.nu > 0.0) {
                    try {
                        point.quality =
                            collapse_quality(table, point.Tc, point.nu, point.gamma, grid.window);
                    } catch (const InsufficientOverlap&) {
                    }
                }
                landscape[(a * nus.size() + b) * gammas.size() + c] = point;
            }
    }
    return landscape;
}

ScalingResult grid_search_exponents(const ObservableTable& table, const CollapseGridSpec& grid) {
    const auto landscape = collapse_landscape(table, grid);
    const QualityPoint* best = nullptr;
    for (const auto& point : landscape) {
        if (std::isnan(point.quality)) continue;
        if (best == nullptr || point.quality < best->quality) best = &point;
    }
    if (best == nullptr)
        throw InsufficientOverlap("no grid point satisfies the collapse overlap precondition");
    ScalingResult result;
    result.Tc = best->Tc;
    result.nu = best->nu;
    result.gamma = best->gamma;
    result.quality = best->quality;
    result.grid = grid;
    return result;
}

std::vector<CollapsePoint> collapse_points(const ObservableTable& table, double Tc, double nu,
                                           double gamma, double window) {
    std::vector<CollapsePoint> out;
    for (const auto& p : rescale(table, Tc, nu, gamma, window))
        out.push_back({p.N, p.kT, p.x, p.y});
    return out;
}

const char* tc_method_name(TcMethod method) {
    switch (method) {
        case TcMethod::BinderDeparture: return "binder_departure";
        case TcMethod::SusceptibilityPeak: return "susceptibility_peak";
        case TcMethod::FssGrid: return "fss_grid";
    }
    return "unknown";
}

namespace {

// Half the local temperature grid spacing around index i.
double local_uncertainty(const std::vector<double>& kts, std::size_t i) {
    double spacing;
    if (i > 0 && i + 1 < kts.size())
        spacing = (kts[i + 1] - kts[i - 1]) / 2.0;
    else if (i + 1 < kts.size())
        spacing = kts[i + 1] - kts[i];
    else
        spacing = kts[i] - kts[i - 1];
    return spacing / 2.0;
}

}  // namespace

TcEstimate estimate_critical_temperature(const ObservableTable& table, TcMethod method,
                                         const CollapseGridSpec* fss_grid) {
    std::set<double> kt_set;
    std::set<std::size_t> n_set;
    for (const auto& r : table.rows())
        if (r.ok()) {
            kt_set.insert(r.kT);
            n_set.insert(r.N);
        }
    if (kt_set.size() < 3 || n_set.size() < 2)
        throw RangeTooNarrow("need >= 3 temperatures and >= 2 sizes");

    TcEstimate estimate;
    estimate.method = method;

    if (method == TcMethod::FssGrid) {
        CollapseGridSpec grid;
        if (fss_grid != nullptr) {
            grid = *fss_grid;
        } else {
            // Search between the second and second-to-last scanned
            // temperatures, snapped to the Tc step.
            std::vector<double> kts(kt_set.begin(), kt_set.end());
            const double lo = kts[1], hi = kts[kts.size() - 2];
            grid.tc_min =
                std::ceil(lo / CollapseGridSpec::kTcStep - 1e-9) * CollapseGridSpec::kTcStep;
            grid.tc_max =
                std::floor(hi / CollapseGridSpec::kTcStep + 1e-9) * CollapseGridSpec::kTcStep;
        }
        const ScalingResult fit = grid_search_exponents(table, grid);
        const bool interior =
            fit.Tc > grid.tc_min + 1e-12 && fit.Tc < grid.tc_max - 1e-12;
        estimate.transition = interior && fit.quality < kFssQualityThreshold;
        estimate.Tc = fit.Tc;
        estimate.uncertainty = CollapseGridSpec::kTcStep / 2.0;
        return estimate;
    }

    // Both remaining methods read the largest-N curve.
    const std::size_t n_max = *n_set.rbegin();
    std::vector<const ObservableRow*> curve;
    for (const auto& r : table.rows())
        if (r.ok() && r.N == n_max) curve.push_back(&r);
    std::sort(curve.begin(), curve.end(),
              [](const ObservableRow* a, const ObservableRow* b) { return a->kT < b->kT; });
    std::vector<double> kts;
    for (const auto* r : curve) kts.push_back(r->kT);
    if (kts.size() < 3) throw RangeTooNarrow("largest size covers fewer than 3 temperatures");

    if (method == TcMethod::BinderDeparture) {
        // Scanning up in temperature, the first point where U drops below
        // the threshold: the departure from the ordered branch into the
        // negative dip. (The dip's high-T recovery edge drifts far above
        // the transition at small N and is noise-fragile, so it is not
        // used.)
        for (std::size_t i = 0; i < curve.size(); ++i) {
            if (curve[i]->binder < kBinderDepartureThreshold) {
                estimate.transition = true;
                estimate.Tc = curve[i]->kT;
                estimate.uncertainty = local_uncertainty(kts, i);
                break;
            }
        }
        return estimate;
    }

    // SusceptibilityPeak: interior argmax at least kPeakProminenceFactor
    // times both scan endpoints.
    std::size_t peak = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i]->chi > curve[peak]->chi) peak = i;
    const bool interior = peak > 0 && peak + 1 < curve.size();
    if (interior && curve[peak]->chi >= kPeakProminenceFactor * curve.front()->chi &&
        curve[peak]->chi >= kPeakProminenceFactor * curve.back()->chi) {
        estimate.transition = true;
        estimate.Tc = curve[peak]->kT;
        estimate.uncertainty = local_uncertainty(kts, peak);
    }
    return estimate;
}

std::vector<PhaseDiagramPoint> build_phase_diagram(const ObservableTable& table, PhaseAxis axis,
                                                   const std::vector<TcMethod>& methods,
                                                   const CollapseGridSpec* fss_grid) {
    // Group rows by the axis value; all remaining parameter fields must be
    // constant or the diagram would be ambiguous.
    std::map<double, std::vector<ObservableRow>> groups;
    const ObservableRow* first = nullptr;
    for (const auto& r : table.rows()) {
        if (first == nullptr) {
            first = &r;
        } else {
            const bool same = r.K == first->K && r.J == first->J &&
                              r.epsilon == first->epsilon &&
                              (axis == PhaseAxis::q ? r.t == first->t : r.q == first->q);
            if (!same)
                throw SchemaError(
                    "phase diagram input mixes parameter sets; filter to one family first");
        }
        groups[axis == PhaseAxis::q ? r.q : r.t].push_back(r);
    }

    std::vector<PhaseDiagramPoint> diagram;
    for (const auto& [value, rows] : groups) {
        ObservableTable sub{std::vector<ObservableRow>(rows)};
        for (const auto method : methods) {
            PhaseDiagramPoint point;
            point.axis_value = value;
            point.method = method;
            try {
                point.estimate = estimate_critical_temperature(sub, method, fss_grid);
            } catch (const RangeTooNarrow&) {
                point.estimate.reset();
            } catch (const InsufficientOverlap&) {
                point.estimate.reset();
            }
            diagram.push_back(std::move(point));
        }
    }
    return diagram;
}

}  // namespace pottsgram
