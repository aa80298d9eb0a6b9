#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pottsgram/analysis.hpp"

using namespace pottsgram;

namespace {

ObservableRow base_row(double kT, std::size_t N, double chi_tilde) {
    ObservableRow row;
    row.K = 20;
    row.J = 1.0;
    row.q = 0.01;
    row.t = 0.0;
    row.epsilon = 0.0;
    row.kT = kT;
    row.N = N;
    row.samples = 1000;
    row.chi_tilde = chi_tilde;
    row.chi = chi_tilde;
    row.mean_M = 0.1;
    return row;
}

// chi~ = N^{gamma/nu} * f(N^{1/nu} (T-Tc)/Tc) with a smooth bump f.
ObservableTable synthetic_collapse(double Tc, double nu, double gamma,
                                   const std::vector<std::size_t>& sizes, double kt_lo,
                                   double kt_hi, double kt_step) {
    std::vector<ObservableRow> rows;
    for (const auto N : sizes) {
        for (double kt = kt_lo; kt <= kt_hi + 1e-9; kt += kt_step) {
            const double x = std::pow(double(N), 1.0 / nu) * (kt - Tc) / Tc;
            const double f = std::exp(-x * x) + 0.05;
            rows.push_back(base_row(kt, N, std::pow(double(N), gamma / nu) * f));
        }
    }
    return ObservableTable(std::move(rows));
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("perfect synthetic data collapses at the generating parameters") {
    const auto table = synthetic_collapse(0.24, 2.5, 2.0, {64, 128, 256, 512}, 0.12, 0.40, 0.02);
    const double at_truth = collapse_quality(table, 0.24, 2.5, 2.0);
    CHECK(at_truth < 0.02);
    CHECK(at_truth < collapse_quality(table, 0.28, 2.5, 2.0));
    CHECK(at_truth < collapse_quality(table, 0.20, 2.5, 2.0));
    CHECK(at_truth < collapse_quality(table, 0.24, 3.25, 2.0));
    CHECK(at_truth < collapse_quality(table, 0.24, 1.75, 2.0));
    CHECK(at_truth < collapse_quality(table, 0.24, 2.5, 2.75));
    CHECK(at_truth < collapse_quality(table, 0.24, 2.5, 1.25));
}

TEST_CASE("constant data yields zero quality for any parameters") {
    std::vector<ObservableRow> rows;
    for (const auto N : {16u, 32u, 64u})
        for (double kt = 0.1; kt <= 0.5; kt += 0.1) rows.push_back(base_row(kt, N, 1.0));
    // y = chi~/N^{gamma/nu} differs by size unless gamma = 0; use gamma=0.
    const ObservableTable table(std::move(rows));
    CHECK(collapse_quality(table, 0.3, 1.0, 0.0) == 0.0);
}

TEST_CASE("quality is invariant under a common rescaling of chi~") {
    auto table = synthetic_collapse(0.24, 2.5, 2.0, {64, 128, 256}, 0.12, 0.40, 0.02);
    std::vector<ObservableRow> scaled;
    for (auto row : table.rows()) {
        row.chi_tilde *= 37.5;
        scaled.push_back(row);
    }
    const ObservableTable table2(std::move(scaled));
    const double a = collapse_quality(table, 0.26, 2.0, 1.75);
    const double b = collapse_quality(table2, 0.26, 2.0, 1.75);
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("collapse requires three overlapping sizes") {
    const auto table = synthetic_collapse(0.24, 2.5, 2.0, {64, 128}, 0.12, 0.40, 0.02);
    CHECK_THROWS_AS(collapse_quality(table, 0.24, 2.5, 2.0), InsufficientOverlap);
}

TEST_CASE("grid search recovers the generating point exactly at grid resolution") {
    const auto table = synthetic_collapse(0.24, 2.5, 2.0, {64, 128, 256, 512}, 0.10, 0.44, 0.02);
    CollapseGridSpec grid;
    grid.tc_min = 0.18;
    grid.tc_max = 0.30;
    grid.nu_min = 1.5;
    grid.nu_max = 3.5;
    grid.gamma_min = 1.0;
    grid.gamma_max = 3.0;
    const auto fit = grid_search_exponents(table, grid);
    CHECK(fit.Tc == doctest::Approx(0.24).epsilon(1e-12));
    CHECK(fit.nu == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(fit.gamma == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("grid search is independent of row order") {
    auto rows = synthetic_collapse(0.24, 2.5, 2.0, {64, 128, 256}, 0.12, 0.40, 0.02).rows();
    std::vector<ObservableRow> shuffled(rows);
    std::mt19937 shuffle_rng(7);
    std::shuffle(shuffled.begin(), shuffled.end(), shuffle_rng);
    CollapseGridSpec grid;
    grid.tc_min = 0.20;
    grid.tc_max = 0.28;
    grid.nu_min = 2.0;
    grid.nu_max = 3.0;
    grid.gamma_min = 1.5;
    grid.gamma_max = 2.5;
    const auto a = grid_search_exponents(ObservableTable(std::move(rows)), grid);
    const auto b = grid_search_exponents(ObservableTable(std::move(shuffled)), grid);
    CHECK(a.Tc == b.Tc);
    CHECK(a.nu == b.nu);
    CHECK(a.gamma == b.gamma);
    CHECK(a.quality == b.quality);
}

TEST_CASE("landscape covers the declared grid") {
    const auto table = synthetic_collapse(0.24, 2.5, 2.0, {64, 128, 256}, 0.12, 0.40, 0.02);
    CollapseGridSpec grid;
    grid.tc_min = 0.22;
    grid.tc_max = 0.26;
    grid.nu_min = 2.25;
    grid.nu_max = 2.75;
    grid.gamma_min = 1.75;
    grid.gamma_max = 2.25;
    const auto landscape = collapse_landscape(table, grid);
    CHECK(landscape.size() == 3 * 3 * 3);
}

namespace {

// Synthetic observables with a peaked chi and a Binder curve that dips
// negative just above tc, on an arbitrary temperature grid.
ObservableTable synthetic_transition(const std::vector<double>& kts, double tc) {
    std::vector<ObservableRow> rows;
    for (const auto N : {128u, 256u, 512u}) {
        for (const double kt : kts) {
            auto row = base_row(kt, N, 1.0);
            const double w = 0.05 + 0.5 * tc;
            row.chi = double(N) * 0.05 * std::exp(-(kt - tc) * (kt - tc) / (2 * w * w / 64));
            if (kt < tc - 1e-9)
                row.binder = 0.9;
            else if (kt < tc + 0.07 - 1e-9)
                row.binder = -0.2;  // the departure dip
            else
                row.binder = 0.01;
            rows.push_back(row);
        }
    }
    return ObservableTable(std::move(rows));
}

std::vector<double> linspace(double lo, double hi, double step) {
    std::vector<double> out;
    for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
    return out;
}

}  // namespace

TEST_CASE("binder departure finds the dip onset scanning up in temperature") {
    const auto table = synthetic_transition(linspace(0.10, 0.50, 0.02), 0.24);
    const auto est = estimate_critical_temperature(table, TcMethod::BinderDeparture);
    CHECK(est.transition);
    CHECK(est.Tc == doctest::Approx(0.24).epsilon(1e-9));  // first point inside the dip
    CHECK(est.uncertainty == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("binder departure is stable under grid refinement") {
    const auto coarse = synthetic_transition(linspace(0.10, 0.50, 0.04), 0.24);
    const auto fine = synthetic_transition(linspace(0.10, 0.50, 0.02), 0.24);
    const auto a = estimate_critical_temperature(coarse, TcMethod::BinderDeparture);
    const auto b = estimate_critical_temperature(fine, TcMethod::BinderDeparture);
    CHECK(a.transition);
    CHECK(b.transition);
    CHECK(std::fabs(a.Tc - b.Tc) <= a.uncertainty * 2 + 1e-9);
}

TEST_CASE("susceptibility peak fires on a prominent interior maximum") {
    const auto table = synthetic_transition(linspace(0.10, 0.50, 0.02), 0.24);
    const auto est = estimate_critical_temperature(table, TcMethod::SusceptibilityPeak);
    CHECK(est.transition);
    CHECK(est.Tc == doctest::Approx(0.24).epsilon(1e-9));
}

TEST_CASE("flat tables report no transition") {
    std::vector<ObservableRow> rows;
    for (const auto N : {128u, 256u})
        for (double kt = 0.1; kt <= 0.9; kt += 0.1) {
            auto row = base_row(kt, N, 1.0);
            row.chi = 1.0 + 0.01 * kt;  // monotone, no interior peak
            row.binder = 0.01;
            rows.push_back(row);
        }
    const ObservableTable table(std::move(rows));
    CHECK_FALSE(estimate_critical_temperature(table, TcMethod::BinderDeparture).transition);
    CHECK_FALSE(estimate_critical_temperature(table, TcMethod::SusceptibilityPeak).transition);
}

TEST_CASE("narrow scans raise RangeTooNarrow") {
    std::vector<ObservableRow> rows = {base_row(0.1, 64, 1.0), base_row(0.2, 64, 1.0)};
    const ObservableTable table(std::move(rows));
    CHECK_THROWS_AS(estimate_critical_temperature(table, TcMethod::BinderDeparture),
                    RangeTooNarrow);
}

TEST_CASE("fss-grid estimate fires only on genuine collapse") {
    const auto good = synthetic_collapse(0.24, 2.5, 2.0, {64, 128, 256, 512}, 0.10, 0.44, 0.02);
    CollapseGridSpec grid;
    grid.tc_min = 0.18;
    grid.tc_max = 0.30;
    grid.nu_min = 2.0;
    grid.nu_max = 3.0;
    grid.gamma_min = 1.5;
    grid.gamma_max = 2.5;
    const auto est = estimate_critical_temperature(good, TcMethod::FssGrid, &grid);
    CHECK(est.transition);
    CHECK(est.Tc == doctest::Approx(0.24).epsilon(1e-12));

    // chi~ independent of N: y-curves separate by N^{-gamma/nu}, no collapse
    std::vector<ObservableRow> flat;
    for (const auto N : {64u, 128u, 256u, 512u})
        for (double kt = 0.10; kt <= 0.44; kt += 0.02)
            flat.push_back(base_row(kt, N, 2.0 + 0.1 * kt));
    const ObservableTable disordered(std::move(flat));
    CHECK_FALSE(estimate_critical_temperature(disordered, TcMethod::FssGrid, &grid).transition);
}

TEST_CASE("phase diagram assembles estimates per axis value") {
    std::vector<ObservableRow> rows;
    for (const double t : {0.3, 0.5, 0.7}) {
        const double tc = t < 0.7 ? 0.30 - 0.1 * t : -1.0;
        for (const auto N : {128u, 256u, 512u})
            for (double kt = 0.08; kt <= 0.52; kt += 0.02) {
                auto row = base_row(kt, N, 1.0);
                row.t = t;
                if (tc > 0) {
                    row.chi = double(N) * 0.05 *
                              std::exp(-(kt - tc) * (kt - tc) / (2 * 0.02 / 64));
                    row.binder = kt < tc ? 0.9 : (kt < tc + 0.05 ? -0.2 : 0.01);
                } else {
                    row.chi = 0.5;
                    row.binder = 0.005;
                }
                rows.push_back(row);
            }
    }
    const ObservableTable table(std::move(rows));
    const auto diagram =
        build_phase_diagram(table, PhaseAxis::t, {TcMethod::BinderDeparture});
    REQUIRE(diagram.size() == 3);
    CHECK(diagram[0].axis_value == 0.3);
    REQUIRE(diagram[0].estimate.has_value());
    CHECK(diagram[0].estimate->transition);
    CHECK(diagram[1].estimate->transition);
    CHECK(diagram[1].estimate->Tc < diagram[0].estimate->Tc);
    CHECK_FALSE(diagram[2].estimate->transition);
}

TEST_CASE("phase diagram rejects mixed parameter families") {
    std::vector<ObservableRow> rows;
    auto a = base_row(0.1, 64, 1.0);
    auto b = base_row(0.2, 64, 1.0);
    b.K = 2;  // different K in the same table
    b.t = 0.5;
    rows.push_back(a);
    rows.push_back(b);
    const ObservableTable table(std::move(rows));
    CHECK_THROWS_AS(build_phase_diagram(table, PhaseAxis::t, {TcMethod::BinderDeparture}),
                    SchemaError);
}

}  // TEST_SUITE
