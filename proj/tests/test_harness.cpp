#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "pottsgram/csv.hpp"
#include "pottsgram/ensemble.hpp"
#include "pottsgram/sweep.hpp"

using namespace pottsgram;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "pottsgram_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
    const fs::path path = dir / "config.json";
    std::ofstream out(path);
    out << body;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config parses arrays, scalars, and range objects") {
    const auto dir = scratch_dir("config");
    const auto path = write_config(dir, R"({
        "K": 3,
        "q": [0.01, 0.1],
        "kT": {"from": 0.1, "to": 0.3, "step": 0.1},
        "N": [8, 16],
        "samples": 40,
        "seed": 9,
        "artifacts": ["observables", "histogram"]
    })");
    const auto config = SweepConfig::from_json_file(path.string());
    CHECK(config.K == std::vector<int>{3});
    CHECK(config.q == std::vector<double>{0.01, 0.1});
    REQUIRE(config.kT.size() == 3);
    CHECK(config.kT[2] == doctest::Approx(0.3));
    CHECK(config.N == std::vector<std::size_t>{8, 16});
    CHECK(*config.samples == 40);
    CHECK(config.seed == 9);
    CHECK_NOTHROW(config.validate());
}

TEST_CASE("config validation reports bad fields") {
    const auto dir = scratch_dir("config_bad");

    auto config = SweepConfig::from_json_file(
        write_config(dir, R"({"K": 1})").string());
    CHECK_THROWS_AS(config.validate(), ConfigError);

    config = SweepConfig::from_json_file(
        write_config(dir, R"({"epsilon": 1.5})").string());
    CHECK_THROWS_AS(config.validate(), ConfigError);

    config = SweepConfig::from_json_file(
        write_config(dir, R"({"artifacts": ["observables", "pictures"]})").string());
    CHECK_THROWS_AS(config.validate(), ConfigError);

    CHECK_THROWS_AS(SweepConfig::from_json_file(write_config(dir, R"({"kT": []})").string()),
                    ConfigError);

    CHECK_THROWS_AS(SweepConfig::from_json_file((dir / "missing.json").string()), ConfigError);
    CHECK_THROWS_AS(
        SweepConfig::from_json_file(write_config(dir, "{not json").string()), ConfigError);
}

TEST_CASE("default sampling rule: 1000 up to N=1024, 200 beyond") {
    CHECK(default_samples(64) == 1000);
    CHECK(default_samples(1024) == 1000);
    CHECK(default_samples(2048) == 200);
}

TEST_CASE("sweep emits a sorted, reloadable observables table") {
    const auto dir = scratch_dir("sweep");
    SweepConfig config;
    config.K = {2};
    config.kT = {1.0, 0.5};  // deliberately unsorted
    config.N = {16, 8};
    config.samples = 50;
    config.seed = 77;
    config.out_dir = (dir / "out").string();
    config.artifacts = {"observables", "histogram", "correlation", "mutual_information"};

    const auto table = run_sweep(config, false, nullptr);
    CHECK(table.size() == 4);

    const auto loaded = ObservableTable::from_csv((dir / "out" / "observables.csv").string());
    REQUIRE(loaded.size() == 4);
    for (std::size_t i = 1; i < loaded.size(); ++i)
        CHECK(loaded.rows()[i - 1].key() < loaded.rows()[i].key());
    for (const auto& row : loaded.rows()) {
        CHECK(row.ok());
        CHECK(row.samples == 50);
        CHECK(row.mean_M >= 0.0);
        CHECK(row.mean_M <= 1.0);
    }

    // histogram counts add up to the sample count per point
    std::ifstream hist((dir / "out" / "histogram.csv").string());
    std::string line;
    std::getline(hist, line);
    CHECK(line == "kT,N,bin_lo,bin_hi,count");
    std::map<std::pair<std::string, std::string>, std::uint64_t> totals;
    while (std::getline(hist, line)) {
        const auto f = split_csv_line(line);
        REQUIRE(f.size() == 5);
        totals[{f[0], f[1]}] += std::stoull(f[4]);
    }
    CHECK(totals.size() == 4);
    for (const auto& [key, total] : totals) CHECK(total == 50);
}

TEST_CASE("sweep refuses to overwrite without the flag") {
    const auto dir = scratch_dir("overwrite");
    SweepConfig config;
    config.N = {8};
    config.samples = 10;
    config.out_dir = (dir / "out").string();
    run_sweep(config, false, nullptr);
    CHECK_THROWS_AS(run_sweep(config, false, nullptr), ConfigError);
    CHECK_NOTHROW(run_sweep(config, true, nullptr));
}

TEST_CASE("reruns are byte-identical and independent of the parallel degree") {
    const auto dir = scratch_dir("determinism");
    SweepConfig config;
    config.K = {3};
    config.kT = {0.4, 0.8};
    config.N = {8, 16};
    config.samples = 64;
    config.seed = 123;
    config.out_dir = (dir / "a").string();
    config.parallel = 1;
    run_sweep(config, false, nullptr);
    config.out_dir = (dir / "b").string();
    config.parallel = 2;
    run_sweep(config, false, nullptr);
    CHECK(slurp(dir / "a" / "observables.csv") == slurp(dir / "b" / "observables.csv"));
}

TEST_CASE("any row regenerates bit-identically from its recorded seed") {
    const auto dir = scratch_dir("rowrepro");
    SweepConfig config;
    config.K = {2};
    config.kT = {0.6, 1.2};
    config.N = {16};
    config.samples = 30;
    config.seed = 2024;
    config.out_dir = (dir / "out").string();
    const auto table = run_sweep(config, false, nullptr);

    for (const auto& row : table.rows()) {
        ModelParams params{row.K, row.J, row.q, row.t, row.epsilon, row.kT};
        SamplingProtocol protocol;
        protocol.target_N = row.N;
        protocol.samples = row.samples;
        protocol.seed = row.seed;
        const auto result = measure_point(params, protocol, std::nullopt, false);
        CHECK(result.acc.mean_M() == row.mean_M);
        CHECK(susceptibility(result.acc, row.N) == row.chi);
        CHECK(binder(result.acc, row.K) == row.binder);
    }
}

TEST_CASE("per-point failures land in the error column without aborting") {
    const auto dir = scratch_dir("errors");
    SweepConfig config;
    config.K = {2};
    config.q = {0.5};
    config.t = {0.1};  // supercritical stream under completion semantics
    config.stream_measure_at_window_fill = false;
    config.runaway_cap_factor = 2;
    config.kT = {1.0};
    config.N = {32};
    config.samples = 20;
    config.out_dir = (dir / "out").string();
    const auto table = run_sweep(config, false, nullptr);
    REQUIRE(table.size() == 1);
    CHECK(table.rows()[0].error == "RunawayGrowth");

    const auto loaded = ObservableTable::from_csv((dir / "out" / "observables.csv").string());
    CHECK(loaded.rows()[0].error == "RunawayGrowth");
    CHECK(std::isnan(loaded.rows()[0].mean_M));
}

TEST_CASE("zipf artifact aggregates counts per temperature") {
    const auto dir = scratch_dir("zipf");
    SweepConfig config;
    config.K = {4};
    config.kT = {0.5};
    config.N = {8, 16};
    config.samples = 25;
    config.out_dir = (dir / "out").string();
    config.artifacts = {"observables", "zipf"};
    run_sweep(config, false, nullptr);

    std::ifstream in((dir / "out" / "zipf.csv").string());
    std::string line;
    std::getline(in, line);
    CHECK(line == "kT,rank,rel_freq");
    double total = 0.0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto f = split_csv_line(line);
        REQUIRE(f.size() == 3);
        total += std::stod(f[2]);
        ++rows;
    }
    CHECK(rows <= 4);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("dump filter keeps only configurations in the requested bin") {
    ModelParams params{2, 1.0, 0.05, 0.0, 0.0, 0.05};
    SamplingProtocol protocol;
    protocol.target_N = 16;
    protocol.samples = 200;
    protocol.seed = 5;
    const auto result = measure_point(params, protocol, DumpFilter{0.98, 50}, false);
    CHECK(!result.dumps.empty());
    for (const auto& d : result.dumps) {
        CHECK(d.M >= 0.98);
        CHECK(d.M <= 1.0);
        CHECK(d.tokens.find('A') != std::string::npos);
    }
}

TEST_CASE("observables CSV schema matches the published column order") {
    CHECK(std::string(kObservablesHeader) ==
          "K,J,q,t,epsilon,kT,N,samples,seed,mean_M,se_M,chi,chi_tilde,binder,corr_Gtilde,"
          "mutual_info,error");
}

TEST_CASE("table loader diagnoses malformed headers and duplicate keys") {
    const auto dir = scratch_dir("tableio");
    {
        std::ofstream out(dir / "bad_header.csv");
        out << "K,J,q,t,eps,kT,N,samples,seed,mean_M,se_M,chi,chi_tilde,binder,corr_Gtilde,"
               "mutual_info,error\n";
    }
    CHECK_THROWS_WITH_AS(ObservableTable::from_csv((dir / "bad_header.csv").string()),
                         doctest::Contains("column 5"), SchemaError);

    {
        std::ofstream out(dir / "dup.csv");
        out << kObservablesHeader << '\n';
        out << "2,1,0.01,0,0,0.5,16,10,1,0.5,0.01,1,2,0.5,0.1,0.05,\n";
        out << "2,1,0.01,0,0,0.5,16,10,1,0.6,0.01,1,2,0.5,0.1,0.05,\n";
    }
    CHECK_THROWS_AS(ObservableTable::from_csv((dir / "dup.csv").string()), SchemaError);

    {
        std::ofstream out(dir / "short_row.csv");
        out << kObservablesHeader << '\n';
        out << "2,1,0.01,0,0,0.5,16,10,1,0.5\n";
    }
    CHECK_THROWS_WITH_AS(ObservableTable::from_csv((dir / "short_row.csv").string()),
                         doctest::Contains("17 fields"), SchemaError);
}

TEST_CASE("analyze zipf consumes a dump corpus and histogram finds modal bins") {
    const auto dir = scratch_dir("analyze_files");
    {
        std::ofstream out(dir / "dumps.txt");
        out << "# K J q t epsilon kT N sample M tokens...\n";
        out << "2 1 0.01 0 0 0.5 4 0 1 a1 a1 a1 A2\n";
        out << "2 1 0.01 0 0 0.5 4 1 1 a1 a2 A1 A1\n";
    }
    write_zipf_outputs_from_dumpfile((dir / "dumps.txt").string(), dir.string(), false);
    const auto zipf = slurp(dir / "zipf.csv");
    CHECK(zipf.find("kT,rank,rel_freq") != std::string::npos);
    CHECK(zipf.find("0.5,1,0.75") != std::string::npos);  // 6 of 8 tokens are symbol 1
    CHECK(zipf.find("0.5,2,0.25") != std::string::npos);

    {
        std::ofstream out(dir / "bad_dumps.txt");
        out << "2 1 0.01 0 0 0.5 4 0 1 x9\n";
    }
    CHECK_THROWS_AS(
        write_zipf_outputs_from_dumpfile((dir / "bad_dumps.txt").string(), dir.string(), true),
        SchemaError);

    {
        std::ofstream out(dir / "histogram.csv");
        out << "kT,N,bin_lo,bin_hi,count\n";
        out << "0.5,16,0,0.02,3\n";
        out << "0.5,16,0.02,0.04,10\n";
        out << "0.5,16,0.04,0.06,2\n";
        out << "1,16,0.98,1,7\n";
    }
    write_histogram_modes((dir / "histogram.csv").string(), dir.string(), false);
    const auto modes = slurp(dir / "histogram_modes.csv");
    CHECK(modes.find("0.5,16,0.02,0.04,10") != std::string::npos);
    CHECK(modes.find("1,16,0.98,1,7") != std::string::npos);

    CHECK_THROWS_AS(write_histogram_modes((dir / "dumps.txt").string(), dir.string(), true),
                    SchemaError);
}

TEST_CASE("analyze task outputs: fss, tc, phase-diagram writers") {
    const auto dir = scratch_dir("analyze");
    // small synthetic table with a clean transition at 0.24
    std::vector<ObservableRow> rows;
    for (const auto N : {64u, 128u, 256u, 512u})
        for (double kt = 0.12; kt <= 0.40 + 1e-9; kt += 0.02) {
            ObservableRow row;
            row.K = 20;
            row.J = 1.0;
            row.q = 0.01;
            row.t = 0.0;
            row.epsilon = 0.0;
            row.kT = kt;
            row.N = N;
            row.samples = 100;
            const double x = std::pow(double(N), 1.0 / 2.5) * (kt - 0.24) / 0.24;
            row.chi_tilde = std::pow(double(N), 0.8) * (std::exp(-x * x) + 0.05);
            row.chi = row.chi_tilde * 0.2;
            row.binder = kt < 0.24 ? 0.8 : (kt < 0.30 ? -0.2 : 0.0);
            rows.push_back(row);
        }
    const ObservableTable table{std::move(rows)};

    CollapseGridSpec grid;
    grid.tc_min = 0.20;
    grid.tc_max = 0.28;
    grid.nu_min = 2.0;
    grid.nu_max = 3.0;
    grid.gamma_min = 1.5;
    grid.gamma_max = 2.5;
    write_fss_outputs(table, grid, dir.string(), false);
    CHECK(fs::exists(dir / "fss.csv"));
    CHECK(fs::exists(dir / "fss_collapse.csv"));
    const auto summary = slurp(dir / "fss_summary.json");
    CHECK(summary.find("\"schema_version\"") != std::string::npos);
    CHECK(summary.find("pottsgram/1") != std::string::npos);

    write_tc_outputs(table, {TcMethod::BinderDeparture, TcMethod::SusceptibilityPeak},
                     dir.string(), false);
    CHECK(slurp(dir / "tc.csv").find("binder_departure") != std::string::npos);
}

}  // TEST_SUITE
