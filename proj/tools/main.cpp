#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "pottsgram/analysis.hpp"
#include "pottsgram/observables.hpp"
#include "pottsgram/oracle.hpp"
#include "pottsgram/sweep.hpp"

namespace {

using namespace pottsgram;

std::string resolve_out_dir(const std::string& flag_value, const std::string& config_value) {
    if (!flag_value.empty()) return flag_value;
    if (!config_value.empty()) return config_value;
    if (const char* env = std::getenv(kOutDirEnvVar)) return env;
    return ".";
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int parallel = -1;
    bool overwrite = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool need_config) {
    auto* opt = cmd->add_option("--config", flags.config_path, "JSON configuration file");
    if (need_config) opt->required();
    cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", flags.seed, "base random seed (overrides config)")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--parallel", flags.parallel, "worker threads (overrides config)");
    cmd->add_flag("--overwrite", flags.overwrite, "replace existing output files");
}

SweepConfig load_config(const CommonFlags& flags) {
    SweepConfig config = SweepConfig::from_json_file(flags.config_path);
    config.out_dir = resolve_out_dir(flags.out_dir, config.out_dir);
    if (flags.seed_set) config.seed = flags.seed;
    if (flags.parallel >= 0) config.parallel = flags.parallel;
    return config;
}

int run_oracle_check(const std::string& scope) {
    bool pass = true;

    if (scope == "equilibrium" || scope == "all") {
        // Context-only dynamics on a fixed chain against exact enumeration.
        const int n = 12;
        const auto [pi, pj] = probe_sites(static_cast<std::size_t>(n));
        for (const double kT : {0.5, 1.0, 2.0}) {
            ModelParams params{2, 1.0, 0.01, 0.0, 0.0, kT};
            const auto exact = enumerate_potts_equilibrium(2, n, 1.0, kT, pi, pj);
            Rng rng(20260811);
            const auto stats =
                run_fixed_length_mcmc(params, n, 100000, 10000, 100, pi, pj, rng);
            const auto report = compare_empirical(exact, stats, 4.0);
            std::cout << (report.pass ? "PASS" : "FAIL") << " equilibrium kT="
                      << kT << ": " << report.summary << '\n';
            pass = pass && report.pass;
        }
    }

    if (scope == "absorption" || scope == "all") {
        ModelParams params{2, 1.0, 0.5, 0.0, 0.5, 1.0};
        const std::size_t n_max = 3;
        const auto dist = absorption_distribution(params, n_max);
        std::map<OutcomeKey, std::uint64_t> counts;
        SamplingProtocol protocol;
        protocol.target_N = n_max;
        for (std::size_t i = 0; i < 100000; ++i) {
            Rng rng = Rng::substream(4242, i);
            ++counts[encode_outcome(generate_fixed_length(params, protocol, rng))];
        }
        const auto report = compare_empirical(dist, counts, 0.02);
        std::cout << (report.pass ? "PASS" : "FAIL") << " absorption: " << report.summary
                  << '\n';
        pass = pass && report.pass;
    }

    std::cout << (pass ? "oracle-check: all checks passed\n"
                       : "oracle-check: FAILURES detected\n");
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator and analysis pipeline for a context-sensitive random "
                 "language model with short-range Potts interactions"};
    app.require_subcommand(1);

    CommonFlags generate_flags, sweep_flags, analyze_flags;

    auto* generate = app.add_subcommand(
        "generate", "generate ensembles, observables, and raw configuration dumps");
    add_common(generate, generate_flags, true);
    double dump_lo = -1.0;
    generate->add_option("--dump-lo", dump_lo,
                         "dump configurations with M in [dump-lo, dump-lo + 0.02)");

    auto* sweep = app.add_subcommand("sweep", "execute a parameter grid and emit tables");
    add_common(sweep, sweep_flags, true);

    auto* analyze = app.add_subcommand("analyze", "run an analysis task over emitted tables");
    add_common(analyze, analyze_flags, false);
    std::string task, input_path, method = "all", axis;
    CollapseGridSpec grid;
    analyze->add_option("--task", task, "fss | tc | phase-diagram | zipf | histogram")
        ->required();
    analyze->add_option("--in", input_path, "input file (observables.csv, dumps.txt, ...)")
        ->required();
    analyze->add_option("--method", method, "tc method: binder | chi-peak | fss | all");
    analyze->add_option("--axis", axis, "phase-diagram axis: q | t");
    analyze->add_option("--tc-min", grid.tc_min, "FSS grid lower Tc bound");
    analyze->add_option("--tc-max", grid.tc_max, "FSS grid upper Tc bound");
    analyze->add_option("--nu-min", grid.nu_min, "FSS grid lower nu bound");
    analyze->add_option("--nu-max", grid.nu_max, "FSS grid upper nu bound");
    analyze->add_option("--gamma-min", grid.gamma_min, "FSS grid lower gamma bound");
    analyze->add_option("--gamma-max", grid.gamma_max, "FSS grid upper gamma bound");
    analyze->add_option("--window", grid.window, "relative temperature window around Tc");

    auto* oracle = app.add_subcommand("oracle-check", "validate the engine against the oracles");
    std::string scope = "all";
    oracle->add_option("--scope", scope, "equilibrium | absorption | all")
        ->check(CLI::IsMember({"equilibrium", "absorption", "all"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            SweepConfig config = load_config(generate_flags);
            if (dump_lo >= 0.0) config.dump_bin_lo = dump_lo;
            if (!config.wants("dumps")) config.artifacts.push_back("dumps");
            run_sweep(config, generate_flags.overwrite, &std::cout);
            return 0;
        }
        if (sweep->parsed()) {
            SweepConfig config = load_config(sweep_flags);
            run_sweep(config, sweep_flags.overwrite, &std::cout);
            return 0;
        }
        if (analyze->parsed()) {
            const std::string out_dir = resolve_out_dir(analyze_flags.out_dir, "");
            const bool overwrite = analyze_flags.overwrite;
            if (task == "fss") {
                write_fss_outputs(ObservableTable::from_csv(input_path), grid, out_dir,
                                  overwrite);
            } else if (task == "tc") {
                std::vector<TcMethod> methods;
                if (method == "binder" || method == "all")
                    methods.push_back(TcMethod::BinderDeparture);
                if (method == "chi-peak" || method == "all")
                    methods.push_back(TcMethod::SusceptibilityPeak);
                if (method == "fss" || method == "all") methods.push_back(TcMethod::FssGrid);
                if (methods.empty()) throw ConfigError("unknown tc method '" + method + "'");
                write_tc_outputs(ObservableTable::from_csv(input_path), methods, out_dir,
                                 overwrite);
            } else if (task == "phase-diagram") {
                if (axis != "q" && axis != "t")
                    throw ConfigError("phase-diagram requires --axis q or --axis t");
                write_phase_diagram_outputs(ObservableTable::from_csv(input_path),
                                            axis == "q" ? PhaseAxis::q : PhaseAxis::t, out_dir,
                                            overwrite);
            } else if (task == "zipf") {
                write_zipf_outputs_from_dumpfile(input_path, out_dir, overwrite);
            } else if (task == "histogram") {
                write_histogram_modes(input_path, out_dir, overwrite);
            } else {
                throw ConfigError("unknown task '" + task + "'");
            }
            return 0;
        }
        if (oracle->parsed()) return run_oracle_check(scope);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
