#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pottsgram/analysis.hpp"
#include "pottsgram/ensemble.hpp"
#include "pottsgram/table.hpp"

namespace pottsgram {

inline constexpr const char* kCodeVersion = "pottsgram 0.1.0";
inline constexpr const char* kJsonSchemaVersion = "pottsgram/1";
inline constexpr const char* kOutDirEnvVar = "POTTSGRAM_OUT_DIR";

// Declarative grid over the model parameters plus protocol and output
// selection; parsed from a single JSON document.
struct SweepConfig {
    std::vector<int> K{2};
    std::vector<double> J{1.0};
    std::vector<double> q{0.01};
    std::vector<double> t{0.0};
    std::vector<double> epsilon{0.0};
    std::vector<double> kT{1.0};
    std::vector<std::size_t> N{64};

    std::optional<std::size_t> samples;  // default: 1000 for N <= 1024, 200 above
    std::size_t post_growth_sweeps = 0;
    std::size_t runaway_cap_factor = 64;
    std::optional<bool> stream_measure_at_window_fill;  // default: on for 0 < t <= 0.5
    std::uint64_t seed = 1;

    std::string out_dir;
    std::vector<std::string> artifacts{"observables"};
    int parallel = 0;  // 0 = hardware default

    std::optional<double> dump_bin_lo;
    std::size_t dump_max = 8;

    std::optional<CollapseGridSpec> fss;
    std::optional<std::string> phase_axis;

    static SweepConfig from_json_file(const std::string& path);
    void validate() const;
    bool wants(const std::string& artifact) const;
};

std::size_t default_samples(std::size_t N);

// Execute the full grid and emit the requested artifacts under
// config.out_dir. Existing outputs are refused unless overwrite is set.
// Returns the observables table that was written.
ObservableTable run_sweep(const SweepConfig& config, bool overwrite, std::ostream* log);

// analyze-task entry points (shared by the CLI and tests).
void write_fss_outputs(const ObservableTable& table, const CollapseGridSpec& grid,
                       const std::string& out_dir, bool overwrite);
void write_tc_outputs(const ObservableTable& table, const std::vector<TcMethod>& methods,
                      const std::string& out_dir, bool overwrite);
void write_phase_diagram_outputs(const ObservableTable& table, PhaseAxis axis,
                                 const std::string& out_dir, bool overwrite);
void write_zipf_outputs_from_dumpfile(const std::string& dump_path, const std::string& out_dir,
                                      bool overwrite);
void write_histogram_modes(const std::string& histogram_csv, const std::string& out_dir,
                           bool overwrite);

}  // namespace pottsgram
