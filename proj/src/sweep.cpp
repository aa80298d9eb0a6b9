#include "pottsgram/sweep.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pottsgram/csv.hpp"
#include "pottsgram/oracle.hpp"

namespace pottsgram {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kKnownArtifacts = {
    "observables", "histogram",     "correlation",  "mutual_information",
    "zipf",        "dumps",         "fss",          "phase_diagram"};

template <typename T>
std::vector<T> parse_grid(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    std::vector<T> out;
    if (v.is_array()) {
        for (const auto& e : v) out.push_back(e.get<T>());
    } else if (v.is_object()) {
        const double from = v.at("from").get<double>();
        const double to = v.at("to").get<double>();
        const double step = v.at("step").get<double>();
        if (!(step > 0.0)) throw ConfigError("config field '" + key + "': step must be > 0");
        const int count = static_cast<int>(std::floor((to - from) / step + 1e-9)) + 1;
        for (int i = 0; i < count; ++i) out.push_back(static_cast<T>(from + i * step));
    } else {
        out.push_back(v.get<T>());
    }
    if (out.empty()) throw ConfigError("config field '" + key + "': grid is empty");
    return out;
}

CollapseGridSpec parse_fss(const json& j) {
    CollapseGridSpec grid;
    if (j.contains("tc_min")) grid.tc_min = j.at("tc_min").get<double>();
    if (j.contains("tc_max")) grid.tc_max = j.at("tc_max").get<double>();
    if (j.contains("nu_min")) grid.nu_min = j.at("nu_min").get<double>();
    if (j.contains("nu_max")) grid.nu_max = j.at("nu_max").get<double>();
    if (j.contains("gamma_min")) grid.gamma_min = j.at("gamma_min").get<double>();
    if (j.contains("gamma_max")) grid.gamma_max = j.at("gamma_max").get<double>();
    if (j.contains("window")) grid.window = j.at("window").get<double>();
    return grid;
}

std::ofstream open_output(const fs::path& path, bool overwrite) {
    if (!overwrite && fs::exists(path))
        throw ConfigError("output '" + path.string() + "' exists; pass --overwrite to replace");
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

std::size_t default_samples(std::size_t N) { return N <= 1024 ? 1000 : 200; }

SweepConfig SweepConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }

    SweepConfig config;
    try {
        if (j.contains("K")) config.K = parse_grid<int>(j, "K");
        if (j.contains("J")) config.J = parse_grid<double>(j, "J");
        if (j.contains("q")) config.q = parse_grid<double>(j, "q");
        if (j.contains("t")) config.t = parse_grid<double>(j, "t");
        if (j.contains("epsilon")) config.epsilon = parse_grid<double>(j, "epsilon");
        if (j.contains("kT")) config.kT = parse_grid<double>(j, "kT");
        if (j.contains("N")) config.N = parse_grid<std::size_t>(j, "N");
        if (j.contains("samples")) config.samples = j.at("samples").get<std::size_t>();
        if (j.contains("post_growth_sweeps"))
            config.post_growth_sweeps = j.at("post_growth_sweeps").get<std::size_t>();
        if (j.contains("runaway_cap_factor"))
            config.runaway_cap_factor = j.at("runaway_cap_factor").get<std::size_t>();
        if (j.contains("stream_measure_at_window_fill"))
            config.stream_measure_at_window_fill =
                j.at("stream_measure_at_window_fill").get<bool>();
        if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("out_dir")) config.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("artifacts"))
            config.artifacts = j.at("artifacts").get<std::vector<std::string>>();
        if (j.contains("parallel")) config.parallel = j.at("parallel").get<int>();
        if (j.contains("dump_bin_lo")) config.dump_bin_lo = j.at("dump_bin_lo").get<double>();
        if (j.contains("dump_max")) config.dump_max = j.at("dump_max").get<std::size_t>();
        if (j.contains("fss")) config.fss = parse_fss(j.at("fss"));
        if (j.contains("phase_axis")) config.phase_axis = j.at("phase_axis").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return config;
}

bool SweepConfig::wants(const std::string& artifact) const {
    return std::find(artifacts.begin(), artifacts.end(), artifact) != artifacts.end();
}

void SweepConfig::validate() const {
    if (K.empty() || J.empty() || q.empty() || t.empty() || epsilon.empty() || kT.empty() ||
        N.empty())
        throw ConfigError("every parameter grid must be non-empty");
    for (const auto& artifact : artifacts)
        if (kKnownArtifacts.find(artifact) == kKnownArtifacts.end())
            throw ConfigError("unknown artifact '" + artifact + "'");
    for (const int k : K)
        for (const double j : J)
            for (const double qq : q)
                for (const double tt : t)
                    for (const double eps : epsilon)
                        for (const double kt : kT) {
                            ModelParams p{k, j, qq, tt, eps, kt};
                            p.validate();
                        }
    for (const auto n : N)
        if (n < 2) throw ConfigError("N values must be >= 2");
    if (wants("zipf") && K.size() > 1)
        throw ConfigError("the zipf artifact requires a single K value");
    if (phase_axis && *phase_axis != "q" && *phase_axis != "t")
        throw ConfigError("phase_axis must be 'q' or 't'");
    if (wants("phase_diagram") && !phase_axis)
        throw ConfigError("the phase_diagram artifact requires phase_axis");
}

namespace {

struct PointSpec {
    ModelParams params;
    SamplingProtocol protocol;
};

std::vector<PointSpec> expand_grid(const SweepConfig& config) {
    std::vector<PointSpec> points;
    for (const int k : config.K)
        for (const double j : config.J)
            for (const double qq : config.q)
                for (const double tt : config.t)
                    for (const double eps : config.epsilon)
                        for (const double kt : config.kT)
                            for (const auto n : config.N) {
                                PointSpec point;
                                point.params = ModelParams{k, j, qq, tt, eps, kt};
                                point.protocol.target_N = n;
                                point.protocol.samples =
                                    config.samples ? *config.samples : default_samples(n);
                                point.protocol.post_growth_sweeps = config.post_growth_sweeps;
                                point.protocol.runaway_cap_factor = config.runaway_cap_factor;
                                point.protocol.stream_measure_at_window_fill =
                                    config.stream_measure_at_window_fill
                                        ? *config.stream_measure_at_window_fill
                                        : (tt > 0.0 && tt <= 0.5);
                                point.protocol.seed = splitmix64(
                                    config.seed ^
                                    (0x9e3779b97f4a7c15ULL * (points.size() + 1)));
                                points.push_back(point);
                            }
    return points;
}

ObservableRow make_row(const PointSpec& point, const PointResult& result) {
    ObservableRow row;
    row.K = point.params.K;
    row.J = point.params.J;
    row.q = point.params.q;
    row.t = point.params.t;
    row.epsilon = point.params.epsilon;
    row.kT = point.params.kT;
    row.N = point.protocol.target_N;
    row.samples = point.protocol.samples;
    row.seed = point.protocol.seed;
    row.error = result.error;
    if (result.error.empty()) {
        row.mean_M = result.acc.mean_M();
        row.se_M = result.acc.se_M();
        row.chi = susceptibility(result.acc, row.N);
        row.chi_tilde = chi_tilde(result.acc, row.N);
        row.binder = binder(result.acc, row.K);
        row.corr_Gtilde = correlation(result.acc, row.K);
        row.mutual_info = mutual_information(result.acc);
    }
    return row;
}

void write_json(const fs::path& path, const json& j, bool overwrite) {
    auto out = open_output(path, overwrite);
    out << j.dump(2) << '\n';
}

json scaling_to_json(const ScalingResult& fit) {
    return json{{"Tc", fit.Tc},
                {"nu", fit.nu},
                {"gamma", fit.gamma},
                {"quality", fit.quality},
                {"grid",
                 {{"tc_min", fit.grid.tc_min},
                  {"tc_max", fit.grid.tc_max},
                  {"nu_min", fit.grid.nu_min},
                  {"nu_max", fit.grid.nu_max},
                  {"gamma_min", fit.grid.gamma_min},
                  {"gamma_max", fit.grid.gamma_max},
                  {"tc_step", CollapseGridSpec::kTcStep},
                  {"exponent_step", CollapseGridSpec::kExponentStep},
                  {"window", fit.grid.window}}}};
}

}  // namespace

void write_fss_outputs(const ObservableTable& table, const CollapseGridSpec& grid,
                       const std::string& out_dir, bool overwrite) {
    const auto landscape = collapse_landscape(table, grid);
    const ScalingResult fit = grid_search_exponents(table, grid);

    {
        auto out = open_output(fs::path(out_dir) / "fss.csv", overwrite);
        out << "Tc,nu,gamma,quality\n";
        for (const auto& p : landscape) {
            if (std::isnan(p.quality)) continue;
            out << format_double(p.Tc) << ',' << format_double(p.nu) << ','
                << format_double(p.gamma) << ',' << format_double(p.quality) << '\n';
        }
    }
    {
        auto out = open_output(fs::path(out_dir) / "fss_collapse.csv", overwrite);
        out << "N,kT,x,y\n";
        for (const auto& p : collapse_points(table, fit.Tc, fit.nu, fit.gamma, grid.window))
            out << p.N << ',' << format_double(p.kT) << ',' << format_double(p.x) << ','
                << format_double(p.y) << '\n';
    }
    json summary{{"schema_version", kJsonSchemaVersion},
                 {"task", "fss"},
                 {"minimizer", scaling_to_json(fit)}};
    write_json(fs::path(out_dir) / "fss_summary.json", summary, overwrite);
}

void write_tc_outputs(const ObservableTable& table, const std::vector<TcMethod>& methods,
                      const std::string& out_dir, bool overwrite) {
    json items = json::array();
    auto out = open_output(fs::path(out_dir) / "tc.csv", overwrite);
    out << "method,Tc,uncertainty,no_transition\n";
    for (const auto method : methods) {
        const TcEstimate est = estimate_critical_temperature(table, method);
        out << tc_method_name(method) << ',';
        if (est.transition)
            out << format_double(est.Tc) << ',' << format_double(est.uncertainty);
        else
            out << ',';
        out << ',' << (est.transition ? "false" : "true") << '\n';
        items.push_back(json{{"method", tc_method_name(method)},
                             {"no_transition", !est.transition},
                             {"Tc", est.transition ? json(est.Tc) : json()},
                             {"uncertainty", est.transition ? json(est.uncertainty) : json()}});
    }
    write_json(fs::path(out_dir) / "tc_summary.json",
               json{{"schema_version", kJsonSchemaVersion}, {"task", "tc"}, {"estimates", items}},
               overwrite);
}

void write_phase_diagram_outputs(const ObservableTable& table, PhaseAxis axis,
                                 const std::string& out_dir, bool overwrite) {
    const std::vector<TcMethod> methods = {TcMethod::BinderDeparture,
                                           TcMethod::SusceptibilityPeak, TcMethod::FssGrid};
    const auto diagram = build_phase_diagram(table, axis, methods);
    const char* axis_name = axis == PhaseAxis::q ? "q" : "t";

    auto out = open_output(fs::path(out_dir) / "phase_diagram.csv", overwrite);
    out << "axis_name,axis_value,Tc,method,no_transition\n";
    json items = json::array();
    for (const auto& p : diagram) {
        out << axis_name << ',' << format_double(p.axis_value) << ',';
        const bool fired = p.estimate && p.estimate->transition;
        if (fired) out << format_double(p.estimate->Tc);
        out << ',' << tc_method_name(p.method) << ','
            << (p.estimate ? (fired ? "false" : "true") : "false") << '\n';
        items.push_back(json{{"axis_value", p.axis_value},
                             {"method", tc_method_name(p.method)},
                             {"scan_too_narrow", !p.estimate.has_value()},
                             {"no_transition", p.estimate ? json(!fired) : json()},
                             {"Tc", fired ? json(p.estimate->Tc) : json()}});
    }
    write_json(fs::path(out_dir) / "phase_diagram_summary.json",
               json{{"schema_version", kJsonSchemaVersion},
                    {"task", "phase-diagram"},
                    {"axis", axis_name},
                    {"points", items}},
               overwrite);
}

ObservableTable run_sweep(const SweepConfig& config, bool overwrite, std::ostream* log) {
    config.validate();
    const std::string out_dir = config.out_dir.empty() ? "." : config.out_dir;

    // Refuse to clobber anything before spending compute.
    std::vector<fs::path> outputs = {fs::path(out_dir) / "observables.csv",
                                     fs::path(out_dir) / "run_meta.json"};
    if (config.wants("histogram")) outputs.push_back(fs::path(out_dir) / "histogram.csv");
    if (config.wants("zipf")) outputs.push_back(fs::path(out_dir) / "zipf.csv");
    if (config.wants("correlation")) outputs.push_back(fs::path(out_dir) / "correlation.csv");
    if (config.wants("mutual_information"))
        outputs.push_back(fs::path(out_dir) / "mutual_information.csv");
    if (config.wants("dumps")) outputs.push_back(fs::path(out_dir) / "dumps.txt");
    if (config.wants("fss")) {
        outputs.push_back(fs::path(out_dir) / "fss.csv");
        outputs.push_back(fs::path(out_dir) / "fss_collapse.csv");
        outputs.push_back(fs::path(out_dir) / "fss_summary.json");
    }
    if (config.wants("phase_diagram")) {
        outputs.push_back(fs::path(out_dir) / "phase_diagram.csv");
        outputs.push_back(fs::path(out_dir) / "phase_diagram_summary.json");
    }
    if (!overwrite)
        for (const auto& path : outputs)
            if (fs::exists(path))
                throw ConfigError("output '" + path.string() +
                                  "' exists; pass --overwrite to replace");

    const auto points = expand_grid(config);
    const std::optional<DumpFilter> dump_filter =
        config.wants("dumps") && config.dump_bin_lo
            ? std::optional<DumpFilter>(DumpFilter{*config.dump_bin_lo, config.dump_max})
            : std::nullopt;
    const bool dump_all = config.wants("dumps") && !config.dump_bin_lo;

    std::vector<PointResult> results(points.size(),
                                     PointResult{MomentAccumulator(1), {}, {}});
    std::vector<double> wall_ms(points.size(), 0.0);

    const int threads = config.parallel > 0 ? config.parallel : omp_get_max_threads();
    const bool parallel_within_point = points.size() == 1;
#pragma omp parallel for schedule(dynamic) num_threads(parallel_within_point ? 1 : threads)
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        PointResult r = measure_point(points[i].params, points[i].protocol, dump_filter,
                                      parallel_within_point);
        if (dump_all && r.error.empty()) {
            // Corpus dump: re-generate the first dump_max samples verbatim
            // (same substreams, so this cannot fail if the point succeeded).
            for (std::size_t s = 0; s < std::min(config.dump_max, points[i].protocol.samples);
                 ++s) {
                Rng rng = Rng::substream(points[i].protocol.seed, s);
                const SentenceState state =
                    points[i].params.t == 0.0
                        ? generate_fixed_length(points[i].params, points[i].protocol, rng)
                        : generate_text_stream(points[i].params, points[i].protocol, rng);
                r.dumps.push_back(
                    {s, magnetization(state, points[i].params.K), to_token_string(state)});
            }
        }
        results[i] = std::move(r);
        wall_ms[i] = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    }

    ObservableTable table;
    for (std::size_t i = 0; i < points.size(); ++i) table.add(make_row(points[i], results[i]));
    table.sort_by_key();

    {
        auto out = open_output(fs::path(out_dir) / "observables.csv", overwrite);
        table.write_csv(out);
        if (log) *log << "wrote " << (fs::path(out_dir) / "observables.csv").string() << " ("
                      << table.size() << " rows)\n";
    }

    if (config.wants("histogram")) {
        auto out = open_output(fs::path(out_dir) / "histogram.csv", overwrite);
        out << "kT,N,bin_lo,bin_hi,count\n";
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!results[i].error.empty()) continue;
            const auto& hist = results[i].acc.histogram();
            for (std::size_t b = 0; b < hist.size(); ++b)
                out << format_double(points[i].params.kT) << ',' << points[i].protocol.target_N
                    << ',' << format_double(0.02 * b) << ',' << format_double(0.02 * (b + 1))
                    << ',' << hist[b] << '\n';
        }
    }

    if (config.wants("zipf")) {
        const int K = config.K.front();
        std::map<double, std::vector<std::uint64_t>> by_kt;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!results[i].error.empty()) continue;
            auto& counts = by_kt
                               .emplace(points[i].params.kT,
                                        std::vector<std::uint64_t>(static_cast<std::size_t>(K), 0))
                               .first->second;
            const auto& sc = results[i].acc.symbol_counts();
            for (std::size_t k = 0; k < sc.size(); ++k) counts[k] += sc[k];
        }
        auto out = open_output(fs::path(out_dir) / "zipf.csv", overwrite);
        out << "kT,rank,rel_freq\n";
        for (const auto& [kt, counts] : by_kt)
            for (const auto& [rank, freq] : zipf_ranks(counts))
                out << format_double(kt) << ',' << rank << ',' << format_double(freq) << '\n';
    }

    if (config.wants("correlation")) {
        auto out = open_output(fs::path(out_dir) / "correlation.csv", overwrite);
        out << "kT,N,Gtilde\n";
        for (const auto& r : table.rows())
            if (r.ok())
                out << format_double(r.kT) << ',' << r.N << ',' << format_double(r.corr_Gtilde)
                    << '\n';
    }

    if (config.wants("mutual_information")) {
        auto out = open_output(fs::path(out_dir) / "mutual_information.csv", overwrite);
        out << "kT,N,I\n";
        for (const auto& r : table.rows())
            if (r.ok())
                out << format_double(r.kT) << ',' << r.N << ',' << format_double(r.mutual_info)
                    << '\n';
    }

    if (config.wants("dumps")) {
        auto out = open_output(fs::path(out_dir) / "dumps.txt", overwrite);
        out << "# K J q t epsilon kT N sample M tokens...\n";
        for (std::size_t i = 0; i < points.size(); ++i)
            for (const auto& d : results[i].dumps)
                out << points[i].params.K << ' ' << format_double(points[i].params.J) << ' '
                    << format_double(points[i].params.q) << ' '
                    << format_double(points[i].params.t) << ' '
                    << format_double(points[i].params.epsilon) << ' '
                    << format_double(points[i].params.kT) << ' ' << points[i].protocol.target_N
                    << ' ' << d.sample << ' ' << format_double(d.M) << ' ' << d.tokens << '\n';
    }

    if (config.wants("fss"))
        write_fss_outputs(table, config.fss ? *config.fss : CollapseGridSpec{}, out_dir,
                          overwrite);

    if (config.wants("phase_diagram"))
        write_phase_diagram_outputs(
            table, *config.phase_axis == "q" ? PhaseAxis::q : PhaseAxis::t, out_dir, overwrite);

    {
        double total_ms = 0.0;
        for (const double v : wall_ms) total_ms += v;
        json meta{{"schema_version", kJsonSchemaVersion},
                  {"code_version", kCodeVersion},
                  {"generator", Rng::generator_name()},
                  {"seed", config.seed},
                  {"points", points.size()},
                  {"total_wall_ms", total_ms}};
        write_json(fs::path(out_dir) / "run_meta.json", meta, overwrite);
    }
    return table;
}

void write_zipf_outputs_from_dumpfile(const std::string& dump_path, const std::string& out_dir,
                                      bool overwrite) {
    std::ifstream in(dump_path);
    if (!in) throw SchemaError("cannot open '" + dump_path + "'");
    std::map<double, std::map<int, std::uint64_t>> by_kt;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        double J, q, t, eps, kT, M;
        int K;
        std::size_t N, sample;
        if (!(fields >> K >> J >> q >> t >> eps >> kT >> N >> sample >> M))
            throw SchemaError(dump_path + ":" + std::to_string(line_no) +
                              ": expected 'K J q t epsilon kT N sample M tokens...'");
        auto& counts = by_kt[kT];
        std::string token;
        while (fields >> token) {
            if (token.size() < 2 || (token[0] != 'a' && token[0] != 'A'))
                throw SchemaError(dump_path + ":" + std::to_string(line_no) +
                                  ": bad token '" + token + "'");
            ++counts[std::stoi(token.substr(1))];
        }
    }
    auto out = open_output(fs::path(out_dir) / "zipf.csv", overwrite);
    out << "kT,rank,rel_freq\n";
    for (const auto& [kt, counts] : by_kt) {
        std::vector<std::uint64_t> flat;
        for (const auto& [k, c] : counts) flat.push_back(c);
        for (const auto& [rank, freq] : zipf_ranks(flat))
            out << format_double(kt) << ',' << rank << ',' << format_double(freq) << '\n';
    }
}

void write_histogram_modes(const std::string& histogram_csv, const std::string& out_dir,
                           bool overwrite) {
    std::ifstream in(histogram_csv);
    if (!in) throw SchemaError("cannot open '" + histogram_csv + "'");
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(histogram_csv + ": empty file");
    if (split_csv_line(line) != split_csv_line("kT,N,bin_lo,bin_hi,count"))
        throw SchemaError(histogram_csv + ": expected header 'kT,N,bin_lo,bin_hi,count'");

    struct Mode {
        double bin_lo = 0.0, bin_hi = 0.0;
        std::uint64_t count = 0;
    };
    std::map<std::pair<double, std::size_t>, Mode> modes;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw SchemaError(histogram_csv + ":" + std::to_string(line_no) +
                              ": expected 5 fields");
        const double kt = std::stod(fields[0]);
        const std::size_t n = std::stoull(fields[1]);
        const std::uint64_t count = std::stoull(fields[4]);
        auto& mode = modes[{kt, n}];
        if (count > mode.count)
            mode = {std::stod(fields[2]), std::stod(fields[3]), count};
    }
    auto out = open_output(fs::path(out_dir) / "histogram_modes.csv", overwrite);
    out << "kT,N,bin_lo,bin_hi,count\n";
    for (const auto& [key, mode] : modes)
        out << format_double(key.first) << ',' << key.second << ',' << format_double(mode.bin_lo)
            << ',' << format_double(mode.bin_hi) << ',' << mode.count << '\n';
}

}  // namespace pottsgram
