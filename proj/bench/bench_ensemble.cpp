// Compares the serial reference path of measure_point against the OpenMP
// chunk-parallel path on a representative ensemble and checks that both
// produce identical statistics.

#include <omp.h>

#include <chrono>
#include <cstdio>

#include "pottsgram/ensemble.hpp"

using namespace pottsgram;
using clock_type = std::chrono::steady_clock;

namespace {

double run_ms(const ModelParams& params, const SamplingProtocol& protocol, bool parallel,
              PointResult& out) {
    const auto start = clock_type::now();
    out = measure_point(params, protocol, std::nullopt, parallel);
    return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n = 256;
    std::size_t samples = 2000;
    if (argc > 1) n = std::strtoull(argv[1], nullptr, 10);
    if (argc > 2) samples = std::strtoull(argv[2], nullptr, 10);

    ModelParams params{20, 1.0, 0.01, 0.0, 0.0, 0.24};
    SamplingProtocol protocol;
    protocol.target_N = n;
    protocol.samples = samples;
    protocol.seed = 7;

    std::printf("N=%zu samples=%zu threads=%d\n", n, samples, omp_get_max_threads());

    PointResult serial_result{MomentAccumulator(params.K), {}, {}};
    PointResult parallel_result{MomentAccumulator(params.K), {}, {}};
    const double warmup = run_ms(params, protocol, true, parallel_result);
    const double t_serial = run_ms(params, protocol, false, serial_result);
    const double t_parallel = run_ms(params, protocol, true, parallel_result);

    const bool identical = serial_result.acc.count() == parallel_result.acc.count() &&
                           serial_result.acc.mean_M() == parallel_result.acc.mean_M() &&
                           serial_result.acc.mean_M2() == parallel_result.acc.mean_M2() &&
                           serial_result.acc.mean_M4() == parallel_result.acc.mean_M4();

    std::printf("warmup    %8.1f ms\n", warmup);
    std::printf("serial    %8.1f ms\n", t_serial);
    std::printf("openmp    %8.1f ms   speedup %.2fx\n", t_parallel, t_serial / t_parallel);
    std::printf("results bitwise identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
