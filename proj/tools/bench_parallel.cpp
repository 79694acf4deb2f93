// times the serial reference harness against the threaded one on the same
// workload and checks that the reports agree byte for byte

#include <chrono>
#include <cstdio>
#include <string>

#include "pacsim/simulate.hpp"

using namespace pacsim;
using clk = std::chrono::steady_clock;

namespace {

double seconds(clk::time_point a, clk::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

ExperimentConfig workload() {
    ExperimentConfig cfg;
    cfg.code = make_rm_code(128, 64, ConvPoly::from_octal("3211"));
    cfg.channel = ChannelKind::bi_awgn;
    cfg.grid = {2.0};
    cfg.decoder.kind = DecoderKind::pscl;
    cfg.decoder.list_size = 32;
    cfg.decoder.m_T = -10.0;
    cfg.stop.min_trials = 8192;
    cfg.stop.max_trials = 8192;
    cfg.stop.target_frame_errors = 1ull << 62;
    cfg.seed = 7;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    ExperimentConfig cfg = workload();
    if (argc > 1) cfg.stop.min_trials = cfg.stop.max_trials = std::stoull(argv[1]);

    std::printf("PAC(128,64) pscl L=%d m_T=%g at %.1f dB, %llu trials\n", cfg.decoder.list_size,
                cfg.decoder.m_T, cfg.grid[0], (unsigned long long)cfg.stop.max_trials);

    auto t0 = clk::now();
    SimReport serial = run_experiment_serial(cfg);
    auto t1 = clk::now();
    SimReport parallel = run_experiment(cfg);
    auto t2 = clk::now();

    double ts = seconds(t0, t1), tp = seconds(t1, t2);
    std::printf("%-10s %10s %10s\n", "harness", "seconds", "trials/s");
    std::printf("%-10s %10.3f %10.0f\n", "serial", ts, double(cfg.stop.max_trials) / ts);
    std::printf("%-10s %10.3f %10.0f\n", "parallel", tp, double(cfg.stop.max_trials) / tp);
    std::printf("speedup %.2fx\n", ts / tp);

    if (report_csv(serial) != report_csv(parallel)) {
        std::printf("MISMATCH: serial and parallel reports differ\n");
        return 1;
    }
    std::printf("reports identical\n");
    return 0;
}
