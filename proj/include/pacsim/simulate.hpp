#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pacsim/channel.hpp"
#include "pacsim/code_spec.hpp"
#include "pacsim/decoders.hpp"
#include "pacsim/reliability.hpp"

namespace pacsim {

enum class DecoderKind { sc, scl, pscl, stack, pstack, pstackd };

struct DecoderSetup {
    DecoderKind kind = DecoderKind::scl;
    int list_size = 1;
    double m_T = -kKappa;
    std::string profile_path;  // may contain {snr}, resolved per grid point
    std::string schedule_path; // pstackd only
    size_t stack_cap = kDefaultStackCap;
};

struct StoppingRule {
    uint64_t min_trials = 1;
    uint64_t max_trials = 1'000'000;
    uint64_t target_frame_errors = 100;
};

struct ExperimentConfig {
    CodeSpec code;            // capacity-profile codes are materialized per grid point
    ChannelKind channel = ChannelKind::bi_awgn;
    bool snr_is_es = false;
    std::vector<double> grid; // snr_db points for awgn, epsilon points for bec
    DecoderSetup decoder;
    StoppingRule stop;
    uint64_t seed = 1;
    int workers = 0;          // 0 = all hardware threads
};

struct SnrResult {
    double point = 0.0; // snr_db (awgn) or epsilon (bec)
    uint64_t trials = 0;
    uint64_t frame_errors = 0;
    double fer = 0.0;
    double ci_low = 0.0; // Wilson 95% interval on the frame error rate
    double ci_high = 0.0;
    double mean_sort_events = 0.0;
    double mean_stack = 0.0;
    double mean_end_stack = 0.0; // stack elements at termination, per-trial mean
    uint64_t max_stack = 0;
    double mean_f_ops = 0.0;
    double mean_g_ops = 0.0;
    double mean_node_visits = 0.0;
};

struct SimReport {
    std::vector<SnrResult> rows;
};

// Frame-error simulation over the grid. Random data every trial; a trial
// counts as a frame error if the decoder failed or returned the wrong data.
// Trials run in fixed-size batches with one RNG stream per trial, and the
// stopping rule is evaluated at batch boundaries, so the report is
// byte-identical for any worker count. run_experiment_serial is the plain
// reference loop with the same batch boundaries.
SimReport run_experiment(const ExperimentConfig& cfg);
SimReport run_experiment_serial(const ExperimentConfig& cfg);

std::string report_csv(const SimReport& r);
std::string report_json(const SimReport& r, const ExperimentConfig& cfg);

// writes report.csv, report.json and run-manifest.txt into out_dir
void export_report(const SimReport& r, const ExperimentConfig& cfg,
                   const std::string& config_text, const std::string& out_dir);

// Wilson 95% score interval for k successes in n trials
std::pair<double, double> wilson_ci(uint64_t k, uint64_t n);

uint64_t fnv1a64(const std::string& bytes);

// [code]/[channel]/[decoder]/[run] sections; see README for the key list
ExperimentConfig parse_experiment_config(const std::string& path);

// "0:0.5:3.5" (inclusive range) or "0,1.5,2" (comma list)
std::vector<double> parse_point_list(const std::string& text);

// Genie-aided metric statistics: random data each trial, decisions forced to
// the transmitted path, per-index means and standard errors of phi on the
// correct branch and on the flipped branch.
struct DriftReport {
    int N = 0;
    uint64_t trials = 0;
    std::vector<double> mean_correct, se_correct;
    std::vector<double> mean_wrong, se_wrong;
};

DriftReport drift_experiment(const CodeSpec& spec, const ChannelModel& ch,
                             uint64_t trials, uint64_t seed);

// Tail counts P{phi_i(correct) <= t} for each index and each threshold in
// `thresholds`, from the same genie-aided trials as drift_experiment.
std::vector<std::vector<uint64_t>> phi_tail_counts(const CodeSpec& spec, const ChannelModel& ch,
                                                   uint64_t trials, uint64_t seed,
                                                   const std::vector<double>& thresholds);

} // namespace pacsim
