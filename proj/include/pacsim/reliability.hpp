#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pacsim/channel.hpp"

namespace pacsim {

// Per-index reliability of the N synthesized bit channels: capacity I_i and
// the cutoff rate E0(1, W_N^(i)) used as the stack-metric bias.
struct ReliabilityProfile {
    int N = 0;
    ChannelKind kind = ChannelKind::bi_awgn;
    double snr_db = 0.0;
    double epsilon = 0.0;
    uint64_t trials = 0; // 0 means closed-form (BEC recursion)
    uint64_t seed = 0;
    std::vector<double> capacity; // 0-based, clamped to [0,1]
    std::vector<double> cutoff;
};

// closed-form BEC profile: erasure recursion e- = 2e - e^2, e+ = e^2 applied
// along the bits of (i-1) MSB-first; I_i = 1 - e_i, cutoff = 1 - log2(1 + e_i)
ReliabilityProfile bec_exact_profile(int N, double epsilon);

// Genie-aided Monte-Carlo profile under the all-zero codeword: capacity_i is
// the mean of phi(L_i, 0), the Bhattacharyya estimate is the mean of 2^(-L/2),
// and cutoff_i = 1 - log2(1 + Z_i); both clamped to [0,1]. Deterministic for a
// fixed seed regardless of `workers` (fixed chunking, ordered reduction).
ReliabilityProfile mc_profile(int N, const ChannelModel& ch, uint64_t trials,
                              uint64_t seed, int workers = 0);

void save_profile(const std::string& path, const ReliabilityProfile& p);
ReliabilityProfile load_profile(const std::string& path);

// Gauss-Hermite rule for weight e^{-t^2} (orthonormal-recurrence Newton solve);
// exposed so tests can check self-convergence
void gauss_hermite(int nodes, std::vector<double>& x, std::vector<double>& w);

struct CapacityDispersion {
    double C = 0.0; // bits/use
    double V = 0.0; // bits^2/use
};

// BPSK-AWGN capacity and dispersion at noise variance sigma^2 via quadrature
CapacityDispersion bi_awgn_capacity_dispersion(double sigma2, int nodes = 96);

// Normal-approximation block error estimate D and the pruning threshold
// m_T = floor(log2(D/10)); returns -kKappa as an int if D underflows.
// snr_db follows the Eb/N0 convention unless snr_is_es.
int dynamic_threshold(int N, int K, double snr_db, bool snr_is_es = false);

// "snr_db m_T" per line; lookup is nearest-neighbor (ties -> earlier entry)
struct ThresholdSchedule {
    std::vector<std::pair<double, int>> entries;
    int lookup(double snr_db) const;
};

void save_schedule(const std::string& path, const ThresholdSchedule& s);
ThresholdSchedule load_schedule(const std::string& path);

} // namespace pacsim
