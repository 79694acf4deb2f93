#pragma once

#include <vector>

#include "pacsim/bits.hpp"
#include "pacsim/rng.hpp"

namespace pacsim {

enum class ChannelKind { bi_awgn, bec };

// Binary-input channel description. For bi_awgn the noise variance follows the
// Eb/N0 convention by default, sigma^2 = 1/(2 * R * 10^(snr_db/10)); set
// snr_is_es for Es/N0 (R drops out). For bec only epsilon matters.
struct ChannelModel {
    ChannelKind kind = ChannelKind::bi_awgn;
    double snr_db = 0.0;
    double code_rate = 0.5;
    bool snr_is_es = false;
    double epsilon = 0.0;

    double sigma2() const;
};

// value used in the observation stream for a BEC erasure (clean symbols are 0.0/1.0)
inline constexpr double kErasure = 0.5;

// BPSK, bit 0 -> +1, bit 1 -> -1
std::vector<double> modulate(const Bits& x);

// bi_awgn: y = s + noise; bec: per-symbol erasure with probability epsilon,
// output alphabet {0, 1, kErasure}
std::vector<double> transmit(const std::vector<double>& s, const ChannelModel& ch, Rng& rng);

// base-2 channel LLRs: awgn L = (2y/sigma^2)/ln2; bec +-kKappa, 0 on erasure
std::vector<double> channel_llr(const std::vector<double>& y, const ChannelModel& ch);

} // namespace pacsim
