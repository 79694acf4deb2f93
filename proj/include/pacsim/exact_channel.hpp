#pragma once

#include <vector>

#include "pacsim/bits.hpp"
#include "pacsim/channel.hpp"

namespace pacsim {

// Brute-force bit-channel LLR: marginalizes the channel law over all 2^(N-i)
// continuations of u given the first i-1 bits, with x = u F^(x)n. Log-domain
// throughout, so saturated channel LLRs are safe. Reference oracle for the
// f/g recursion; N <= 16 only.
double exact_bit_channel_llr(int i /*1-based*/, const std::vector<double>& y,
                             const Bits& u_prefix, const ChannelModel& ch);

} // namespace pacsim
