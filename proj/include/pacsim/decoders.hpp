#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pacsim/bits.hpp"
#include "pacsim/code_spec.hpp"
#include "pacsim/reliability.hpp"
#include "pacsim/sc_workspace.hpp"

namespace pacsim {

enum class FailureKind : uint8_t {
    none = 0,
    all_paths_pruned, // every list path fell below the threshold
    stack_exhausted,  // pruned stack ran empty
    stack_overflow,   // runaway guard tripped
};

struct DecodeCounters {
    uint64_t sort_events = 0; // selections performed with more candidates than L
    uint64_t f_ops = 0;       // element-wise check-node updates
    uint64_t g_ops = 0;       // element-wise variable-node updates
    uint64_t node_visits = 0; // pop-and-extend iterations of the stack search
    uint64_t max_stack = 0;   // peak stack size, sampled once per iteration
    double mean_stack = 0.0;  // time-average stack size over iterations
    uint64_t end_stack = 0;   // elements held when the search stops, winner included
};

struct DecodeOutcome {
    Bits data;          // K decoded data bits (zeros when failed)
    bool failed = false;
    FailureKind reason = FailureKind::none;
    DecodeCounters counters;
};

// all decoders consume base-2 channel LLRs of length N (see channel_llr)

// plain successive cancellation; polar only (PAC with a list of 1 goes
// through scl_decode). f_ops + g_ops is exactly N log2 N.
DecodeOutcome sc_decode(const std::vector<double>& llr, const CodeSpec& spec);

// list decoding with exact bit metrics; ties in the survivor sort keep the
// lower path-creation index, so outcomes are deterministic
DecodeOutcome scl_decode(const std::vector<double>& llr, const CodeSpec& spec, int L);

// list decoding with branch pruning: any branch whose bit metric phi falls
// below m_T is discarded before survivor selection (frozen indices included);
// losing every path reports failure rather than a guess
DecodeOutcome pscl_decode(const std::vector<double>& llr, const CodeSpec& spec, int L,
                          double m_T);

inline constexpr size_t kDefaultStackCap = 1'000'000;

// stack (best-first) decoding with the cutoff-biased metric gamma; `profile`
// supplies the per-index bias and must match the code length
DecodeOutcome stack_decode(const std::vector<double>& llr, const CodeSpec& spec,
                           const ReliabilityProfile& profile,
                           size_t stack_cap = kDefaultStackCap);

// stack decoding that never pushes an extension with gamma < m_T
DecodeOutcome pstack_decode(const std::vector<double>& llr, const CodeSpec& spec,
                            const ReliabilityProfile& profile, double m_T,
                            size_t stack_cap = kDefaultStackCap);

// pstack with m_T taken from a threshold schedule at the operating SNR
DecodeOutcome pstackd_decode(const std::vector<double>& llr, const CodeSpec& spec,
                             const ReliabilityProfile& profile, const ThresholdSchedule& sched,
                             double snr_db, size_t stack_cap = kDefaultStackCap);

} // namespace pacsim
