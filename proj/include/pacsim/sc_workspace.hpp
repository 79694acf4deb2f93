#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

#include "pacsim/metric.hpp"

namespace pacsim {

struct KernelOps {
    uint64_t f_ops = 0;
    uint64_t g_ops = 0;
};

// Successive-cancellation evaluation state for one decoder path.
//
// Depth d in [0, n] holds an LLR array of length N>>d: depth 0 is the channel,
// depth n the single decision LLR. decision_llr(phase) must be called for
// phases 0..N-1 in order, with set_bit(phase, u) in between; u is the bit fed
// to the polar transform (for PAC paths that is the convolution output, not
// the data bit). Copying the object clones the whole path state, which is how
// the list and stack decoders branch.
//
// Pairing at each depth is (j, j+len): the transform recursion is
// x = (T(u_first ^ u_second), T(u_second)), so the f stage combines a channel
// pair at stride len and the g stage consumes the left half's partial sums.
class LlrWorkspace {
public:
    explicit LlrWorkspace(int N) : N_(N) {
        n_ = std::bit_width(unsigned(N)) - 1;
        assert(N >= 1 && (N & (N - 1)) == 0);
        llr_.assign(2 * size_t(N) - 1, 0.0);
        psum_.assign(2 * size_t(N) - 1, 0);
        offset_.resize(n_ + 1);
        size_t off = 0;
        for (int d = 0; d <= n_; ++d) {
            offset_[d] = off;
            off += size_t(N) >> d;
        }
    }

    int block_length() const { return N_; }

    template <class It>
    void load_channel_llrs(It first, It last) {
        size_t j = 0;
        for (It it = first; it != last; ++it) llr_[j++] = *it;
        assert(int(j) == N_);
    }

    double decision_llr(int phase, KernelOps& ops) {
        if (n_ == 0) return llr_[0];
        int d0 = (phase == 0) ? 1 : n_ - std::countr_zero(unsigned(phase));
        for (int d = d0; d <= n_; ++d) {
            int len = N_ >> d;
            const double* src = &llr_[offset_[d - 1]];
            double* dst = &llr_[offset_[d]];
            if ((phase >> (n_ - d)) & 1) {
                const uint8_t* ps = &psum_[offset_[d - 1]];
                for (int j = 0; j < len; ++j) dst[j] = g_update(src[j], src[j + len], ps[j]);
                ops.g_ops += uint64_t(len);
            } else {
                for (int j = 0; j < len; ++j) dst[j] = f_update(src[j], src[j + len]);
                ops.f_ops += uint64_t(len);
            }
        }
        return llr_[offset_[n_]];
    }

    // record the decided bit and fold completed sub-codewords upward
    void set_bit(int phase, uint8_t u) {
        if (n_ == 0) return;
        psum_[offset_[n_]] = u;
        int d = n_;
        while (d > 0 && ((phase >> (n_ - d)) & 1)) {
            int len = N_ >> d;
            uint8_t* child = &psum_[offset_[d]];
            uint8_t* parent = &psum_[offset_[d - 1]];
            for (int j = 0; j < len; ++j) {
                parent[j] ^= child[j];
                parent[j + len] = child[j];
            }
            --d;
        }
        if (d > 0) {
            // completed a left child: stash its codeword for the sibling's g stage
            int len = N_ >> d;
            uint8_t* child = &psum_[offset_[d]];
            uint8_t* parent = &psum_[offset_[d - 1]];
            for (int j = 0; j < len; ++j) parent[j] = child[j];
        }
    }

private:
    int N_;
    int n_;
    std::vector<double> llr_;
    std::vector<uint8_t> psum_;
    std::vector<size_t> offset_;
};

} // namespace pacsim
