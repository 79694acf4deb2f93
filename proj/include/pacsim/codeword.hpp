#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pacsim/bits.hpp"

namespace pacsim {

// x = u F^(x)n over GF(2), F = [[1,0],[1,1]], computed by the in-place
// butterfly (the matrix is never materialized). Self-inverse.
void polar_transform_inplace(Bits& u);
Bits polar_transform(Bits u);

// Convolutional pre-transform for PAC codes. Coefficients c_0..c_m come from
// an octal literal read MSB-first, c_0 first: "321" -> 11010001 ->
// (c_0..c_7) = (1,1,0,1,0,0,0,1). c_0 = 1 always (the top bit of the literal),
// which is what makes the transform invertible by back-substitution.
struct ConvPoly {
    std::vector<uint8_t> coeff; // c_0..c_m, empty means no pre-transform (plain polar)

    static ConvPoly from_octal(const std::string& octal);
    bool is_polar() const { return coeff.empty(); }
    int memory() const { return coeff.empty() ? 0 : int(coeff.size()) - 1; }

    // bit mask with bit k = c_k, for the shift-register form below
    uint64_t mask() const {
        uint64_t m = 0;
        for (size_t k = 0; k < coeff.size(); ++k)
            if (coeff[k]) m |= 1ull << k;
        return coeff.empty() ? 1ull : m;
    }
};

// u_j = sum_k c_k v_{j-k}; one output bit per input bit, no termination tail
Bits conv_encode(const Bits& v, const ConvPoly& p);
// exact inverse of conv_encode (c_0 = 1 back-substitution)
Bits conv_invert(const Bits& u, const ConvPoly& p);

// Shift-register form used by the sequential decoders: reg holds the last
// m decided v bits (bit k-1 = v_{j-k}).
inline uint8_t conv_output_bit(uint64_t reg, uint8_t v, uint64_t mask) {
    uint64_t window = (reg << 1) | v;
    return uint8_t(__builtin_parityll(window & mask));
}
inline uint64_t conv_shift(uint64_t reg, uint8_t v, int memory) {
    if (memory == 0) return 0;
    return ((reg << 1) | v) & ((1ull << memory) - 1);
}

// scatter K data bits into the positions of A (1-based, strictly increasing),
// zeros elsewhere; extract_data is its inverse on the data positions
Bits insert_data(const Bits& data, const std::vector<int>& info_set, int N);
Bits extract_data(const Bits& v, const std::vector<int>& info_set);

// Reed-Muller rate profile: the K indices i in 1..N with the largest Hamming
// weight of (i-1); ties at the cutoff weight keep the larger index.
std::vector<int> rm_profile(int N, int K);

// capacity rate profile: K indices with the largest bit-channel capacity,
// ties broken toward the larger index; `capacity` is indexed 0-based
std::vector<int> capacity_profile(int N, int K, const std::vector<double>& capacity);

} // namespace pacsim
