#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

// Bit-metric and LLR kernels. Everything here lives in the base-2 log domain:
// channel LLRs are log2-likelihood ratios, path metrics are sums of base-2
// bit metrics, and all arithmetic saturates at +-kKappa so a run of certain
// decisions cannot overflow into inf/nan.

namespace pacsim {

inline constexpr double kKappa = 4096.0; // 2^12, saturation rail

inline double saturate(double x) {
    return std::clamp(x, -kKappa, kKappa);
}

// saturating accumulate for path metrics
inline double metric_accumulate(double a, double b) {
    return saturate(a + b);
}

// log2(1 + 2^-x), stable for both signs of x
inline double log2_1p_exp2_neg(double x) {
    static constexpr double inv_ln2 = 1.4426950408889634073599247;
    if (x >= 0.0) return std::log1p(std::exp2(-x)) * inv_ln2;
    return -x + std::log1p(std::exp2(x)) * inv_ln2;
}

// check-node update, exact: f(a,b) = log2((1 + 2^(a+b)) / (2^a + 2^b)).
// Computed as sign(a)sign(b)min(|a|,|b|) plus two bounded correction terms,
// which keeps it finite where the direct form would overflow.
inline double f_update(double a, double b) {
    double sign = ((a < 0.0) != (b < 0.0)) ? -1.0 : 1.0;
    if (a == 0.0 || b == 0.0) return 0.0;
    double m = std::min(std::fabs(a), std::fabs(b));
    double v = sign * m + log2_1p_exp2_neg(std::fabs(a + b)) - log2_1p_exp2_neg(std::fabs(a - b));
    return saturate(v);
}

// variable-node update with known partial sum s
inline double g_update(double a, double b, uint8_t s) {
    return saturate(b + (s ? -a : a));
}

// branch bit metric, phi = 1 - log2(1 + 2^(-L*(-1)^u)); always <= 1
inline double bit_metric_phi(double llr, uint8_t u) {
    double x = u ? -llr : llr;
    return std::max(-kKappa, 1.0 - log2_1p_exp2_neg(x));
}

// stack-metric branch term, biased by the cutoff rate of the bit channel
inline double bit_metric_gamma(double llr, uint8_t u, double e0) {
    return saturate(bit_metric_phi(llr, u) - e0);
}

} // namespace pacsim
