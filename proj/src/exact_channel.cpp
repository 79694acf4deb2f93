#include "pacsim/exact_channel.hpp"

#include <cmath>
#include <stdexcept>

#include "pacsim/codeword.hpp"
#include "pacsim/metric.hpp"

namespace pacsim {

namespace {

// log2(2^a + 2^b) without leaving the log domain
double log2_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -HUGE_VAL) return a;
    return a + log2_1p_exp2_neg(a - b);
}

} // namespace

double exact_bit_channel_llr(int i, const std::vector<double>& y, const Bits& u_prefix,
                             const ChannelModel& ch) {
    int N = int(y.size());
    if (N < 1 || (N & (N - 1)) != 0 || N > 16)
        throw std::invalid_argument("exact_bit_channel_llr: N must be a power of two <= 16");
    if (i < 1 || i > N) throw std::invalid_argument("exact_bit_channel_llr: index out of range");
    if (int(u_prefix.size()) != i - 1)
        throw std::invalid_argument("exact_bit_channel_llr: prefix length must be i-1");

    std::vector<double> llr = channel_llr(y, ch);

    // weight of a codeword in log2 form: sum of channel LLRs where x_j = 0
    // (the common factor prod_j W(y_j|1) cancels in the ratio)
    Bits u(N);
    for (int k = 0; k < i - 1; ++k) u[size_t(k)] = u_prefix[size_t(k)];

    int tail = N - i;
    double num = -HUGE_VAL, den = -HUGE_VAL; // log2 sums for u_i = 0 / 1
    for (uint32_t fill = 0; fill < (1u << tail); ++fill) {
        for (int k = 0; k < tail; ++k) u[size_t(i + k)] = (fill >> k) & 1;
        for (int b = 0; b <= 1; ++b) {
            u[size_t(i) - 1] = uint8_t(b);
            Bits x = polar_transform(u);
            double w = 0.0;
            for (int j = 0; j < N; ++j)
                if (!x[size_t(j)]) w += llr[size_t(j)];
            if (b == 0) num = log2_add(num, w);
            else den = log2_add(den, w);
        }
    }
    return num - den;
}

} // namespace pacsim
