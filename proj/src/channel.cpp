#include "pacsim/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "pacsim/metric.hpp"

namespace pacsim {

double ChannelModel::sigma2() const {
    if (kind != ChannelKind::bi_awgn)
        throw std::invalid_argument("sigma2 is only defined for the AWGN channel");
    double es_n0 = std::pow(10.0, snr_db / 10.0);
    if (!snr_is_es) es_n0 *= code_rate; // Eb/N0 -> Es/N0 at rate R
    if (es_n0 <= 0.0) throw std::invalid_argument("invalid SNR");
    return 1.0 / (2.0 * es_n0);
}

std::vector<double> modulate(const Bits& x) {
    std::vector<double> s(x.size());
    for (size_t j = 0; j < x.size(); ++j) s[j] = 1.0 - 2.0 * double(x[j]);
    return s;
}

std::vector<double> transmit(const std::vector<double>& s, const ChannelModel& ch, Rng& rng) {
    std::vector<double> y(s.size());
    if (ch.kind == ChannelKind::bi_awgn) {
        double sigma = std::sqrt(ch.sigma2());
        for (size_t j = 0; j < s.size(); ++j) y[j] = s[j] + sigma * rng.next_gauss();
    } else {
        if (ch.epsilon < 0.0 || ch.epsilon > 1.0)
            throw std::invalid_argument("BEC epsilon out of range");
        for (size_t j = 0; j < s.size(); ++j) {
            if (rng.next_double() < ch.epsilon) y[j] = kErasure;
            else y[j] = s[j] > 0.0 ? 0.0 : 1.0;
        }
    }
    return y;
}

std::vector<double> channel_llr(const std::vector<double>& y, const ChannelModel& ch) {
    std::vector<double> llr(y.size());
    if (ch.kind == ChannelKind::bi_awgn) {
        static constexpr double inv_ln2 = 1.4426950408889634073599247;
        double scale = 2.0 / ch.sigma2() * inv_ln2;
        for (size_t j = 0; j < y.size(); ++j) llr[j] = saturate(scale * y[j]);
    } else {
        for (size_t j = 0; j < y.size(); ++j) {
            if (y[j] == kErasure) llr[j] = 0.0;
            else llr[j] = (y[j] == 0.0) ? kKappa : -kKappa;
        }
    }
    return llr;
}

} // namespace pacsim
