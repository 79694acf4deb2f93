#include "pacsim/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pacsim/metric.hpp"
#include "pacsim/sc_workspace.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pacsim {

namespace {

constexpr double kSqrtPi = 1.7724538509055160272981675;
constexpr double kZSampleCap = 0x1.0p60; // keeps the Bhattacharyya mean finite; any
                                         // capped sample already forces cutoff -> 0

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

} // namespace

ReliabilityProfile bec_exact_profile(int N, double epsilon) {
    if (N < 1 || (N & (N - 1)) != 0) throw std::invalid_argument("bec_exact_profile: bad N");
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("bec_exact_profile: bad epsilon");
    ReliabilityProfile p;
    p.N = N;
    p.kind = ChannelKind::bec;
    p.epsilon = epsilon;
    p.capacity.resize(size_t(N));
    p.cutoff.resize(size_t(N));
    int n = 0;
    while ((1 << n) < N) ++n;
    for (int i = 0; i < N; ++i) {
        // follow the bits of (i) MSB-first: 0 -> degraded (2e - e^2), 1 -> upgraded (e^2)
        double e = epsilon;
        for (int b = n - 1; b >= 0; --b) {
            if ((i >> b) & 1) e = e * e;
            else e = 2.0 * e - e * e;
        }
        p.capacity[size_t(i)] = clamp01(1.0 - e);
        p.cutoff[size_t(i)] = clamp01(1.0 - std::log2(1.0 + e));
    }
    return p;
}

ReliabilityProfile mc_profile(int N, const ChannelModel& ch, uint64_t trials, uint64_t seed,
                              int workers) {
    if (N < 1 || (N & (N - 1)) != 0) throw std::invalid_argument("mc_profile: bad N");
    if (trials == 0) throw std::invalid_argument("mc_profile: trials must be positive");

    // fixed chunking: per-chunk sums are accumulated in trial order and then
    // combined in chunk order, so the result is independent of `workers`
    const uint64_t chunk = 4096;
    const uint64_t nchunks = (trials + chunk - 1) / chunk;
    std::vector<std::vector<double>> cap_part(nchunks), z_part(nchunks);

#ifdef _OPENMP
    int nthreads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#endif
    for (int64_t c = 0; c < int64_t(nchunks); ++c) {
        std::vector<double> cap(size_t(N), 0.0), zb(size_t(N), 0.0);
        LlrWorkspace ws(N);
        KernelOps ops;
        std::vector<double> y(N), llr(N);
        uint64_t t0 = uint64_t(c) * chunk;
        uint64_t t1 = std::min(trials, t0 + chunk);
        for (uint64_t t = t0; t < t1; ++t) {
            Rng rng(seed, t);
            // all-zero codeword is general enough here: the channel is symmetric
            if (ch.kind == ChannelKind::bi_awgn) {
                double sigma = std::sqrt(ch.sigma2());
                for (int j = 0; j < N; ++j) y[size_t(j)] = 1.0 + sigma * rng.next_gauss();
            } else {
                for (int j = 0; j < N; ++j)
                    y[size_t(j)] = rng.next_double() < ch.epsilon ? kErasure : 0.0;
            }
            llr = channel_llr(y, ch);
            ws.load_channel_llrs(llr.begin(), llr.end());
            for (int i = 0; i < N; ++i) {
                double L = ws.decision_llr(i, ops);
                cap[size_t(i)] += bit_metric_phi(L, 0);
                zb[size_t(i)] += std::min(std::exp2(-0.5 * L), kZSampleCap);
                ws.set_bit(i, 0); // genie: the true bit is always 0
            }
        }
        cap_part[size_t(c)] = std::move(cap);
        z_part[size_t(c)] = std::move(zb);
    }

    ReliabilityProfile p;
    p.N = N;
    p.kind = ch.kind;
    p.snr_db = ch.snr_db;
    p.epsilon = ch.epsilon;
    p.trials = trials;
    p.seed = seed;
    p.capacity.assign(size_t(N), 0.0);
    p.cutoff.assign(size_t(N), 0.0);
    std::vector<double> zsum(size_t(N), 0.0);
    for (uint64_t c = 0; c < nchunks; ++c) {
        for (int i = 0; i < N; ++i) {
            p.capacity[size_t(i)] += cap_part[size_t(c)][size_t(i)];
            zsum[size_t(i)] += z_part[size_t(c)][size_t(i)];
        }
    }
    for (int i = 0; i < N; ++i) {
        p.capacity[size_t(i)] = clamp01(p.capacity[size_t(i)] / double(trials));
        double z = zsum[size_t(i)] / double(trials);
        p.cutoff[size_t(i)] = clamp01(1.0 - std::log2(1.0 + z));
    }
    return p;
}

void save_profile(const std::string& path, const ReliabilityProfile& p) {
    std::ostringstream out;
    out << "N=" << p.N << "\n";
    out << "channel=" << (p.kind == ChannelKind::bi_awgn ? "bi_awgn" : "bec") << "\n";
    if (p.kind == ChannelKind::bi_awgn) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.9g", p.snr_db);
        out << "snr_db=" << buf << "\n";
    } else {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.9g", p.epsilon);
        out << "epsilon=" << buf << "\n";
    }
    out << "trials=" << p.trials << "\n";
    out << "seed=" << p.seed << "\n";
    for (int i = 0; i < p.N; ++i) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%d %.9g %.9g", i + 1, p.capacity[size_t(i)],
                      p.cutoff[size_t(i)]);
        out << buf << "\n";
    }
    if (path == "-") {
        std::fputs(out.str().c_str(), stdout);
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write profile: " + path);
    f << out.str();
}

ReliabilityProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile: " + path);
    ReliabilityProfile p;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.find('=') != std::string::npos) {
            std::string key = line.substr(0, line.find('='));
            std::string val = line.substr(line.find('=') + 1);
            if (key == "N") p.N = std::stoi(val);
            else if (key == "channel") p.kind = (val == "bec") ? ChannelKind::bec : ChannelKind::bi_awgn;
            else if (key == "snr_db") p.snr_db = std::stod(val);
            else if (key == "epsilon") p.epsilon = std::stod(val);
            else if (key == "trials") p.trials = std::stoull(val);
            else if (key == "seed") p.seed = std::stoull(val);
            else throw std::invalid_argument("profile: unknown key '" + key + "' in " + path);
            continue;
        }
        std::istringstream ss(line);
        int idx;
        double cap, cut;
        if (!(ss >> idx >> cap >> cut))
            throw std::invalid_argument("profile: bad data line '" + line + "' in " + path);
        if (idx != int(p.capacity.size()) + 1)
            throw std::invalid_argument("profile: indices must be 1..N in order in " + path);
        p.capacity.push_back(cap);
        p.cutoff.push_back(cut);
    }
    if (p.N == 0 || int(p.capacity.size()) != p.N)
        throw std::invalid_argument("profile: wrong number of rows in " + path);
    return p;
}

void gauss_hermite(int nodes, std::vector<double>& x, std::vector<double>& w) {
    if (nodes < 2) throw std::invalid_argument("gauss_hermite: need at least 2 nodes");
    x.assign(size_t(nodes), 0.0);
    w.assign(size_t(nodes), 0.0);
    const int m = (nodes + 1) / 2;
    double z = 0.0, z1, pp = 0.0;
    for (int i = 0; i < m; ++i) {
        // initial guesses, largest root first
        if (i == 0) z = std::sqrt(2.0 * nodes + 1.0) - 1.85575 * std::pow(2.0 * nodes + 1.0, -1.0 / 6.0);
        else if (i == 1) z -= 1.14 * std::pow(double(nodes), 0.426) / z;
        else if (i == 2) z = 1.86 * z - 0.86 * x[0];
        else if (i == 3) z = 1.91 * z - 0.91 * x[1];
        else z = 2.0 * z - x[size_t(i) - 2];
        for (int iter = 0; iter < 200; ++iter) {
            // orthonormal Hermite recurrence keeps values bounded for large n
            double p1 = 1.0 / std::sqrt(kSqrtPi);
            double p2 = 0.0;
            for (int j = 0; j < nodes; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(double(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * nodes) * p2; // derivative at the root
            z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) < 1e-15) break;
        }
        x[size_t(i)] = z;
        x[size_t(nodes) - 1 - size_t(i)] = -z;
        w[size_t(i)] = 2.0 / (pp * pp);
        w[size_t(nodes) - 1 - size_t(i)] = w[size_t(i)];
    }
}

CapacityDispersion bi_awgn_capacity_dispersion(double sigma2, int nodes) {
    if (sigma2 <= 0.0) throw std::invalid_argument("bi_awgn_capacity_dispersion: bad sigma2");
    std::vector<double> t, w;
    gauss_hermite(nodes, t, w);
    double sigma = std::sqrt(sigma2);
    // information density i(y) = 1 - log2(1 + e^(-2y/sigma^2)) at y = 1 + sigma z;
    // in base-2 form that is exactly bit_metric_phi of the channel LLR
    double c = 0.0, m2 = 0.0;
    for (int k = 0; k < nodes; ++k) {
        double y = 1.0 + sigma * std::sqrt(2.0) * t[size_t(k)];
        double l2 = 2.0 * y / sigma2 / 0.6931471805599453094172321; // base-2 LLR
        double info = 1.0 - log2_1p_exp2_neg(l2);
        c += w[size_t(k)] * info;
        m2 += w[size_t(k)] * info * info;
    }
    c /= kSqrtPi;
    m2 /= kSqrtPi;
    return {c, m2 - c * c};
}

int dynamic_threshold(int N, int K, double snr_db, bool snr_is_es) {
    ChannelModel ch;
    ch.kind = ChannelKind::bi_awgn;
    ch.snr_db = snr_db;
    ch.code_rate = double(K) / double(N);
    ch.snr_is_es = snr_is_es;
    CapacityDispersion cd = bi_awgn_capacity_dispersion(ch.sigma2());
    double arg = (N * cd.C - K + 0.5 * std::log2(double(N))) / std::sqrt(N * cd.V);
    double D = 0.5 * std::erfc(arg / 1.4142135623730950488);
    if (!(D > 0.0)) return -int(kKappa);
    double mt = std::floor(std::log2(D / 10.0));
    if (mt < -kKappa) return -int(kKappa);
    return int(mt);
}

int ThresholdSchedule::lookup(double snr_db) const {
    if (entries.empty()) throw std::invalid_argument("threshold schedule is empty");
    size_t best = 0;
    double bd = std::fabs(entries[0].first - snr_db);
    for (size_t k = 1; k < entries.size(); ++k) {
        double d = std::fabs(entries[k].first - snr_db);
        if (d < bd) {
            bd = d;
            best = k;
        }
    }
    return entries[best].second;
}

void save_schedule(const std::string& path, const ThresholdSchedule& s) {
    std::ostringstream out;
    for (auto& [snr, mt] : s.entries) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%g %d\n", snr, mt);
        out << buf;
    }
    if (path == "-") {
        std::fputs(out.str().c_str(), stdout);
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write schedule: " + path);
    f << out.str();
}

ThresholdSchedule load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schedule: " + path);
    ThresholdSchedule s;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        double snr;
        int mt;
        if (!(ss >> snr >> mt))
            throw std::invalid_argument("schedule: bad line '" + line + "' in " + path);
        s.entries.emplace_back(snr, mt);
    }
    if (s.entries.empty()) throw std::invalid_argument("schedule: no entries in " + path);
    return s;
}

} // namespace pacsim
