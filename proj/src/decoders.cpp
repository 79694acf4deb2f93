#include "pacsim/decoders.hpp"

#include <algorithm>
#include <stdexcept>

#include "pacsim/channel.hpp"
#include "pacsim/metric.hpp"
#include "pacsim/stack_store.hpp"

namespace pacsim {

namespace {

void check_inputs(const std::vector<double>& llr, const CodeSpec& spec) {
    if (!spec.materialized())
        throw std::invalid_argument("decode: code spec has no materialized info set");
    if (int(llr.size()) != spec.N)
        throw std::invalid_argument("decode: LLR length does not match block length");
}

DecodeOutcome failure(const CodeSpec& spec, FailureKind why, DecodeCounters c) {
    DecodeOutcome out;
    out.data.assign(size_t(spec.K), 0);
    out.failed = true;
    out.reason = why;
    out.counters = c;
    return out;
}

// ---------------------------------------------------------------- list decoding

struct ListPath {
    LlrWorkspace ws;
    Bits v;          // decided pre-transform bits so far
    double metric = 0.0;
    double dec_llr = 0.0;
    uint64_t reg = 0; // convolution register, last m bits of v
};

// one engine for plain and pruned list decoding; prune = nullopt disables the
// threshold entirely (scl_decode), so the degeneration check m_T = -kKappa vs
// no threshold is a real test of the pruning wiring
DecodeOutcome list_engine(const std::vector<double>& llr, const CodeSpec& spec, int L,
                          std::optional<double> prune) {
    check_inputs(llr, spec);
    if (L < 1) throw std::invalid_argument("list decode: L must be >= 1");

    const int N = spec.N;
    const uint64_t mask = spec.poly.mask();
    const int mem = spec.poly.memory();

    DecodeCounters counters;
    KernelOps ops;

    std::vector<ListPath> paths;
    {
        ListPath root{LlrWorkspace(N), {}, 0.0, 0.0, 0};
        root.ws.load_channel_llrs(llr.begin(), llr.end());
        root.v.reserve(size_t(N));
        paths.push_back(std::move(root));
    }

    struct Cand {
        size_t parent;
        uint8_t bit;   // data-side branch bit v_i
        uint8_t u;     // transform-side bit fed to phi and the partial sums
        double metric;
        double step;   // this branch's own metric term, what the threshold sees
    };
    std::vector<Cand> cands;

    for (int phase = 0; phase < N; ++phase) {
        const bool info = spec.is_info[size_t(phase) + 1] != 0;
        for (auto& p : paths) p.dec_llr = p.ws.decision_llr(phase, ops);

        if (!info) {
            // the tree does not branch here, so the threshold is not consulted;
            // the metric term still accumulates and may well be negative
            for (auto& p : paths) {
                uint8_t u = conv_output_bit(p.reg, 0, mask);
                p.metric = metric_accumulate(p.metric, bit_metric_phi(p.dec_llr, u));
                p.ws.set_bit(phase, u);
                p.reg = conv_shift(p.reg, 0, mem);
                p.v.push_back(0);
            }
            continue;
        }

        cands.clear();
        for (size_t k = 0; k < paths.size(); ++k) {
            const ListPath& p = paths[k];
            for (uint8_t b = 0; b <= 1; ++b) {
                uint8_t u = conv_output_bit(p.reg, b, mask);
                double step = bit_metric_phi(p.dec_llr, u);
                cands.push_back({k, b, u, metric_accumulate(p.metric, step), step});
            }
        }
        // the threshold exists to shrink the selection input, so it is only
        // consulted when a selection would otherwise be needed; below that the
        // list grows by plain duplication
        if (prune && int(cands.size()) > L) {
            cands.erase(std::remove_if(cands.begin(), cands.end(),
                                       [&](const Cand& c) { return c.step < *prune; }),
                        cands.end());
            if (cands.empty()) {
                counters.f_ops = ops.f_ops;
                counters.g_ops = ops.g_ops;
                return failure(spec, FailureKind::all_paths_pruned, counters);
            }
        }
        if (int(cands.size()) > L) {
            ++counters.sort_events;
            // stable: equal metrics keep the lower creation index
            std::stable_sort(cands.begin(), cands.end(),
                             [](const Cand& a, const Cand& b) { return a.metric > b.metric; });
            cands.resize(size_t(L));
            std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
                return a.parent != b.parent ? a.parent < b.parent : a.bit < b.bit;
            });
        }

        // how many children each parent keeps, to clone only when both survive
        std::vector<uint8_t> uses(paths.size(), 0);
        for (const Cand& c : cands) ++uses[c.parent];

        std::vector<ListPath> next;
        next.reserve(cands.size());
        for (const Cand& c : cands) {
            ListPath child = (--uses[c.parent] == 0) ? std::move(paths[c.parent])
                                                     : paths[c.parent];
            child.ws.set_bit(phase, c.u);
            child.metric = c.metric;
            child.reg = conv_shift(child.reg, c.bit, mem);
            child.v.push_back(c.bit);
            next.push_back(std::move(child));
        }
        paths = std::move(next);
    }

    size_t best = 0;
    for (size_t k = 1; k < paths.size(); ++k)
        if (paths[k].metric > paths[best].metric) best = k;

    DecodeOutcome out;
    out.data = extract_data(paths[best].v, spec.info_set);
    counters.f_ops = ops.f_ops;
    counters.g_ops = ops.g_ops;
    out.counters = counters;
    return out;
}

// ---------------------------------------------------------------- stack decoding

struct StackPath {
    double G = 0.0;
    int depth = 0;
    uint64_t reg = 0;
    LlrWorkspace ws;
    Bits v;

    explicit StackPath(int N) : ws(N) {}
};

DecodeOutcome stack_engine(const std::vector<double>& llr, const CodeSpec& spec,
                           const ReliabilityProfile& profile, std::optional<double> prune,
                           size_t cap) {
    check_inputs(llr, spec);
    if (profile.N != spec.N)
        throw std::invalid_argument("stack decode: profile length does not match the code");

    const int N = spec.N;
    const uint64_t mask = spec.poly.mask();
    const int mem = spec.poly.memory();

    DecodeCounters counters;
    KernelOps ops;
    uint64_t size_sum = 0, samples = 0;

    StackStore<StackPath> store;
    {
        StackPath root(N);
        root.ws.load_channel_llrs(llr.begin(), llr.end());
        root.v.reserve(size_t(N));
        store.push(std::move(root));
    }

    auto finish_counters = [&]() {
        counters.f_ops = ops.f_ops;
        counters.g_ops = ops.g_ops;
        counters.mean_stack = samples ? double(size_sum) / double(samples) : 0.0;
        // the winner is still in the store on normal exit, so this counts it
        counters.end_stack = store.size();
    };

    while (store.top().depth < N) {
        StackPath cur = store.pop_top();
        ++counters.node_visits;
        const int phase = cur.depth;
        const bool info = spec.is_info[size_t(phase) + 1] != 0;
        const double e0 = profile.cutoff[size_t(phase)];
        double L = cur.ws.decision_llr(phase, ops);

        uint8_t bs[2];
        double gs[2];
        int nb = 0;
        for (uint8_t b = 0; b <= uint8_t(info ? 1 : 0); ++b) {
            uint8_t u = conv_output_bit(cur.reg, b, mask);
            double gamma = bit_metric_gamma(L, u, e0);
            if (prune && gamma < *prune) continue; // silent path death
            bs[nb] = b;
            gs[nb] = gamma;
            ++nb;
        }
        for (int k = 0; k < nb; ++k) {
            uint8_t b = bs[k];
            uint8_t u = conv_output_bit(cur.reg, b, mask);
            StackPath child = (k == nb - 1) ? std::move(cur) : cur;
            child.ws.set_bit(phase, u);
            child.G = metric_accumulate(child.G, gs[k]);
            child.reg = conv_shift(child.reg, b, mem);
            child.v.push_back(b);
            child.depth = phase + 1;
            store.push(std::move(child));
        }

        // stack statistics, one sample per pop iteration
        ++samples;
        size_sum += store.size();
        counters.max_stack = std::max(counters.max_stack, uint64_t(store.size()));

        if (store.empty()) {
            finish_counters();
            return failure(spec, FailureKind::stack_exhausted, counters);
        }
        if (store.size() > cap) {
            finish_counters();
            return failure(spec, FailureKind::stack_overflow, counters);
        }
    }

    finish_counters();
    DecodeOutcome out;
    out.data = extract_data(store.top().v, spec.info_set);
    out.counters = counters;
    return out;
}

} // namespace

DecodeOutcome sc_decode(const std::vector<double>& llr, const CodeSpec& spec) {
    check_inputs(llr, spec);
    if (spec.is_pac())
        throw std::invalid_argument("sc_decode handles plain polar codes; use scl_decode with L=1 for PAC");

    const int N = spec.N;
    DecodeCounters counters;
    KernelOps ops;
    LlrWorkspace ws(N);
    ws.load_channel_llrs(llr.begin(), llr.end());

    Bits v(size_t(N), 0);
    for (int phase = 0; phase < N; ++phase) {
        double L = ws.decision_llr(phase, ops);
        uint8_t u = 0;
        if (spec.is_info[size_t(phase) + 1]) u = (L < 0.0) ? 1 : 0; // tie goes to 0
        ws.set_bit(phase, u);
        v[size_t(phase)] = u;
    }

    DecodeOutcome out;
    out.data = extract_data(v, spec.info_set);
    counters.f_ops = ops.f_ops;
    counters.g_ops = ops.g_ops;
    out.counters = counters;
    return out;
}

DecodeOutcome scl_decode(const std::vector<double>& llr, const CodeSpec& spec, int L) {
    return list_engine(llr, spec, L, std::nullopt);
}

DecodeOutcome pscl_decode(const std::vector<double>& llr, const CodeSpec& spec, int L,
                          double m_T) {
    return list_engine(llr, spec, L, m_T);
}

DecodeOutcome stack_decode(const std::vector<double>& llr, const CodeSpec& spec,
                           const ReliabilityProfile& profile, size_t stack_cap) {
    return stack_engine(llr, spec, profile, std::nullopt, stack_cap);
}

DecodeOutcome pstack_decode(const std::vector<double>& llr, const CodeSpec& spec,
                            const ReliabilityProfile& profile, double m_T, size_t stack_cap) {
    return stack_engine(llr, spec, profile, m_T, stack_cap);
}

DecodeOutcome pstackd_decode(const std::vector<double>& llr, const CodeSpec& spec,
                             const ReliabilityProfile& profile, const ThresholdSchedule& sched,
                             double snr_db, size_t stack_cap) {
    return stack_engine(llr, spec, profile, double(sched.lookup(snr_db)), stack_cap);
}

} // namespace pacsim
