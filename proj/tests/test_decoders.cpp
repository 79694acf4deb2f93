#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pacsim/channel.hpp"
#include "pacsim/decoders.hpp"
#include "pacsim/exact_channel.hpp"
#include "pacsim/metric.hpp"
#include "pacsim/rng.hpp"
#include "pacsim/sc_workspace.hpp"
#include "pacsim/stack_store.hpp"

using namespace pacsim;

namespace {

ChannelModel awgn(double snr_db, double rate = 0.5) {
    ChannelModel ch;
    ch.snr_db = snr_db;
    ch.code_rate = rate;
    return ch;
}

Bits rand_bits(Rng& rng, int k) {
    Bits d(k);
    for (auto& b : d) b = rng.next_bit();
    return d;
}

std::vector<double> noisy_llrs(const CodeSpec& spec, const Bits& d, const ChannelModel& ch,
                               Rng& rng) {
    Bits x = encode(spec, d);
    std::vector<double> y = transmit(modulate(x), ch, rng);
    return channel_llr(y, ch);
}

// total path metric of a fully forced input sequence u, walking the same
// recursion the decoders use
double walk_metric(const std::vector<double>& llr, const Bits& u) {
    int N = int(u.size());
    LlrWorkspace ws(N);
    KernelOps ops;
    ws.load_channel_llrs(llr.begin(), llr.end());
    double m = 0.0;
    for (int i = 0; i < N; ++i) {
        m = metric_accumulate(m, bit_metric_phi(ws.decision_llr(i, ops), u[size_t(i)]));
        ws.set_bit(i, u[size_t(i)]);
    }
    return m;
}

// same walk but only counting the info-position terms, for the frozen-term
// regression below
double walk_metric_info_only(const std::vector<double>& llr, const Bits& u,
                             const CodeSpec& spec) {
    int N = int(u.size());
    LlrWorkspace ws(N);
    KernelOps ops;
    ws.load_channel_llrs(llr.begin(), llr.end());
    double m = 0.0;
    for (int i = 0; i < N; ++i) {
        double phi = bit_metric_phi(ws.decision_llr(i, ops), u[size_t(i)]);
        if (spec.is_info[size_t(i) + 1]) m = metric_accumulate(m, phi);
        ws.set_bit(i, u[size_t(i)]);
    }
    return m;
}

// argmax of the full-path metric over every data word (tiny K only)
Bits best_data_by_enumeration(const std::vector<double>& llr, const CodeSpec& spec,
                              bool info_only = false) {
    Bits best;
    double best_m = -1e18;
    for (uint32_t w = 0; w < (1u << spec.K); ++w) {
        Bits d(size_t(spec.K));
        for (int k = 0; k < spec.K; ++k) d[size_t(k)] = (w >> k) & 1;
        Bits u = conv_encode(insert_data(d, spec.info_set, spec.N), spec.poly);
        double m = info_only ? walk_metric_info_only(llr, u, spec) : walk_metric(llr, u);
        if (m > best_m) {
            best_m = m;
            best = d;
        }
    }
    return best;
}

} // namespace

TEST_CASE("decision LLRs equal the brute-force bit-channel marginalization") {
    Rng rng(41);
    ChannelModel ch = awgn(1.0);
    for (int N : {2, 4, 8}) {
        for (int t = 0; t < 100; ++t) {
            Bits u = rand_bits(rng, N);
            Bits x = polar_transform(u);
            std::vector<double> y = transmit(modulate(x), ch, rng);
            std::vector<double> llr = channel_llr(y, ch);

            LlrWorkspace ws(N);
            KernelOps ops;
            ws.load_channel_llrs(llr.begin(), llr.end());
            Bits prefix;
            for (int i = 0; i < N; ++i) {
                double fast = ws.decision_llr(i, ops);
                double exact = exact_bit_channel_llr(i + 1, y, prefix, ch);
                if (std::fabs(fast) < 4000.0 && std::fabs(exact) < 4000.0)
                    CHECK(fast == doctest::Approx(exact).epsilon(1e-9));
                ws.set_bit(i, u[size_t(i)]);
                prefix.push_back(u[size_t(i)]);
            }
        }
    }
}

TEST_CASE("plain decoding does exactly N log2 N kernel operations") {
    Rng rng(42);
    ChannelModel ch = awgn(2.0);
    for (int N : {8, 64, 1024}) {
        CodeSpec spec = make_rm_code(N, N / 2, ConvPoly{});
        std::vector<double> llr = noisy_llrs(spec, rand_bits(rng, spec.K), ch, rng);
        DecodeOutcome out = sc_decode(llr, spec);
        int n = 0;
        while ((1 << n) < N) ++n;
        CHECK(out.counters.f_ops + out.counters.g_ops == uint64_t(N) * uint64_t(n));
    }
}

TEST_CASE("plain decoding recovers clean transmissions and rejects PAC specs") {
    Rng rng(43);
    CodeSpec spec = make_rm_code(16, 8, ConvPoly{});
    ChannelModel ch = awgn(60.0);
    for (int t = 0; t < 50; ++t) {
        Bits d = rand_bits(rng, 8);
        CHECK(sc_decode(noisy_llrs(spec, d, ch, rng), spec).data == d);
    }
    CodeSpec pac = make_rm_code(16, 8, ConvPoly::from_octal("321"));
    std::vector<double> llr(16, 1.0);
    CHECK_THROWS_AS(sc_decode(llr, pac), std::invalid_argument);
}

TEST_CASE("all-zero LLRs decide all-zero data") {
    CodeSpec spec = make_rm_code(8, 4, ConvPoly{});
    std::vector<double> llr(8, 0.0);
    CHECK(sc_decode(llr, spec).data == Bits{0, 0, 0, 0});
}

TEST_CASE("exhaustive list search returns the metric-maximizing word") {
    Rng rng(44);
    ChannelModel ch = awgn(1.0);
    for (const char* poly : {"", "321"}) {
        for (int K : {4, 8}) {
            CodeSpec spec = make_rm_code(16, K, ConvPoly::from_octal(poly));
            for (int t = 0; t < 50; ++t) {
                std::vector<double> llr = noisy_llrs(spec, rand_bits(rng, K), ch, rng);
                DecodeOutcome out = scl_decode(llr, spec, 1 << K);
                CHECK(out.data == best_data_by_enumeration(llr, spec));
            }
        }
    }
}

TEST_CASE("frozen-position metric terms change list outcomes") {
    // frozen index 5 follows info index 4 here, so its metric term depends on
    // the path; scoring only the info positions must disagree with the full
    // metric on some noisy inputs, and the decoder must follow the full metric
    Rng rng(45);
    ChannelModel ch = awgn(-2.0);
    for (const char* poly : {"", "321"}) {
        CodeSpec spec = make_rm_code(8, 4, ConvPoly::from_octal(poly));
        int disagreements = 0;
        for (int t = 0; t < 500; ++t) {
            std::vector<double> llr = noisy_llrs(spec, rand_bits(rng, 4), ch, rng);
            Bits full = best_data_by_enumeration(llr, spec, false);
            Bits info = best_data_by_enumeration(llr, spec, true);
            CHECK(scl_decode(llr, spec, 16).data == full);
            if (full != info) ++disagreements;
        }
        CHECK(disagreements > 0);
    }
}

TEST_CASE("sorting happens only past the list capacity") {
    Rng rng(46);
    CodeSpec spec = make_rm_code(8, 4, ConvPoly::from_octal("321"));
    std::vector<double> llr = noisy_llrs(spec, rand_bits(rng, 4), awgn(2.5), rng);
    int expect[] = {4, 3, 2, 1, 0};
    int L = 1;
    for (int k = 0; k < 5; ++k, L *= 2)
        CHECK(scl_decode(llr, spec, L).counters.sort_events == uint64_t(expect[k]));
}

TEST_CASE("a list of one behaves like plain decoding on polar codes") {
    Rng rng(47);
    CodeSpec spec = make_rm_code(16, 8, ConvPoly{});
    ChannelModel ch = awgn(0.5);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> llr = noisy_llrs(spec, rand_bits(rng, 8), ch, rng);
        DecodeOutcome a = sc_decode(llr, spec);
        DecodeOutcome b = scl_decode(llr, spec, 1);
        CHECK(a.data == b.data);
        CHECK(a.counters.f_ops == b.counters.f_ops);
        CHECK(a.counters.g_ops == b.counters.g_ops);
    }
}

TEST_CASE("a saturated threshold disables list pruning exactly") {
    Rng rng(48);
    CodeSpec spec = make_rm_code(64, 32, ConvPoly::from_octal("3211"));
    ChannelModel ch = awgn(1.5);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> llr = noisy_llrs(spec, rand_bits(rng, 32), ch, rng);
        DecodeOutcome a = scl_decode(llr, spec, 8);
        DecodeOutcome b = pscl_decode(llr, spec, 8, -kKappa);
        CHECK(a.data == b.data);
        CHECK(a.failed == b.failed);
        CHECK(a.counters.sort_events == b.counters.sort_events);
        CHECK(a.counters.f_ops == b.counters.f_ops);
        CHECK(a.counters.g_ops == b.counters.g_ops);
    }
}

TEST_CASE("list pruning reports failure when everything dies") {
    CodeSpec spec = make_rm_code(8, 4, ConvPoly::from_octal("321"));
    std::vector<double> llr(8, 0.0); // every branch metric is exactly 0
    DecodeOutcome out = pscl_decode(llr, spec, 4, 0.5);
    CHECK(out.failed);
    CHECK(out.reason == FailureKind::all_paths_pruned);
    CHECK(out.data == Bits{0, 0, 0, 0});
}

TEST_CASE("stack search on a clean channel never backtracks") {
    Rng rng(49);
    CodeSpec spec = make_rm_code(8, 4, ConvPoly::from_octal("321"));
    ReliabilityProfile prof = mc_profile(8, awgn(2.5), 50000, 9);
    ChannelModel clean = awgn(60.0);
    for (int t = 0; t < 20; ++t) {
        Bits d = rand_bits(rng, 4);
        DecodeOutcome out = stack_decode(noisy_llrs(spec, d, clean, rng), spec, prof);
        CHECK_FALSE(out.failed);
        CHECK(out.data == d);
        CHECK(out.counters.node_visits == 8);
        CHECK(out.counters.max_stack == 5);
        CHECK(out.counters.end_stack == 5); // K+1, the smallest possible
        CHECK(out.counters.mean_stack == doctest::Approx(2.375));
    }
}

TEST_CASE("worked example block decodes to 1001") {
    CodeSpec spec = make_rm_code(8, 4, ConvPoly::from_octal("321"));
    ReliabilityProfile prof = mc_profile(8, awgn(2.5), 200000, 1);
    std::vector<double> r = {-1.68, -0.74, 1.71, -2.3, 1.07, 2.03, -1.69, 0.22};
    // our modulation sends bit 0 up, so the received block enters negated
    std::vector<double> y(8);
    for (int j = 0; j < 8; ++j) y[size_t(j)] = -r[size_t(j)];
    std::vector<double> llr = channel_llr(y, awgn(2.5));

    DecodeOutcome out = stack_decode(llr, spec, prof);
    CHECK_FALSE(out.failed);
    CHECK(format_bits(out.data) == "1001");

    DecodeOutcome pruned = pstack_decode(llr, spec, prof, -20.0, kDefaultStackCap);
    CHECK_FALSE(pruned.failed);
    CHECK(format_bits(pruned.data) == "1001");
}

TEST_CASE("a saturated threshold disables stack pruning exactly") {
    Rng rng(50);
    CodeSpec spec = make_rm_code(32, 16, ConvPoly::from_octal("3211"));
    ReliabilityProfile prof = mc_profile(32, awgn(2.0), 50000, 11);
    ChannelModel ch = awgn(2.0);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> llr = noisy_llrs(spec, rand_bits(rng, 16), ch, rng);
        DecodeOutcome a = stack_decode(llr, spec, prof);
        DecodeOutcome b = pstack_decode(llr, spec, prof, -kKappa, kDefaultStackCap);
        CHECK(a.data == b.data);
        CHECK(a.failed == b.failed);
        CHECK(a.counters.node_visits == b.counters.node_visits);
        CHECK(a.counters.max_stack == b.counters.max_stack);
        CHECK(a.counters.mean_stack == b.counters.mean_stack);
        CHECK(a.counters.end_stack == b.counters.end_stack);
        CHECK(a.counters.f_ops == b.counters.f_ops);
        CHECK(a.counters.g_ops == b.counters.g_ops);
    }
}

TEST_CASE("schedule-driven pruning equals a fixed threshold from the schedule") {
    Rng rng(51);
    CodeSpec spec = make_rm_code(32, 16, ConvPoly::from_octal("3211"));
    ReliabilityProfile prof = mc_profile(32, awgn(2.0), 50000, 12);
    ThresholdSchedule sched;
    sched.entries = {{0.0, -20}, {2.0, -12}, {3.5, -23}};
    ChannelModel ch = awgn(2.0);
    for (int t = 0; t < 25; ++t) {
        std::vector<double> llr = noisy_llrs(spec, rand_bits(rng, 16), ch, rng);
        DecodeOutcome a = pstackd_decode(llr, spec, prof, sched, 2.1, kDefaultStackCap);
        DecodeOutcome b = pstack_decode(llr, spec, prof, -12.0, kDefaultStackCap);
        CHECK(a.data == b.data);
        CHECK(a.counters.node_visits == b.counters.node_visits);
    }
}

TEST_CASE("stack pruning failure modes carry distinct flags") {
    CodeSpec spec = make_rm_code(8, 4, ConvPoly::from_octal("321"));
    ReliabilityProfile prof = bec_exact_profile(8, 0.5); // any bias profile works here

    std::vector<double> zeros(8, 0.0);
    DecodeOutcome dead = pstack_decode(zeros, spec, prof, 0.5, kDefaultStackCap);
    CHECK(dead.failed);
    CHECK(dead.reason == FailureKind::stack_exhausted);

    Rng rng(52);
    std::vector<double> llr = noisy_llrs(spec, rand_bits(rng, 4), awgn(0.0), rng);
    DecodeOutcome blown = stack_decode(llr, spec, prof, 1);
    CHECK(blown.failed);
    CHECK(blown.reason == FailureKind::stack_overflow);
}

TEST_CASE("store keeps the best path on top with deterministic ties") {
    struct P {
        double G;
        int depth;
    };
    StackStore<P> store;
    store.push({1.0, 3});
    store.push({2.5, 1});
    store.push({2.5, 4}); // same metric, deeper path wins
    store.push({-1.0, 2});
    store.push({2.5, 4}); // full tie, first-in wins

    CHECK(store.is_sorted_descending());
    CHECK(store.size() == 5);
    P a = store.pop_top();
    CHECK(a.G == 2.5);
    CHECK(a.depth == 4);
    P b = store.pop_top();
    CHECK(b.G == 2.5);
    CHECK(b.depth == 4);
    P c = store.pop_top();
    CHECK(c.G == 2.5);
    CHECK(c.depth == 1);
    CHECK(store.pop_top().G == 1.0);
    CHECK(store.pop_top().G == -1.0);
    CHECK(store.empty());
}

TEST_CASE("store pop order is deterministic under random loads") {
    struct P {
        double G;
        int depth;
        int tag;
    };
    Rng rng(53);
    for (int t = 0; t < 20; ++t) {
        StackStore<P> s1, s2;
        for (int k = 0; k < 200; ++k) {
            P item{std::floor(rng.next_double() * 16.0), k % 7, k};
            s1.push(item);
            s2.push(item);
        }
        while (!s1.empty()) {
            P a = s1.pop_top();
            P b = s2.pop_top();
            CHECK(a.G == b.G);
            CHECK(a.depth == b.depth);
            CHECK(a.tag == b.tag);
            CHECK(s1.is_sorted_descending());
        }
    }
}

TEST_CASE("discarded-branch counts at moderate noise match the expected scale") {
    // walking the true path, the number of indices whose sibling branch falls
    // below -20 should be a few dozen out of 128
    Rng rng(54);
    CodeSpec spec = make_rm_code(128, 64, ConvPoly::from_octal("3211"));
    ReliabilityProfile prof = mc_profile(128, awgn(2.5), 50000, 13);
    ChannelModel ch = awgn(2.5);
    double total = 0.0;
    int trials = 20;
    for (int t = 0; t < trials; ++t) {
        Bits d = rand_bits(rng, 64);
        Bits v = insert_data(d, spec.info_set, 128);
        Bits u = conv_encode(v, spec.poly);
        std::vector<double> llr = noisy_llrs(spec, d, ch, rng);

        LlrWorkspace ws(128);
        KernelOps ops;
        ws.load_channel_llrs(llr.begin(), llr.end());
        int below = 0;
        for (int i = 0; i < 128; ++i) {
            double L = ws.decision_llr(i, ops);
            double wrong = bit_metric_gamma(L, uint8_t(u[size_t(i)] ^ 1), prof.cutoff[size_t(i)]);
            if (wrong < -20.0) ++below;
            ws.set_bit(i, u[size_t(i)]);
        }
        total += below;
    }
    double mean = total / double(trials);
    CHECK(mean >= 15.0);
    CHECK(mean <= 120.0);
}
