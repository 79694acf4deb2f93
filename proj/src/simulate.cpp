#include "pacsim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pacsim/metric.hpp"
#include "pacsim/sc_workspace.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pacsim {

namespace {

constexpr uint64_t kBatch = 512; // stopping rule is evaluated at these boundaries

std::string fmt6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

std::string resolve_profile_path(const std::string& pattern, double point) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", point);
    return replace_all(pattern, "{snr}", buf);
}

bool needs_profile(const ExperimentConfig& cfg) {
    switch (cfg.decoder.kind) {
        case DecoderKind::stack:
        case DecoderKind::pstack:
        case DecoderKind::pstackd: return true;
        default: return cfg.code.profile == RateProfileKind::capacity;
    }
}

struct ResolvedPoint {
    double point = 0.0;
    ChannelModel ch;
    CodeSpec code;
    ReliabilityProfile profile; // valid only when has_profile
    bool has_profile = false;
    ThresholdSchedule sched;
    bool has_sched = false;
};

ResolvedPoint resolve_point(const ExperimentConfig& cfg, double point, size_t grid_size) {
    ResolvedPoint r;
    r.point = point;
    r.ch.kind = cfg.channel;
    r.code = cfg.code;
    if (cfg.channel == ChannelKind::bi_awgn) {
        r.ch.snr_db = point;
        r.ch.snr_is_es = cfg.snr_is_es;
        r.ch.code_rate = double(cfg.code.K) / double(cfg.code.N);
    } else {
        r.ch.epsilon = point;
    }
    if (needs_profile(cfg)) {
        if (cfg.decoder.profile_path.empty())
            throw std::invalid_argument("this decoder/code needs a reliability profile, none configured");
        r.profile = load_profile(resolve_profile_path(cfg.decoder.profile_path, point));
        r.has_profile = true;
        if (r.profile.N != cfg.code.N)
            throw std::invalid_argument("reliability profile length does not match the code");
        // a multi-point grid with one shared profile is almost certainly a mistake
        if (grid_size > 1) {
            double got = cfg.channel == ChannelKind::bi_awgn ? r.profile.snr_db : r.profile.epsilon;
            if (std::fabs(point - got) > 1e-9)
                throw std::invalid_argument("profile operating point does not match grid point");
        }
        if (r.code.profile == RateProfileKind::capacity && !r.code.materialized())
            materialize_info_set(r.code, r.profile.capacity);
    }
    if (cfg.decoder.kind == DecoderKind::pstackd) {
        if (cfg.decoder.schedule_path.empty())
            throw std::invalid_argument("pstackd needs a threshold schedule");
        r.sched = load_schedule(cfg.decoder.schedule_path);
        r.has_sched = true;
    }
    if (!r.code.materialized())
        throw std::invalid_argument("code spec not materialized (capacity profile without a reliability profile?)");
    return r;
}

DecodeOutcome dispatch_decode(const ResolvedPoint& rp, const DecoderSetup& dec,
                              const std::vector<double>& llr) {
    switch (dec.kind) {
        case DecoderKind::sc: return sc_decode(llr, rp.code);
        case DecoderKind::scl: return scl_decode(llr, rp.code, dec.list_size);
        case DecoderKind::pscl: return pscl_decode(llr, rp.code, dec.list_size, dec.m_T);
        case DecoderKind::stack: return stack_decode(llr, rp.code, rp.profile, dec.stack_cap);
        case DecoderKind::pstack:
            return pstack_decode(llr, rp.code, rp.profile, dec.m_T, dec.stack_cap);
        case DecoderKind::pstackd:
            return pstackd_decode(llr, rp.code, rp.profile, rp.sched, rp.point, dec.stack_cap);
    }
    throw std::logic_error("unknown decoder kind");
}

struct TrialStat {
    uint8_t error = 0;
    DecodeCounters counters;
};

TrialStat run_trial(const ExperimentConfig& cfg, const ResolvedPoint& rp, size_t snr_index,
                    uint64_t trial) {
    // one RNG stream per trial; the high bits keep snr points apart
    Rng rng(cfg.seed, (uint64_t(snr_index + 1) << 40) ^ trial);
    Bits d(size_t(rp.code.K));
    for (auto& b : d) b = rng.next_bit();
    Bits x = encode(rp.code, d);
    std::vector<double> s = modulate(x);
    std::vector<double> y = transmit(s, rp.ch, rng);
    std::vector<double> llr = channel_llr(y, rp.ch);
    DecodeOutcome out = dispatch_decode(rp, cfg.decoder, llr);
    TrialStat st;
    st.error = (out.failed || out.data != d) ? 1 : 0;
    st.counters = out.counters;
    return st;
}

struct Accum {
    uint64_t trials = 0, errors = 0, max_stack = 0;
    double sort_events = 0, f_ops = 0, g_ops = 0, node_visits = 0, mean_stack = 0;
    double end_stack = 0;

    void add(const TrialStat& st) {
        ++trials;
        errors += st.error;
        sort_events += double(st.counters.sort_events);
        f_ops += double(st.counters.f_ops);
        g_ops += double(st.counters.g_ops);
        node_visits += double(st.counters.node_visits);
        mean_stack += st.counters.mean_stack;
        end_stack += double(st.counters.end_stack);
        max_stack = std::max(max_stack, st.counters.max_stack);
    }

    bool done(const StoppingRule& s) const {
        if (trials >= s.max_trials) return true;
        return errors >= s.target_frame_errors && trials >= s.min_trials;
    }

    SnrResult result(double point) const {
        SnrResult r;
        r.point = point;
        r.trials = trials;
        r.frame_errors = errors;
        r.fer = trials ? double(errors) / double(trials) : 0.0;
        auto [lo, hi] = wilson_ci(errors, trials);
        r.ci_low = lo;
        r.ci_high = hi;
        double n = trials ? double(trials) : 1.0;
        r.mean_sort_events = sort_events / n;
        r.mean_stack = mean_stack / n;
        r.mean_end_stack = end_stack / n;
        r.max_stack = max_stack;
        r.mean_f_ops = f_ops / n;
        r.mean_g_ops = g_ops / n;
        r.mean_node_visits = node_visits / n;
        return r;
    }
};

} // namespace

std::pair<double, double> wilson_ci(uint64_t k, uint64_t n) {
    if (n == 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    constexpr double z2 = z * z;
    double nn = double(n);
    double p = double(k) / nn;
    double denom = 1.0 + z2 / nn;
    double center = (p + z2 / (2.0 * nn)) / denom;
    double hw = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    // the endpoints are exact at the degenerate counts; don't leak rounding dust
    double lo = k == 0 ? 0.0 : std::max(0.0, center - hw);
    double hi = k == n ? 1.0 : std::min(1.0, center + hw);
    return {lo, hi};
}

SimReport run_experiment(const ExperimentConfig& cfg) {
    SimReport rep;
    for (size_t si = 0; si < cfg.grid.size(); ++si) {
        ResolvedPoint rp = resolve_point(cfg, cfg.grid[si], cfg.grid.size());
        Accum acc;
        std::vector<TrialStat> batch;
        while (!acc.done(cfg.stop)) {
            uint64_t b = std::min<uint64_t>(kBatch, cfg.stop.max_trials - acc.trials);
            uint64_t base = acc.trials;
            batch.assign(size_t(b), TrialStat{});
#ifdef _OPENMP
            int nthreads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#endif
            for (int64_t k = 0; k < int64_t(b); ++k)
                batch[size_t(k)] = run_trial(cfg, rp, si, base + uint64_t(k));
            for (const TrialStat& st : batch) acc.add(st); // ordered reduction
        }
        rep.rows.push_back(acc.result(cfg.grid[si]));
    }
    return rep;
}

SimReport run_experiment_serial(const ExperimentConfig& cfg) {
    // reference implementation: one straight loop, same batch boundaries for
    // the stopping rule, so it must match run_experiment byte for byte
    SimReport rep;
    for (size_t si = 0; si < cfg.grid.size(); ++si) {
        ResolvedPoint rp = resolve_point(cfg, cfg.grid[si], cfg.grid.size());
        Accum acc;
        while (!acc.done(cfg.stop)) {
            uint64_t b = std::min<uint64_t>(kBatch, cfg.stop.max_trials - acc.trials);
            uint64_t base = acc.trials;
            for (uint64_t k = 0; k < b; ++k) acc.add(run_trial(cfg, rp, si, base + k));
        }
        rep.rows.push_back(acc.result(cfg.grid[si]));
    }
    return rep;
}

std::string report_csv(const SimReport& r) {
    std::ostringstream out;
    out << "point,trials,frame_errors,fer,mean_sort_events,mean_stack,mean_end_stack,"
           "max_stack,mean_f_ops,mean_g_ops,mean_node_visits,wilson_ci_low,wilson_ci_high\n";
    for (const SnrResult& row : r.rows) {
        out << fmt6(row.point) << ',' << row.trials << ',' << row.frame_errors << ','
            << fmt6(row.fer) << ',' << fmt6(row.mean_sort_events) << ',' << fmt6(row.mean_stack)
            << ',' << fmt6(row.mean_end_stack) << ',' << row.max_stack << ','
            << fmt6(row.mean_f_ops) << ',' << fmt6(row.mean_g_ops) << ','
            << fmt6(row.mean_node_visits) << ',' << fmt6(row.ci_low) << ','
            << fmt6(row.ci_high) << "\n";
    }
    return out.str();
}

namespace {

const char* kind_name(DecoderKind k) {
    switch (k) {
        case DecoderKind::sc: return "sc";
        case DecoderKind::scl: return "scl";
        case DecoderKind::pscl: return "pscl";
        case DecoderKind::stack: return "stack";
        case DecoderKind::pstack: return "pstack";
        case DecoderKind::pstackd: return "pstackd";
    }
    return "?";
}

} // namespace

std::string report_json(const SimReport& r, const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["code"] = {{"N", cfg.code.N},
                 {"K", cfg.code.K},
                 {"pac", cfg.code.is_pac()},
                 {"info_set_size", cfg.code.info_set.size()}};
    j["channel"] = cfg.channel == ChannelKind::bi_awgn ? "bi_awgn" : "bec";
    j["decoder"] = kind_name(cfg.decoder.kind);
    j["list_size"] = cfg.decoder.list_size;
    j["seed"] = cfg.seed;
    j["rows"] = nlohmann::ordered_json::array();
    for (const SnrResult& row : r.rows) {
        nlohmann::ordered_json o;
        o["point"] = row.point;
        o["trials"] = row.trials;
        o["frame_errors"] = row.frame_errors;
        o["fer"] = row.fer;
        o["mean_sort_events"] = row.mean_sort_events;
        o["mean_stack"] = row.mean_stack;
        o["mean_end_stack"] = row.mean_end_stack;
        o["max_stack"] = row.max_stack;
        o["mean_f_ops"] = row.mean_f_ops;
        o["mean_g_ops"] = row.mean_g_ops;
        o["mean_node_visits"] = row.mean_node_visits;
        o["wilson_ci_low"] = row.ci_low;
        o["wilson_ci_high"] = row.ci_high;
        j["rows"].push_back(o);
    }
    return j.dump(2) + "\n";
}

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

void export_report(const SimReport& r, const ExperimentConfig& cfg,
                   const std::string& config_text, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream f(out_dir + "/report.csv");
        if (!f) throw std::runtime_error("cannot write report.csv in " + out_dir);
        f << report_csv(r);
    }
    {
        std::ofstream f(out_dir + "/report.json");
        if (!f) throw std::runtime_error("cannot write report.json in " + out_dir);
        f << report_json(r, cfg);
    }
    std::ofstream mf(out_dir + "/run-manifest.txt");
    if (!mf) throw std::runtime_error("cannot write run-manifest.txt in " + out_dir);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a64(config_text));
    mf << "tool=pacsim\n";
    mf << "seed=" << cfg.seed << "\n";
    mf << "workers=" << cfg.workers << "\n";
    mf << "config_fnv1a64=" << buf << "\n";
    mf << "grid=";
    for (size_t k = 0; k < cfg.grid.size(); ++k) mf << (k ? "," : "") << fmt6(cfg.grid[k]);
    mf << "\n";
    if (needs_profile(cfg)) {
        for (double point : cfg.grid) {
            std::string p = resolve_profile_path(cfg.decoder.profile_path, point);
            std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a64(file_bytes(p)));
            mf << "profile=" << p << " fnv1a64=" << buf << "\n";
        }
    }
    if (!cfg.decoder.schedule_path.empty()) {
        std::snprintf(buf, sizeof buf, "%016llx",
                      (unsigned long long)fnv1a64(file_bytes(cfg.decoder.schedule_path)));
        mf << "schedule=" << cfg.decoder.schedule_path << " fnv1a64=" << buf << "\n";
    }
}

// ------------------------------------------------------------------ config file

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

std::vector<double> parse_point_list(const std::string& text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    if (text.find(':') != std::string::npos) {
        // a:step:b inclusive
        std::stringstream ss(text);
        std::string tok;
        std::vector<double> parts;
        while (std::getline(ss, tok, ':')) parts.push_back(std::stod(trim(tok)));
        if (parts.size() != 3 || parts[1] <= 0.0)
            throw std::invalid_argument("bad range '" + text + "' (want a:step:b)");
        for (double v = parts[0]; v <= parts[2] + 1e-9; v += parts[1]) out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(trim(tok)));
    return out;
}

ExperimentConfig parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::map<std::string, std::map<std::string, std::string>> ini;
    std::string line, section;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: bad line '" + line + "' in " + path);
        ini[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto get = [&](const std::string& sec, const std::string& key,
                   const std::string& def = "") -> std::string {
        auto s = ini.find(sec);
        if (s == ini.end()) return def;
        auto k = s->second.find(key);
        return k == s->second.end() ? def : k->second;
    };

    ExperimentConfig cfg;

    // [code]
    if (!get("code", "spec_file").empty()) {
        cfg.code = load_code_spec(get("code", "spec_file"));
    } else {
        int N = std::stoi(get("code", "N", "0"));
        int K = std::stoi(get("code", "K", "0"));
        ConvPoly poly = ConvPoly::from_octal(get("code", "poly_octal"));
        std::string prof = get("code", "profile", "rm");
        if (prof == "rm") {
            cfg.code = make_rm_code(N, K, poly);
        } else if (prof == "capacity") {
            cfg.code = make_code_spec(N, K, poly, {}, RateProfileKind::capacity);
        } else if (prof == "explicit") {
            std::vector<int> A;
            std::stringstream ss(get("code", "A"));
            std::string tok;
            while (std::getline(ss, tok, ',')) A.push_back(std::stoi(trim(tok)));
            std::sort(A.begin(), A.end());
            cfg.code = make_code_spec(N, K, poly, std::move(A));
        } else {
            throw std::invalid_argument("config: unknown rate profile '" + prof + "'");
        }
    }

    // [channel]
    std::string kind = get("channel", "kind", "bi_awgn");
    if (kind == "bi_awgn") {
        cfg.channel = ChannelKind::bi_awgn;
        cfg.grid = parse_point_list(get("channel", "snr_db"));
    } else if (kind == "bec") {
        cfg.channel = ChannelKind::bec;
        cfg.grid = parse_point_list(get("channel", "epsilon"));
    } else {
        throw std::invalid_argument("config: unknown channel kind '" + kind + "'");
    }
    cfg.snr_is_es = get("channel", "esn0", "0") == "1";
    if (cfg.grid.empty()) throw std::invalid_argument("config: empty channel grid");

    // [decoder]
    std::string dec = get("decoder", "kind", "scl");
    if (dec == "sc") cfg.decoder.kind = DecoderKind::sc;
    else if (dec == "scl") cfg.decoder.kind = DecoderKind::scl;
    else if (dec == "pscl") cfg.decoder.kind = DecoderKind::pscl;
    else if (dec == "stack") cfg.decoder.kind = DecoderKind::stack;
    else if (dec == "pstack") cfg.decoder.kind = DecoderKind::pstack;
    else if (dec == "pstackd") cfg.decoder.kind = DecoderKind::pstackd;
    else throw std::invalid_argument("config: unknown decoder '" + dec + "'");
    cfg.decoder.list_size = std::stoi(get("decoder", "list", "1"));
    cfg.decoder.m_T = std::stod(get("decoder", "m_T", "-4096"));
    cfg.decoder.profile_path = get("decoder", "profile");
    cfg.decoder.schedule_path = get("decoder", "schedule");
    cfg.decoder.stack_cap = std::stoull(get("decoder", "stack_cap", "1000000"));

    // [run]
    cfg.stop.min_trials = std::stoull(get("run", "min_trials", "1"));
    cfg.stop.max_trials = std::stoull(get("run", "max_trials", "1000000"));
    cfg.stop.target_frame_errors = std::stoull(get("run", "target_frame_errors", "100"));
    cfg.seed = std::stoull(get("run", "seed", "1"));
    cfg.workers = std::stoi(get("run", "workers", "0"));
    return cfg;
}

// ---------------------------------------------------------- genie-aided statistics

namespace {

// random data each trial, decisions forced to the transmitted path
template <class CB>
void genie_walk(const CodeSpec& spec, const ChannelModel& ch, uint64_t trials, uint64_t seed,
                CB&& per_index) {
    const int N = spec.N;
    LlrWorkspace ws(N);
    KernelOps ops;
    for (uint64_t t = 0; t < trials; ++t) {
        Rng rng(seed, t);
        Bits d(size_t(spec.K));
        for (auto& b : d) b = rng.next_bit();
        Bits v = insert_data(d, spec.info_set, N);
        Bits u = conv_encode(v, spec.poly);
        Bits x = polar_transform(u);
        std::vector<double> s = modulate(x);
        std::vector<double> y = transmit(s, ch, rng);
        std::vector<double> llr = channel_llr(y, ch);
        ws.load_channel_llrs(llr.begin(), llr.end());
        for (int i = 0; i < N; ++i) {
            double L = ws.decision_llr(i, ops);
            per_index(i, L, u[size_t(i)]);
            ws.set_bit(i, u[size_t(i)]);
        }
    }
}

} // namespace

DriftReport drift_experiment(const CodeSpec& spec, const ChannelModel& ch, uint64_t trials,
                             uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("drift_experiment: trials must be positive");
    const int N = spec.N;
    DriftReport r;
    r.N = N;
    r.trials = trials;
    std::vector<double> sc(size_t(N), 0.0), sc2(size_t(N), 0.0);
    std::vector<double> sw(size_t(N), 0.0), sw2(size_t(N), 0.0);
    genie_walk(spec, ch, trials, seed, [&](int i, double L, uint8_t u) {
        double pc = bit_metric_phi(L, u);
        double pw = bit_metric_phi(L, uint8_t(u ^ 1));
        sc[size_t(i)] += pc;
        sc2[size_t(i)] += pc * pc;
        sw[size_t(i)] += pw;
        sw2[size_t(i)] += pw * pw;
    });
    double n = double(trials);
    r.mean_correct.resize(size_t(N));
    r.se_correct.resize(size_t(N));
    r.mean_wrong.resize(size_t(N));
    r.se_wrong.resize(size_t(N));
    for (int i = 0; i < N; ++i) {
        double mc = sc[size_t(i)] / n;
        double mw = sw[size_t(i)] / n;
        r.mean_correct[size_t(i)] = mc;
        r.mean_wrong[size_t(i)] = mw;
        double vc = std::max(0.0, sc2[size_t(i)] / n - mc * mc);
        double vw = std::max(0.0, sw2[size_t(i)] / n - mw * mw);
        r.se_correct[size_t(i)] = std::sqrt(vc / n);
        r.se_wrong[size_t(i)] = std::sqrt(vw / n);
    }
    return r;
}

std::vector<std::vector<uint64_t>> phi_tail_counts(const CodeSpec& spec, const ChannelModel& ch,
                                                   uint64_t trials, uint64_t seed,
                                                   const std::vector<double>& thresholds) {
    std::vector<std::vector<uint64_t>> counts(size_t(spec.N),
                                              std::vector<uint64_t>(thresholds.size(), 0));
    genie_walk(spec, ch, trials, seed, [&](int i, double L, uint8_t u) {
        double pc = bit_metric_phi(L, u);
        for (size_t k = 0; k < thresholds.size(); ++k)
            if (pc <= thresholds[k]) ++counts[size_t(i)][k];
    });
    return counts;
}

} // namespace pacsim
