// pacsim: encode / decode / profile / simulate / threshold for polar and PAC
// codes. Exit codes: 0 ok, 1 decode failure, 2 usage error, 3 I/O error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pacsim/channel.hpp"
#include "pacsim/code_spec.hpp"
#include "pacsim/decoders.hpp"
#include "pacsim/reliability.hpp"
#include "pacsim/simulate.hpp"

using namespace pacsim;

namespace {

uint64_t default_seed() {
    if (const char* env = std::getenv("PACSIM_SEED")) return std::stoull(env);
    return 1;
}

void announce_seed(uint64_t seed) {
    std::fprintf(stderr, "# seed = %llu\n", (unsigned long long)seed);
}

std::vector<double> read_reals(const std::string& path) {
    std::istream* in = &std::cin;
    std::ifstream file;
    if (path != "-") {
        file.open(path);
        if (!file) throw std::runtime_error("cannot open LLR file: " + path);
        in = &file;
    }
    std::vector<double> vals;
    std::string line;
    while (std::getline(*in, line)) {
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos || line[a] == '#') continue;
        vals.push_back(std::stod(line));
    }
    return vals;
}

const char* reason_name(FailureKind k) {
    switch (k) {
        case FailureKind::none: return "none";
        case FailureKind::all_paths_pruned: return "all_paths_pruned";
        case FailureKind::stack_exhausted: return "stack_exhausted";
        case FailureKind::stack_overflow: return "stack_overflow";
    }
    return "?";
}

struct DecodeArgs {
    std::string spec_path, profile_path, schedule_path, llr_path = "-";
    std::string decoder = "scl";
    int list_size = 1;
    double m_T = -kKappa;
    double snr_db = 0.0;
    size_t stack_cap = kDefaultStackCap;
};

int run_decode(const DecodeArgs& a) {
    CodeSpec spec = load_code_spec(a.spec_path);
    ReliabilityProfile profile;
    bool have_profile = false;
    if (!a.profile_path.empty()) {
        profile = load_profile(a.profile_path);
        have_profile = true;
        if (profile.N != spec.N)
            throw std::invalid_argument("profile length does not match the code");
        if (!spec.materialized()) materialize_info_set(spec, profile.capacity);
    }
    if (!spec.materialized())
        throw std::invalid_argument("code needs a reliability profile to pick its info set");

    bool stack_family = a.decoder == "stack" || a.decoder == "pstack" || a.decoder == "pstackd";
    if (stack_family && !have_profile)
        throw std::invalid_argument("decoder '" + a.decoder + "' needs --profile");
    ThresholdSchedule sched;
    if (a.decoder == "pstackd") {
        if (a.schedule_path.empty())
            throw std::invalid_argument("pstackd needs --schedule");
        sched = load_schedule(a.schedule_path);
    }

    std::vector<double> llr = read_reals(a.llr_path);
    if (llr.empty() || llr.size() % size_t(spec.N) != 0)
        throw std::invalid_argument("LLR line count must be a nonzero multiple of N");

    bool any_failed = false;
    for (size_t off = 0; off < llr.size(); off += size_t(spec.N)) {
        std::vector<double> block(llr.begin() + long(off), llr.begin() + long(off) + spec.N);
        DecodeOutcome out;
        if (a.decoder == "sc") out = sc_decode(block, spec);
        else if (a.decoder == "scl") out = scl_decode(block, spec, a.list_size);
        else if (a.decoder == "pscl") out = pscl_decode(block, spec, a.list_size, a.m_T);
        else if (a.decoder == "stack") out = stack_decode(block, spec, profile, a.stack_cap);
        else if (a.decoder == "pstack")
            out = pstack_decode(block, spec, profile, a.m_T, a.stack_cap);
        else if (a.decoder == "pstackd")
            out = pstackd_decode(block, spec, profile, sched, a.snr_db, a.stack_cap);
        else throw std::invalid_argument("unknown decoder '" + a.decoder + "'");

        nlohmann::ordered_json j;
        j["block"] = off / size_t(spec.N);
        j["data"] = format_bits(out.data);
        j["failed"] = out.failed;
        j["reason"] = reason_name(out.reason);
        j["counters"] = {{"sort_events", out.counters.sort_events},
                         {"f_ops", out.counters.f_ops},
                         {"g_ops", out.counters.g_ops},
                         {"node_visits", out.counters.node_visits},
                         {"max_stack", out.counters.max_stack},
                         {"mean_stack", out.counters.mean_stack},
                         {"end_stack", out.counters.end_stack}};
        std::cout << j.dump() << "\n";
        any_failed = any_failed || out.failed;
    }
    return any_failed ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"polar / PAC coding toolkit (base-2 LLRs, Eb/N0 in dB unless --esn0)"};
    app.require_subcommand(1);
    uint64_t seed = default_seed();

    // encode
    auto* enc = app.add_subcommand("encode", "encode data bits through the full chain");
    std::string enc_spec, enc_data;
    bool enc_verbose = false;
    enc->add_option("--spec", enc_spec, "code spec file")->required();
    enc->add_option("--data", enc_data, "data bits ('1001') or hex ('0x9'); stdin if omitted");
    enc->add_flag("--verbose", enc_verbose, "also print the pre-transform vectors v and u");

    // decode
    auto* dec = app.add_subcommand("decode", "decode a file of channel LLRs (one per line)");
    DecodeArgs da;
    dec->add_option("--spec", da.spec_path, "code spec file")->required();
    dec->add_option("--profile", da.profile_path, "reliability profile file");
    dec->add_option("--decoder", da.decoder, "sc|scl|pscl|stack|pstack|pstackd");
    dec->add_option("--list", da.list_size, "list size for scl/pscl");
    dec->add_option("--m-t", da.m_T, "pruning threshold (phi for pscl, gamma for pstack)");
    dec->add_option("--schedule", da.schedule_path, "threshold schedule file (pstackd)");
    dec->add_option("--snr", da.snr_db, "operating SNR in dB for the schedule lookup");
    dec->add_option("--stack-cap", da.stack_cap, "abort guard for the stack size");
    dec->add_option("--llr", da.llr_path, "LLR file, '-' for stdin");

    // profile
    auto* prof = app.add_subcommand("profile", "estimate or compute a reliability profile");
    int prof_n = 0, prof_workers = 0;
    double prof_bec = -1.0, prof_snr = 0.0, prof_rate = 0.5;
    bool prof_esn0 = false, prof_have_snr = false;
    uint64_t prof_trials = 0;
    std::string prof_out = "-";
    prof->add_option("--n", prof_n, "code length (power of two)")->required();
    prof->add_option("--bec", prof_bec, "BEC erasure probability (closed form when --trials 0)");
    auto* prof_snr_opt = prof->add_option("--snr", prof_snr, "AWGN SNR in dB");
    prof->add_flag("--esn0", prof_esn0, "interpret --snr as Es/N0");
    prof->add_option("--rate", prof_rate, "code rate used by the Eb/N0 conversion");
    prof->add_option("--trials", prof_trials, "Monte-Carlo trials (0 = closed form, BEC only)");
    prof->add_option("--seed", seed, "RNG seed");
    prof->add_option("--workers", prof_workers, "thread count, 0 = all");
    prof->add_option("--out", prof_out, "output file, '-' for stdout");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run a frame-error experiment from a config file");
    std::string sim_config, sim_out;
    sim->add_option("--config", sim_config, "experiment config file")->required();
    sim->add_option("--out", sim_out, "output directory")->required();

    // threshold
    auto* thr = app.add_subcommand("threshold", "dispersion-based pruning threshold schedule");
    int thr_n = 0, thr_k = 0;
    std::string thr_snr, thr_out = "-";
    bool thr_esn0 = false;
    thr->add_option("--n", thr_n, "code length")->required();
    thr->add_option("--k", thr_k, "data length")->required();
    thr->add_option("--snr", thr_snr, "SNR list: '0,1.5' or '0:0.5:3.5'")->required();
    thr->add_flag("--esn0", thr_esn0, "interpret SNRs as Es/N0");
    thr->add_option("--out", thr_out, "output file, '-' for stdout");

    CLI11_PARSE(app, argc, argv);
    prof_have_snr = prof_snr_opt->count() > 0;

    try {
        if (*enc) {
            announce_seed(seed);
            CodeSpec spec = load_code_spec(enc_spec);
            if (!spec.materialized())
                throw std::invalid_argument("capacity-profile specs need a materialized info set");
            if (enc_data.empty()) {
                if (!std::getline(std::cin, enc_data))
                    throw std::invalid_argument("no data on stdin");
                while (!enc_data.empty() && (enc_data.back() == '\r' || enc_data.back() == ' '))
                    enc_data.pop_back();
            }
            Bits d = parse_bits(enc_data);
            if (int(d.size()) != spec.K)
                throw std::invalid_argument("data length does not match K");
            Bits v = insert_data(d, spec.info_set, spec.N);
            Bits u = conv_encode(v, spec.poly);
            Bits x = polar_transform(u);
            if (enc_verbose) {
                std::cout << "v=" << format_bits(v) << "\n";
                std::cout << "u=" << format_bits(u) << "\n";
            }
            std::cout << "x=" << format_bits(x) << "\n";
            return 0;
        }
        if (*dec) {
            announce_seed(seed);
            return run_decode(da);
        }
        if (*prof) {
            announce_seed(seed);
            ReliabilityProfile p;
            if (prof_bec >= 0.0 && prof_trials == 0) {
                p = bec_exact_profile(prof_n, prof_bec);
            } else {
                ChannelModel ch;
                if (prof_bec >= 0.0) {
                    ch.kind = ChannelKind::bec;
                    ch.epsilon = prof_bec;
                } else {
                    if (!prof_have_snr)
                        throw std::invalid_argument("profile needs --bec or --snr");
                    if (prof_trials == 0)
                        throw std::invalid_argument("AWGN profiles need --trials > 0");
                    ch.kind = ChannelKind::bi_awgn;
                    ch.snr_db = prof_snr;
                    ch.snr_is_es = prof_esn0;
                    ch.code_rate = prof_rate;
                }
                p = mc_profile(prof_n, ch, prof_trials, seed, prof_workers);
            }
            save_profile(prof_out, p);
            return 0;
        }
        if (*sim) {
            ExperimentConfig cfg = parse_experiment_config(sim_config);
            std::ifstream cf(sim_config);
            std::ostringstream ct;
            ct << cf.rdbuf();
            announce_seed(cfg.seed);
            SimReport rep = run_experiment(cfg);
            export_report(rep, cfg, ct.str(), sim_out);
            return 0;
        }
        if (*thr) {
            announce_seed(seed);
            std::vector<double> snrs = parse_point_list(thr_snr);
            if (snrs.empty()) throw std::invalid_argument("empty SNR list");
            ThresholdSchedule s;
            for (double v : snrs)
                s.entries.emplace_back(v, dynamic_threshold(thr_n, thr_k, v, thr_esn0));
            save_schedule(thr_out, s);
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
