#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pacsim/reliability.hpp"
#include "pacsim/simulate.hpp"

using namespace pacsim;

namespace {

std::string tmp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    REQUIRE(bool(f));
    f << text;
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.code = make_rm_code(16, 8, ConvPoly::from_octal("321"));
    cfg.channel = ChannelKind::bi_awgn;
    cfg.grid = {2.0};
    cfg.decoder.kind = DecoderKind::scl;
    cfg.decoder.list_size = 2;
    cfg.stop.min_trials = 600;
    cfg.stop.max_trials = 600; // crosses one batch boundary
    cfg.stop.target_frame_errors = 1ull << 62;
    cfg.seed = 5;
    return cfg;
}

} // namespace

TEST_CASE("confidence interval behaves at the edges") {
    auto [lo0, hi0] = wilson_ci(0, 100);
    CHECK(lo0 == 0.0);
    CHECK(hi0 > 0.0);
    CHECK(hi0 < 0.05);
    CHECK(wilson_ci(0, 1000).second < hi0); // shrinks with more trials

    auto [lo1, hi1] = wilson_ci(1000, 1000);
    CHECK(hi1 == 1.0);
    CHECK(lo1 > 0.95);

    auto [lo, hi] = wilson_ci(13, 250);
    double fer = 13.0 / 250.0;
    CHECK(lo < fer);
    CHECK(hi > fer);
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
}

TEST_CASE("hash matches the reference fnv-1a vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("abc") == 0xe71fa2190541574bull);
}

TEST_CASE("the experiment is deterministic and worker-count independent") {
    ExperimentConfig cfg = small_config();
    cfg.workers = 1;
    SimReport r1 = run_experiment(cfg);
    cfg.workers = 4;
    SimReport r4 = run_experiment(cfg);
    cfg.workers = 16;
    SimReport r16 = run_experiment(cfg);
    SimReport rs = run_experiment_serial(cfg);

    std::string c1 = report_csv(r1);
    CHECK(c1 == report_csv(r4));
    CHECK(c1 == report_csv(r16));
    CHECK(c1 == report_csv(rs));

    SimReport again = run_experiment(cfg);
    CHECK(c1 == report_csv(again));

    cfg.seed = 6;
    CHECK(c1 != report_csv(run_experiment(cfg)));
}

TEST_CASE("a clean channel produces a zero-error row") {
    ExperimentConfig cfg = small_config();
    cfg.grid = {60.0};
    cfg.stop.min_trials = 100;
    cfg.stop.max_trials = 100;
    SimReport r = run_experiment(cfg);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].frame_errors == 0);
    CHECK(r.rows[0].fer == 0.0);
    CHECK(r.rows[0].ci_low == 0.0);
    CHECK(r.rows[0].trials == 100);
}

TEST_CASE("the stopping rule stops at batch boundaries") {
    ExperimentConfig cfg = small_config();
    cfg.grid = {-2.0}; // noisy enough to hit errors immediately
    cfg.stop.min_trials = 1;
    cfg.stop.max_trials = 100000;
    cfg.stop.target_frame_errors = 5;
    SimReport r = run_experiment(cfg);
    CHECK(r.rows[0].frame_errors >= 5);
    CHECK(r.rows[0].trials % 512 == 0); // full batches only
    CHECK(r.rows[0].fer == doctest::Approx(double(r.rows[0].frame_errors) /
                                           double(r.rows[0].trials)));
}

TEST_CASE("csv report has the fixed column layout") {
    ExperimentConfig cfg = small_config();
    cfg.grid = {1.0, 2.0};
    cfg.stop.min_trials = 512;
    cfg.stop.max_trials = 512;
    SimReport r = run_experiment(cfg);
    std::string csv = report_csv(r);

    std::istringstream ss(csv);
    std::string header;
    std::getline(ss, header);
    CHECK(header ==
          "point,trials,frame_errors,fer,mean_sort_events,mean_stack,mean_end_stack,"
          "max_stack,mean_f_ops,mean_g_ops,mean_node_visits,wilson_ci_low,wilson_ci_high");
    int rows = 0;
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 12);
    }
    CHECK(rows == 2);
}

TEST_CASE("json report round trips the rows") {
    ExperimentConfig cfg = small_config();
    cfg.stop.min_trials = 512;
    cfg.stop.max_trials = 512;
    SimReport r = run_experiment(cfg);
    nlohmann::json j = nlohmann::json::parse(report_json(r, cfg));
    REQUIRE(j["rows"].size() == r.rows.size());
    CHECK(j["decoder"] == "scl");
    CHECK(j["rows"][0]["trials"] == r.rows[0].trials);
    CHECK(j["rows"][0]["fer"] == r.rows[0].fer);
    CHECK(j["rows"][0]["mean_f_ops"] == r.rows[0].mean_f_ops);
}

TEST_CASE("export writes report files and a manifest with content hashes") {
    ExperimentConfig cfg = small_config();
    cfg.stop.min_trials = 512;
    cfg.stop.max_trials = 512;
    SimReport r = run_experiment(cfg);
    std::string dir = tmp_path("export_test");
    export_report(r, cfg, "config-text", dir);

    CHECK(std::filesystem::exists(dir + "/report.csv"));
    CHECK(std::filesystem::exists(dir + "/report.json"));
    std::ifstream mf(dir + "/run-manifest.txt");
    REQUIRE(bool(mf));
    std::ostringstream ss;
    ss << mf.rdbuf();
    CHECK(ss.str().find("config_fnv1a64=") != std::string::npos);
    CHECK(ss.str().find("seed=5") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("config files parse into a full experiment") {
    std::string spec_path = tmp_path("parse.code");
    write_file(spec_path, "N=16\nK=8\npoly_octal=321\nprofile=rm\n");
    std::string cfg_path = tmp_path("parse.ini");
    write_file(cfg_path,
               "# comment\n"
               "[code]\n"
               "spec_file = " + spec_path + "\n"
               "[channel]\n"
               "kind = bi_awgn\n"
               "snr_db = 0:0.5:1.5\n"
               "[decoder]\n"
               "kind = pscl\n"
               "list = 8\n"
               "m_T = -6\n"
               "[run]\n"
               "seed = 9\n"
               "min_trials = 64\n"
               "max_trials = 128\n"
               "target_frame_errors = 10\n"
               "workers = 2\n");
    ExperimentConfig cfg = parse_experiment_config(cfg_path);
    CHECK(cfg.code.N == 16);
    CHECK(cfg.code.K == 8);
    CHECK(cfg.grid == std::vector<double>{0.0, 0.5, 1.0, 1.5});
    CHECK(cfg.decoder.kind == DecoderKind::pscl);
    CHECK(cfg.decoder.list_size == 8);
    CHECK(cfg.decoder.m_T == -6.0);
    CHECK(cfg.seed == 9);
    CHECK(cfg.stop.max_trials == 128);
    CHECK(cfg.workers == 2);
    std::remove(spec_path.c_str());
    std::remove(cfg_path.c_str());
}

TEST_CASE("inline code sections and explicit info sets parse") {
    std::string cfg_path = tmp_path("parse2.ini");
    write_file(cfg_path,
               "[code]\n"
               "N = 8\n"
               "K = 4\n"
               "poly_octal = 321\n"
               "profile = explicit\n"
               "A = 4,6,7,8\n"
               "[channel]\n"
               "kind = bec\n"
               "epsilon = 0.5\n"
               "[decoder]\n"
               "kind = scl\n"
               "list = 2\n");
    ExperimentConfig cfg = parse_experiment_config(cfg_path);
    CHECK(cfg.code.info_set == std::vector<int>{4, 6, 7, 8});
    CHECK(cfg.channel == ChannelKind::bec);
    CHECK(cfg.grid == std::vector<double>{0.5});
    std::remove(cfg_path.c_str());
}

TEST_CASE("config parsing rejects malformed input") {
    std::string p = tmp_path("bad.ini");
    write_file(p, "[code]\nN 8\n");
    CHECK_THROWS_AS(parse_experiment_config(p), std::invalid_argument);
    write_file(p, "[code]\nN=16\nK=8\npoly_octal=321\n[channel]\nkind=warp\nsnr_db=1\n");
    CHECK_THROWS_AS(parse_experiment_config(p), std::invalid_argument);
    write_file(p, "[code]\nN=16\nK=8\npoly_octal=321\n[channel]\nkind=bi_awgn\n");
    CHECK_THROWS_AS(parse_experiment_config(p), std::invalid_argument); // empty grid
    std::remove(p.c_str());
}

TEST_CASE("stack experiments resolve profiles per grid point") {
    // two operating points, one profile file each, {snr} substitution
    ChannelModel ch20 = [] {
        ChannelModel c;
        c.snr_db = 2.0;
        c.code_rate = 0.5;
        return c;
    }();
    ChannelModel ch25 = ch20;
    ch25.snr_db = 2.5;
    save_profile(tmp_path("res_2.profile"), mc_profile(8, ch20, 20000, 3));
    save_profile(tmp_path("res_2.5.profile"), mc_profile(8, ch25, 20000, 3));

    ExperimentConfig cfg;
    cfg.code = make_rm_code(8, 4, ConvPoly::from_octal("321"));
    cfg.grid = {2.0, 2.5};
    cfg.decoder.kind = DecoderKind::stack;
    cfg.decoder.profile_path = (std::filesystem::temp_directory_path() / "res_{snr}.profile").string();
    cfg.stop.min_trials = 512;
    cfg.stop.max_trials = 512;
    cfg.stop.target_frame_errors = 1ull << 62;
    cfg.seed = 2;
    SimReport r = run_experiment(cfg);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].mean_node_visits >= 8.0);
    CHECK(r.rows[1].max_stack >= 5);

    // a missing profile must fail before any trial runs
    cfg.grid = {3.0};
    CHECK_THROWS(run_experiment(cfg));
    std::remove(tmp_path("res_2.profile").c_str());
    std::remove(tmp_path("res_2.5.profile").c_str());
}

TEST_CASE("profile length mismatches are rejected up front") {
    ChannelModel ch;
    ch.snr_db = 2.0;
    ch.code_rate = 0.5;
    save_profile(tmp_path("wrong_n.profile"), mc_profile(16, ch, 5000, 3));
    ExperimentConfig cfg;
    cfg.code = make_rm_code(8, 4, ConvPoly::from_octal("321"));
    cfg.grid = {2.0};
    cfg.decoder.kind = DecoderKind::stack;
    cfg.decoder.profile_path = tmp_path("wrong_n.profile");
    cfg.stop.min_trials = 1;
    cfg.stop.max_trials = 1;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    std::remove(tmp_path("wrong_n.profile").c_str());
}

TEST_CASE("genie statistics on the erasure channel match the closed form") {
    CodeSpec spec = make_rm_code(8, 4, ConvPoly::from_octal("321"));
    ChannelModel ch;
    ch.kind = ChannelKind::bec;
    ch.epsilon = 0.5;
    DriftReport dr = drift_experiment(spec, ch, 20000, 17);
    ReliabilityProfile exact = bec_exact_profile(8, 0.5);
    for (int i = 0; i < 8; ++i) {
        double se = dr.se_correct[size_t(i)];
        CHECK(std::fabs(dr.mean_correct[size_t(i)] - exact.capacity[size_t(i)]) <= 5.0 * se + 1e-9);
        CHECK(dr.mean_wrong[size_t(i)] <= 3.0 * dr.se_wrong[size_t(i)] + 1e-9);
    }
}

TEST_CASE("tail counts are monotone in the threshold and empty on the BEC") {
    CodeSpec spec = make_rm_code(8, 4, ConvPoly::from_octal("321"));
    ChannelModel bec;
    bec.kind = ChannelKind::bec;
    bec.epsilon = 0.5;
    auto counts = phi_tail_counts(spec, bec, 5000, 19, {-2.0, -5.0});
    for (auto& row : counts)
        for (uint64_t c : row) CHECK(c == 0);

    ChannelModel ch;
    ch.snr_db = 0.0;
    ch.code_rate = 0.5;
    auto ac = phi_tail_counts(spec, ch, 5000, 19, {-2.0, -10.0});
    for (auto& row : ac) CHECK(row[1] <= row[0]); // deeper tail is rarer
}
