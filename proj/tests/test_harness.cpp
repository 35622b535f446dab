#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "beamcomb/harness.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

using namespace beamcomb;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.antennas = 32;
    cfg.beams = 8;
    cfg.rf_chains = {2, 4, 8};
    cfg.bits = {1};
    cfg.trials = 3;
    cfg.samples = 256;
    cfg.master_seed = 5;
    return cfg;
}

}  // namespace

TEST_CASE("config file parsing and overrides") {
    const std::string path = "/tmp/beamcomb_test_cfg.txt";
    {
        std::ofstream f(path);
        f << "# comment\n"
          << "antennas = 32\n"
          << "beams=8\n"
          << "rf_chains = 2,4\n"
          << "bits = 1,2\n"
          << "snr_db = 0, 10\n"
          << "schemes = none, sgbc\n"
          << "trials = 4\n"
          << "seed = 99\n"
          << "epsilon = 0.02\n";
    }
    const ExperimentConfig cfg = load_config(path);
    CHECK(cfg.antennas == 32);
    CHECK(cfg.beams == 8);
    CHECK(cfg.rf_chains == std::vector<int>{2, 4});
    CHECK(cfg.bits == std::vector<int>{1, 2});
    CHECK(cfg.snr_db == std::vector<double>{0.0, 10.0});
    REQUIRE(cfg.schemes.size() == 2);
    CHECK(cfg.schemes[0] == Scheme::none);
    CHECK(cfg.schemes[1] == Scheme::sgbc);
    CHECK(cfg.trials == 4);
    CHECK(cfg.master_seed == 99);
    CHECK(cfg.epsilon == doctest::Approx(0.02));
    std::remove(path.c_str());
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(load_config("/nonexistent/path.cfg"), ConfigError);
    ExperimentConfig cfg;
    CHECK_THROWS_AS(config_set(cfg, "nonsense_key", "1"), ConfigError);
    CHECK_THROWS_AS(config_set(cfg, "trials", "abc"), ConfigError);
    CHECK_THROWS_AS(config_set(cfg, "schemes", "magic"), ConfigError);
    cfg.rf_chains = {20};
    cfg.beams = 16;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    ExperimentConfig empty_schemes;
    empty_schemes.schemes.clear();
    CHECK_THROWS_AS(empty_schemes.validate(), ConfigError);
}

TEST_CASE("run_experiment none and optimal agree at K equal L") {
    ExperimentConfig cfg = small_config();
    cfg.schemes = {Scheme::none, Scheme::optimal};
    cfg.rf_chains = {8};  // K == L
    const std::vector<TrialRecord> rec = run_experiment(cfg);
    REQUIRE(rec.size() == 6);
    std::map<uint64_t, std::map<std::string, double>> by_trial;
    for (const TrialRecord& r : rec) by_trial[r.trial][r.scheme] = r.eta;
    for (auto& [t, m] : by_trial)
        CHECK(m.at("none") == doctest::Approx(m.at("optimal")).epsilon(1e-9));
}

TEST_CASE("run_experiment record invariants") {
    ExperimentConfig cfg = small_config();
    cfg.schemes = {Scheme::none, Scheme::sgbc, Scheme::bbbc, Scheme::optimal};
    const std::vector<TrialRecord> rec = run_experiment(cfg);
    // cardinality: 3 trials x (none 3K + optimal 3K + sgbc 3K + bbbc 3K) with 1 bit setting
    CHECK(rec.size() == 3u * 4u * 3u);
    for (const TrialRecord& r : rec) {
        CHECK_FALSE(r.failed);
        CHECK(r.eta >= 0.0);
        CHECK(r.eta <= 1.0 + 1e-9);
        CHECK(r.eta_opt >= r.eta - 1e-9);
        CHECK(r.M == 32);
        CHECK(r.L == 8);
    }
    // sweep monotonicity in K for a fixed trial and scheme
    std::map<std::pair<uint64_t, std::string>, double> last_eta;
    std::map<std::pair<uint64_t, std::string>, int> last_k;
    for (const TrialRecord& r : rec) {
        const auto key = std::make_pair(r.trial, r.scheme);
        if (last_k.count(key)) {
            CHECK(r.K >= last_k[key]);
            CHECK(r.eta >= last_eta[key] - 1e-9);
        }
        last_k[key] = r.K;
        last_eta[key] = r.eta;
    }
}

TEST_CASE("run_experiment determinism") {
    const ExperimentConfig cfg = small_config();
    const std::vector<TrialRecord> a = run_experiment(cfg);
    const std::vector<TrialRecord> b = run_experiment(cfg);
    REQUIRE(a.size() == b.size());
    CHECK(render_csv(a) == render_csv(b));
}

TEST_CASE("run_experiment per-trial error isolation") {
    ExperimentConfig cfg = small_config();
    cfg.beams = 8;
    cfg.bits = {4};  // exhaustive guard: 4*(8-1) = 28 > 24
    cfg.schemes = {Scheme::none, Scheme::exhaustive};
    const std::vector<TrialRecord> rec = run_experiment(cfg);
    int failed = 0, fine = 0;
    for (const TrialRecord& r : rec) {
        if (r.scheme == "exhaustive") {
            CHECK(r.failed);
            CHECK_FALSE(r.error.empty());
            ++failed;
        } else {
            CHECK_FALSE(r.failed);
            ++fine;
        }
    }
    CHECK(failed == 9);
    CHECK(fine == 9);
}

TEST_CASE("record ordering is trial, scheme, sweep order") {
    ExperimentConfig cfg = small_config();
    cfg.schemes = {Scheme::sgbc, Scheme::none, Scheme::optimal};  // deliberately unsorted
    const std::vector<TrialRecord> rec = run_experiment(cfg);
    for (size_t i = 1; i < rec.size(); ++i) {
        const TrialRecord& p = rec[i - 1];
        const TrialRecord& c = rec[i];
        const bool ordered = p.trial < c.trial ||
                             (p.trial == c.trial && p.scheme < c.scheme) ||
                             (p.trial == c.trial && p.scheme == c.scheme &&
                              p.sweep_order < c.sweep_order);
        CHECK(ordered);
    }
}

TEST_CASE("emit_report CSV shape and determinism") {
    TrialRecord r;
    r.trial = 0;
    r.seed = 42;
    r.scheme = "none";
    r.M = 8;
    r.L = 4;
    r.K = 2;
    r.B = 0;
    r.snr_db = 0.0;
    r.eta = 0.25;
    r.eta_opt = 0.5;
    const std::string csv = render_csv({r});
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "trial,seed,scheme,M,L,K,B,snr_db,eta,eta_opt,nodes,ms");
    std::getline(is, line);
    CHECK(line == "0,42,none,8,4,2,0,0,0.25,0.5,0,0");
    CHECK_FALSE(std::getline(is, line));

    CHECK_THROWS_AS(emit_report({}, "/tmp/x.csv", ReportFormat::csv), InputError);
    CHECK_THROWS_AS(emit_report({r}, "/nonexistent_dir/x.csv", ReportFormat::csv), IoError);

    const std::string path = "/tmp/beamcomb_report_test.csv";
    emit_report({r}, path, ReportFormat::csv);
    std::ifstream f(path);
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str() == csv);
    std::remove(path.c_str());
}

TEST_CASE("emit_report JSON mirrors the fields") {
    TrialRecord r;
    r.scheme = "sgbc";
    r.eta = 0.5;
    r.eta_opt = 0.75;
    const std::string js = render_json({r});
    CHECK(js.find("\"scheme\": \"sgbc\"") != std::string::npos);
    CHECK(js.find("\"eta\": 0.5") != std::string::npos);
    CHECK(js.find("\"eta_opt\": 0.75") != std::string::npos);
}

TEST_CASE("selftest passes on a fresh build") {
    std::ostringstream os;
    const SelftestResult res = selftest(os);
    CHECK(res.ok());
    CHECK(res.passed >= 5);
    CHECK(os.str().find("[FAIL]") == std::string::npos);
}

TEST_CASE("selftest fails loudly with a corrupted tolerance") {
    std::ostringstream os;
    const SelftestResult res = selftest(os, 1e-8);  // tighten every tolerance absurdly
    CHECK_FALSE(res.ok());
    CHECK_FALSE(res.failed.empty());
    CHECK(os.str().find("[FAIL]") != std::string::npos);
}
