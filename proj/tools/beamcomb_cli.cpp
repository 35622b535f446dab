// Command-line front end: Monte Carlo simulation sweeps, single-matrix
// solves, and the embedded self-check suite.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "beamcomb/beamcomb.hpp"

namespace {

using namespace beamcomb;

// "a+bi" / "a-bi" / "a" / "bi", no spaces inside a token.
cx parse_complex(const std::string& tok) {
    const char* s = tok.c_str();
    char* end = nullptr;
    double first = std::strtod(s, &end);
    if (end == s) throw IoError("bad complex entry '" + tok + "'");
    if (*end == '\0') return cx(first, 0.0);
    if (*end == 'i' || *end == 'j') {
        if (end[1] != '\0') throw IoError("bad complex entry '" + tok + "'");
        return cx(0.0, first);
    }
    const char* s2 = end;
    double second = std::strtod(s2, &end);
    if (end == s2 || (*end != 'i' && *end != 'j') || end[1] != '\0')
        throw IoError("bad complex entry '" + tok + "'");
    return cx(first, second);
}

// First line: N. Then N*N entries in row-major order, whitespace separated.
CMat read_ccm_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open matrix file '" + path + "'");
    int n = 0;
    if (!(f >> n) || n < 1) throw IoError(path + ": expected matrix dimension on the first line");
    CMat m(n, n);
    std::string tok;
    for (int i = 0; i < n * n; ++i) {
        if (!(f >> tok)) throw IoError(path + ": expected " + std::to_string(n * n) + " entries");
        m.a[static_cast<size_t>(i)] = parse_complex(tok);
    }
    return m;
}

int run_simulate(const ExperimentConfig& cfg, const std::string& out_path,
                 const std::string& format) {
    const ReportFormat fmt = format == "json" ? ReportFormat::json : ReportFormat::csv;
    const std::vector<TrialRecord> records = run_experiment(cfg);
    if (out_path.empty()) {
        std::cout << (fmt == ReportFormat::csv ? render_csv(records) : render_json(records));
    } else {
        emit_report(records, out_path, fmt);
        std::cerr << records.size() << " records written to " << out_path << "\n";
    }
    return 0;
}

int run_solve(const std::string& matrix_path, const std::string& scheme_str, int K, int bits,
              double epsilon, uint64_t node_budget) {
    Ccm R;
    R.matrix = hermitian_part(read_ccm_file(matrix_path));
    const PhaseAlphabet alphabet = PhaseAlphabet::make(bits);
    const Scheme scheme = scheme_from_name(scheme_str);
    CombinerMatrix comb;
    double eta = 0.0;
    const double tr = trace(R.matrix).real();
    if (scheme == Scheme::sgbc) {
        auto [c, rep] = sg_bc(R, K, alphabet);
        comb = c;
        eta = rep.final_efficiency;
    } else if (scheme == Scheme::bbbc) {
        auto [c, rep] = bb_bc(R, K, alphabet, epsilon, node_budget);
        comb = c;
        eta = rep.final_efficiency;
    } else if (scheme == Scheme::exhaustive) {
        comb = exhaustive(R, K, alphabet);
        eta = tr > 0.0 ? efficiency(comb.columns, R, tr) : 0.0;
    } else {
        throw ConfigError("solve supports schemes sgbc, bbbc, exhaustive");
    }
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < R.matrix.rows; ++i) {
            if (i) std::cout << ' ';
            std::cout << comb.indices[static_cast<size_t>(k)][static_cast<size_t>(i)];
        }
        std::cout << '\n';
    }
    std::printf("eta %.12g\n", eta);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete beam-combination simulator"};
    app.require_subcommand(1);

    using namespace beamcomb;
    ExperimentConfig cfg;
    std::string config_path, out_path, format = "csv", schemes_str, matrix_path;
    std::string rf_str, bits_str, snr_str, solve_scheme = "bbbc";
    int solve_k = 1, solve_bits = 1;
    bool timing = false;

    auto add_sim_flags = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--seed", cfg.master_seed, "master RNG seed");
        sub->add_option("--out", out_path, "output path (default: stdout)");
        sub->add_option("--format", format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--scheme", schemes_str, "comma-separated scheme list");
        sub->add_option("--bits", bits_str, "phase resolution list, e.g. 1,2,3");
        sub->add_option("--rf-chains", rf_str, "RF-chain count list");
        sub->add_option("--beams", cfg.beams, "selected beam count L");
        sub->add_option("--antennas", cfg.antennas, "array size M");
        sub->add_option("--users", cfg.users, "number of users");
        sub->add_option("--trials", cfg.trials, "Monte Carlo trials");
        sub->add_option("--samples", cfg.samples, "time-frequency samples per CCM");
        sub->add_option("--snr-db", snr_str, "SNR sweep list in dB");
        sub->add_option("--epsilon", cfg.epsilon, "branch-and-bound relative gap");
        sub->add_option("--node-budget", cfg.node_budget, "branch-and-bound node cap");
        sub->add_flag("--timing", timing, "record wall-clock ms (breaks reproducibility)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment");
    add_sim_flags(simulate);
    CLI::App* sweep = app.add_subcommand("sweep", "alias of simulate");
    add_sim_flags(sweep);

    CLI::App* solve = app.add_subcommand("solve", "solve one CCM read from a file");
    solve->add_option("matrix", matrix_path, "text CCM file: N then N*N a+bi entries")->required();
    solve->add_option("--scheme", solve_scheme, "sgbc, bbbc, or exhaustive");
    solve->add_option("--rf-chains", solve_k, "number of combiner columns");
    solve->add_option("--bits", solve_bits, "phase resolution");
    solve->add_option("--epsilon", cfg.epsilon, "branch-and-bound relative gap");
    solve->add_option("--node-budget", cfg.node_budget, "branch-and-bound node cap");

    CLI::App* selftest_cmd = app.add_subcommand("selftest", "run the embedded checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (selftest_cmd->parsed()) {
            return beamcomb::selftest(std::cout).ok() ? 0 : 3;
        }
        if (solve->parsed()) {
            return run_solve(matrix_path, solve_scheme, solve_k, solve_bits, cfg.epsilon,
                             cfg.node_budget);
        }
        // simulate / sweep: config file first, then CLI overrides on top.
        if (!config_path.empty()) {
            ExperimentConfig file_cfg = load_config(config_path);
            // CLI defaults were parsed into `cfg`; propagate only options the
            // user actually set.
            CLI::App* sub = simulate->parsed() ? simulate : sweep;
            auto touched = [&](const std::string& name) {
                return sub->count(name) > 0;
            };
            if (touched("--seed")) file_cfg.master_seed = cfg.master_seed;
            if (touched("--beams")) file_cfg.beams = cfg.beams;
            if (touched("--antennas")) file_cfg.antennas = cfg.antennas;
            if (touched("--users")) file_cfg.users = cfg.users;
            if (touched("--trials")) file_cfg.trials = cfg.trials;
            if (touched("--samples")) file_cfg.samples = cfg.samples;
            if (touched("--epsilon")) file_cfg.epsilon = cfg.epsilon;
            if (touched("--node-budget")) file_cfg.node_budget = cfg.node_budget;
            cfg = file_cfg;
        }
        if (!schemes_str.empty()) config_set(cfg, "schemes", schemes_str);
        if (!bits_str.empty()) config_set(cfg, "bits", bits_str);
        if (!rf_str.empty()) config_set(cfg, "rf_chains", rf_str);
        if (!snr_str.empty()) config_set(cfg, "snr_db", snr_str);
        if (timing) cfg.record_timing = true;
        cfg.validate();
        return run_simulate(cfg, out_path, format);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
