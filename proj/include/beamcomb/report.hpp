#ifndef BEAMCOMB_REPORT_HPP
#define BEAMCOMB_REPORT_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "beamcomb/core.hpp"

namespace beamcomb {

// One (trial, scheme, sweep-point) result.
struct TrialRecord {
    uint64_t trial = 0;
    uint64_t seed = 0;
    std::string scheme;
    int M = 0;
    int L = 0;
    int K = 0;
    int B = 0;
    double snr_db = 0.0;
    double eta = 0.0;
    double eta_opt = 0.0;
    uint64_t nodes = 0;
    uint64_t ms = 0;
    bool failed = false;
    std::string error;
    // order keys, used only for deterministic emission
    int sweep_order = 0;
};

namespace detail {

inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

}  // namespace detail

enum class ReportFormat { csv, json };

inline std::string render_csv(const std::vector<TrialRecord>& records) {
    std::string out = "trial,seed,scheme,M,L,K,B,snr_db,eta,eta_opt,nodes,ms\n";
    for (const TrialRecord& r : records) {
        out += std::to_string(r.trial);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += r.scheme;
        out += ',';
        out += std::to_string(r.M);
        out += ',';
        out += std::to_string(r.L);
        out += ',';
        out += std::to_string(r.K);
        out += ',';
        out += std::to_string(r.B);
        out += ',';
        out += detail::fmt_double(r.snr_db);
        out += ',';
        out += r.failed ? "nan" : detail::fmt_double(r.eta);
        out += ',';
        out += detail::fmt_double(r.eta_opt);
        out += ',';
        out += std::to_string(r.nodes);
        out += ',';
        out += std::to_string(r.ms);
        out += '\n';
    }
    return out;
}

inline std::string render_json(const std::vector<TrialRecord>& records) {
    std::string out = "[\n";
    for (size_t i = 0; i < records.size(); ++i) {
        const TrialRecord& r = records[i];
        out += "  {\"trial\": " + std::to_string(r.trial);
        out += ", \"seed\": " + std::to_string(r.seed);
        out += ", \"scheme\": \"" + r.scheme + "\"";
        out += ", \"M\": " + std::to_string(r.M);
        out += ", \"L\": " + std::to_string(r.L);
        out += ", \"K\": " + std::to_string(r.K);
        out += ", \"B\": " + std::to_string(r.B);
        out += ", \"snr_db\": " + detail::fmt_double(r.snr_db);
        out += ", \"eta\": " + std::string(r.failed ? "null" : detail::fmt_double(r.eta));
        out += ", \"eta_opt\": " + detail::fmt_double(r.eta_opt);
        out += ", \"nodes\": " + std::to_string(r.nodes);
        out += ", \"ms\": " + std::to_string(r.ms);
        if (r.failed) out += ", \"error\": \"" + r.error + "\"";
        out += "}";
        if (i + 1 < records.size()) out += ",";
        out += "\n";
    }
    out += "]\n";
    return out;
}

// Write records to `path` ("-" for stdout handled by the CLI). Rows are
// already ordered by (trial, scheme, sweep order) in run_experiment.
inline void emit_report(const std::vector<TrialRecord>& records, const std::string& path,
                        ReportFormat format) {
    if (records.empty()) throw InputError("emit_report: no records");
    const std::string body = format == ReportFormat::csv ? render_csv(records) : render_json(records);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("emit_report: cannot open '" + path + "' for writing");
    f << body;
    if (!f) throw IoError("emit_report: write to '" + path + "' failed");
}

}  // namespace beamcomb

#endif
