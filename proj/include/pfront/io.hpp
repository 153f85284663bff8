#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pfront/fronts.hpp"
#include "pfront/studies.hpp"
#include "pfront/validate.hpp"

namespace pfront {

/// CSV assembly with RFC-style quoting; numeric cells use shortest
/// round-trip decimals so identical runs emit identical bytes.
std::string csv_escape(const std::string& cell);
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

std::string curve_csv(const SpeedCurve& curve);
struct EigenRow {
    double angle = 0.0, lambda_min = 0.0, c_lin = 0.0, mu0_residual = 0.0;
};
std::string eigen_csv(const std::vector<EigenRow>& rows);
std::string approx_csv(const ApproxTable& table);
std::string approx_summary_csv(const ApproxTable& table);
std::string trace_csv(const FrontTrace& trace);
std::string profile_csv(const WaveProfile& profile);
std::string residual_csv(const SupersolutionReport& report);

/// Standalone SVG documents (no external assets).
std::string polar_svg(const SpeedCurve& curve);
std::string line_svg(const std::vector<double>& x, const std::vector<double>& y,
                     const std::string& x_label, const std::string& y_label,
                     const std::string& title);

std::string spreading_json(const SpreadingReport& report);

/// Binary snapshot: magic line, JSON grid header line, raw little-endian
/// doubles.
void save_state(const std::string& path, const SimState& state);
SimState load_state(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::uint64_t file_fnv1a(const std::string& path);

/// Completed-run marker. Lists every output with a content hash; written
/// after all other files, so its presence implies the run finished.
struct RunManifest {
    std::string tool_version;
    std::string config_json;  // full resolved config
    std::map<std::string, std::string> input_hashes;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, content hash
    std::string started_at;   // ISO 8601 UTC; timestamps live only here
    std::string finished_at;

    void add_output(const std::string& path);  // hashes the file now
};

std::string iso8601_utc_now();
void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace pfront
