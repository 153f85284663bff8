#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pfront/fronts.hpp"
#include "pfront/studies.hpp"
#include "pfront/validate.hpp"

namespace pfront {

/// JSON config parsing. Every schema violation throws config_error naming
/// the offending dotted key path.

nlohmann::json load_config_file(const std::string& path);

/// Top-level key lookup with a naming error message.
const nlohmann::json& require_root(const nlohmann::json& root, const std::string& key);

PeriodicCell parse_cell(const nlohmann::json& j, const std::string& keypath);
PeriodicMedium parse_medium(const nlohmann::json& j, const std::string& keypath = "medium");
Nonlinearity parse_nonlinearity(const nlohmann::json& j, const PeriodicCell& cell,
                                const std::string& keypath = "nonlinearity");
std::vector<Direction> parse_directions(const nlohmann::json& root, int dim);

struct EigenBlock {
    std::array<std::size_t, 2> resolution{64, 64};
    double lambda_lo = 1e-3;
    double lambda_hi = 20.0;
};
EigenBlock parse_eigen_block(const nlohmann::json& root);

SpeedRunConfig parse_run_block(const nlohmann::json& root);

struct ScanBlock {
    std::size_t n_samples = 16;
    SpeedMethod method = SpeedMethod::eigen_lin;
    double eps = 0.0;
};
ScanBlock parse_scan_block(const nlohmann::json& root);

struct ApproxBlock {
    std::vector<double> eps_list;
    std::size_t n_samples = 8;
};
ApproxBlock parse_approx_block(const nlohmann::json& root);

struct SpreadingBlock {
    bool present = false;
    SpreadingParams params;
    std::size_t n_samples = 8;
    std::vector<double> c_ref;  // empty: compute eigen_lin references
};
SpreadingBlock parse_spreading_block(const nlohmann::json& root);

struct SupersolutionBlock {
    bool present = false;
    double lambda = 0.0;  // 0: use choose_lambda
    int n_samples = 16;
    std::array<double, 2> grid_lo{-10.0, -10.0};
    std::array<double, 2> grid_hi{30.0, 30.0};
    double grid_h = 0.5;
    TimeWindow window;
};
SupersolutionBlock parse_supersolution_block(const nlohmann::json& root);

struct ProfileBlock {
    double snapshot_dt = 0.05;
    double transient_cut = 0.5;
};
ProfileBlock parse_profile_block(const nlohmann::json& root);

}  // namespace pfront
