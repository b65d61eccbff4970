#pragma once

#include <string>

#include "isopyc/grid.hpp"
#include "isopyc/params.hpp"
#include "isopyc/profile.hpp"

namespace isopyc {

/// Run configuration: a flat typed key-value text format with dotted section
/// keys (grid.Nx=64). Unknown keys are rejected; parse/serialize round trips
/// are lossless.
struct RunConfig {
    Grid grid;
    SimParams params;

    // profile block
    std::string profile_name = "exp"; ///< exp | linear | tanh-pycnocline | boussinesq | csv
    double profile_rho0 = 1.0;
    double profile_rate = 1.0;
    double profile_slope = 1.0;
    double profile_drho = 0.5;
    double profile_center = 0.5;
    double profile_width = 0.1;
    double profile_n2 = 1.0;
    std::string profile_csv;
    std::string vbar_kind = "zero"; ///< zero | linear | cos
    double vbar_amplitude = 0.0;

    // init block
    std::string init_kind = "equilibrium"; ///< equilibrium | single_mode | random
    double init_amplitude = 0.01;
    int init_k = 1;
    int init_n = 1;
    unsigned init_seed = 1;

    // output block
    std::string output_dir = "out";
    double snapshot_every = 0.0; ///< 0 = final snapshot only
    double series_every = 0.0;   ///< 0 = every step

    // verify block
    std::string verify_suites = "all";
    double verify_tol_scale = 1.0;

    int threads = 1;

    static RunConfig parse(const std::string& text);
    static RunConfig parse_file(const std::string& path);
    std::string to_text() const;
    bool operator==(const RunConfig&) const = default;

    StratificationProfile build_profile_from_config() const;
};

} // namespace isopyc
