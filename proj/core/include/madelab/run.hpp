#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "madelab/types.hpp"

namespace madelab::run {

// One flat configuration drives every preset; irrelevant fields are ignored
// by kinds that do not use them. Everything here is validated up front, with
// all violations reported together.
struct RunConfig {
    std::string kind; // linear-sweep | coherent-sweep | double-slit-sweep |
                      // bohm-linear-1d | bohm-linear-3d-spin | local-hj-demo

    // Physics.
    double mass = 1.0;
    double hbar = 1.0; // single-run hbar (trajectory presets)
    double sigma0 = 1.0;
    Vec zeta0 = vec0();
    Vec v0 = vec0();
    Vec force = vec0(); // K of the linear potential
    Vec x0 = vec0();    // coherent center
    double omega = 1.0;
    double separation = 2.0; // double slit
    int dim = 1;

    // Sweep definition (sweep kinds only).
    std::vector<double> hbars;

    // Budgets.
    double t_final = 1.0;
    double dt = 1e-3;
    int grid_points = 256;
    int snapshot_stride = 10;
    bool solver_path = true;

    // Ensemble.
    int n_samples = 2000;
    std::string velocity_mode = "standard"; // standard | spin-current

    // Outputs.
    std::uint64_t seed = 20250801;
    int threads = 1;
    std::string out_dir = "out";
};

// Collects every violated invariant; empty means the config is runnable.
std::vector<std::string> validate(const RunConfig& cfg);

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

struct PresetInfo {
    std::string name;
    std::string description;
};

// The six shipped presets.
std::vector<PresetInfo> list_presets();
RunConfig preset(const std::string& name);

struct RunResult {
    std::vector<std::string> files_written;
};

// Executes the configured run and writes field CSVs, trajectory CSVs, the
// structured report (JSON) and the manifest into cfg.out_dir. Data files are
// byte-deterministic for a fixed config and seed; wall-clock timings live
// only in the manifest.
RunResult execute(const RunConfig& cfg);

} // namespace madelab::run
