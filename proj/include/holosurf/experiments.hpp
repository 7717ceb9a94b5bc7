// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <armadillo>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace holosurf {

inline constexpr const char* artifact_version = "0.1.0";

enum class Experiment {
    CouplingSweep,
    GainVsSpacing,
    GainVsDirection,
    PatternCut,
    GainVsAperture,
    CsiErrorMc,
};

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);

// Flat key-value sweep configuration shared by every experiment; each run
// reads the keys it needs and ignores the rest. Unset list fields take
// experiment-specific defaults at run time.
struct SweepConfig {
    Experiment experiment = Experiment::CouplingSweep;

    std::string pattern = "iso";           // iso | dir3gpp | dipole
    std::optional<double> dipole_length;   // wavelengths; unset => bound to d (0.5 in sweeps)
    double gamma = 1e-12;                  // eigenvalue retention threshold
    int quad_polar = 256;
    int quad_azimuth = 512;
    std::string out = "-";                 // output path, '-' = stdout

    // coupling sweep
    std::string axis = "y";                // y | z | grid
    double sweep_max = 2.0;                // wavelengths
    std::optional<double> sweep_step;      // default 0.01 (axis) / 0.05 (grid)
    std::optional<double> d;               // single spacing, used for matrix export
    std::optional<std::string> export_c;   // CSV path for the coupling matrix
    std::optional<std::string> export_a;   // CSV path for the transfer matrix

    // surface experiments
    double aperture = 2.0;                 // key L, URA side length
    std::vector<double> d_list;            // spacings; empty => per-experiment default
    std::vector<double> aperture_list;     // key L_list; empty => {1, 2, 3, 4}
    std::string target = "normal";         // normal | endfire
    std::string targets = "normal,endfire";
    std::string patterns = "iso,dir3gpp,dipole";
    std::string kinds = "conv,opt";
    std::string cut = "horizontal";        // horizontal | vertical
    double angle_step_deg = 1.0;
    double cut_step_deg = 0.02;

    // Monte Carlo
    int trials = 10000;
    std::vector<double> sigma_list;        // angle-error std deviations, degrees
    std::optional<std::uint64_t> seed;     // mandatory for csi-mc

    bool operator==(const SweepConfig&) const = default;
};

// Parse `key = value` lines; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Build a config from parsed keys. Unknown keys and malformed values throw
// std::invalid_argument. Round-trips with emit_config.
SweepConfig config_from_map(Experiment e, const std::map<std::string, std::string>& kv);

// Canonical flat text form of a config; parse(emit(cfg)) == cfg.
std::string emit_config(const SweepConfig& cfg);

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;  // emitted as '# key = value'

    std::string to_csv() const;
};

ResultTable run_coupling_sweep(const SweepConfig& cfg);
ResultTable run_gain_vs_spacing(const SweepConfig& cfg);
ResultTable run_gain_vs_direction(const SweepConfig& cfg);
ResultTable run_pattern_cut(const SweepConfig& cfg);
ResultTable run_gain_vs_aperture(const SweepConfig& cfg);
ResultTable run_csi_error_mc(const SweepConfig& cfg);
ResultTable run_experiment(const SweepConfig& cfg);  // dispatches on cfg.experiment

// Write table (or matrix as row-major "re,im" pairs) to path; '-' = stdout.
void write_result(const ResultTable& table, const std::string& path);
void write_complex_matrix_csv(const arma::cx_mat& m, const std::string& path);

}  // namespace holosurf
