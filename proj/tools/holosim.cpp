// SPDX-License-Identifier: Apache-2.0
//
// holosim: command-line front end for the holosurf library.  Each subcommand
// maps to one sweep operation; every config key is also exposed as a
// string-valued option so runs are reproducible from either a config file,
// flags, or a mix (flags win).

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "holosurf/experiments.hpp"

namespace {

struct KeyDoc {
    const char* key;
    const char* help;
};

const std::vector<KeyDoc>& key_docs() {
    static const std::vector<KeyDoc> docs = {
        {"pattern", "element pattern: iso | dir3gpp | dipole (default iso)"},
        {"dipole_length", "dipole length in wavelengths (default: grid pitch; 0.5 in coupling sweeps)"},
        {"gamma", "eigenvalue retention threshold (default 1e-12)"},
        {"quad_polar", "polar quadrature nodes (default 256)"},
        {"quad_azimuth", "azimuth quadrature nodes (default 512)"},
        {"out", "output path, or - for stdout (default -)"},
        {"axis", "coupling sweep axis: y | z | grid (default y)"},
        {"sweep_max", "maximum displacement in wavelengths (default 2)"},
        {"sweep_step", "displacement step (default 0.01 line, 0.05 grid)"},
        {"d", "grid pitch in wavelengths (enables matrix export in 'coupling')"},
        {"export_c", "write the coupling matrix as CSV to this path"},
        {"export_a", "write the transfer matrix as CSV to this path"},
        {"L", "square aperture side in wavelengths (default 2)"},
        {"d_list", "comma-separated grid pitches (per-experiment default)"},
        {"L_list", "comma-separated aperture sides (default 1,2,3,4)"},
        {"target", "design direction: normal | endfire (default normal)"},
        {"targets", "comma-separated design directions (default normal,endfire)"},
        {"patterns", "comma-separated element patterns (default iso,dir3gpp,dipole)"},
        {"kinds", "beamformer kinds, comma-separated from conv,opt (default conv,opt)"},
        {"cut", "cut plane: horizontal | vertical (default horizontal)"},
        {"angle_step_deg", "gain sweep angular step in degrees (default 1)"},
        {"cut_step_deg", "pattern cut angular step in degrees (default 0.02)"},
        {"trials", "Monte Carlo trials per cell (default 10000)"},
        {"sigma_list", "angular error std devs in degrees (default 0,2,4,6,10)"},
        {"seed", "RNG seed, required for csi-mc"},
    };
    return docs;
}

struct SubState {
    holosurf::Experiment experiment;
    std::string config_path;
    std::map<std::string, std::string> overrides;
};

int run_one(const SubState& st) {
    std::map<std::string, std::string> kv;
    if (!st.config_path.empty()) kv = holosurf::parse_config_file(st.config_path);
    for (const auto& [k, v] : st.overrides) kv[k] = v;

    const holosurf::SweepConfig cfg = holosurf::config_from_map(st.experiment, kv);

    const auto start = std::chrono::steady_clock::now();
    holosurf::ResultTable table = holosurf::run_experiment(cfg);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    for (const auto& [k, v] : table.metadata)
        if (k.rfind("warning", 0) == 0) std::cerr << "warning: " << v << "\n";

    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", elapsed.count());
    table.metadata.emplace_back("walltime_s", buf);

    holosurf::write_result(table, cfg.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"holosim: beamforming simulator for holographic antenna surfaces\n"
                 "with element mutual coupling"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> subs = {
        {"coupling", "Sweep the spatial coupling coefficient; optionally export C and A matrices"},
        {"gain-spacing", "Beamforming gain versus grid pitch at a fixed aperture"},
        {"gain-direction", "Gain when designing toward each direction of a principal cut"},
        {"pattern-cut", "Beam pattern cut for fixed beamformers, with beamwidth summaries"},
        {"aperture", "Dense-grid versus half-wavelength optimal gain across apertures"},
        {"csi-mc", "Monte Carlo mean gain under Gaussian direction-estimate errors"},
    };
    const std::vector<std::string> footers = {
        "Output columns (axis=y|z): displacement, re_c, im_c\n"
        "Output columns (axis=grid): t_y, t_z, re_c, im_c",
        "Output columns: d_over_lambda, n_elements, gain_conv_db, gain_opt_db, retained_count",
        "Output columns: angle_deg, then gain_conv_db_d<pitch>, gain_opt_db_d<pitch> per pitch",
        "Output columns: phi_deg (or theta_deg), then r_db_<kind>_d<pitch> per pitch and kind;\n"
        "zero-to-zero beamwidths appear as '# beamwidth_deg.<column>' metadata",
        "Output columns: L_over_lambda, target_id, pattern_id, gain_opt_db_d<coarse>,\n"
        "gain_opt_db_d<fine>, delta_db (id maps are in the metadata)",
        "Output columns: sigma_deg, then mean_gain_db_<kind>_d<pitch> per pitch and kind;\n"
        "means are taken on the linear gain scale, then converted to dB",
    };

    std::vector<std::shared_ptr<SubState>> states;
    for (std::size_t i = 0; i < subs.size(); ++i) {
        CLI::App* sub = app.add_subcommand(subs[i].first, subs[i].second);
        auto st = std::make_shared<SubState>();
        st->experiment = holosurf::experiment_from_string(subs[i].first);
        sub->add_option("--config", st->config_path, "config file of 'key = value' lines");
        for (const auto& doc : key_docs()) {
            const std::string key = doc.key;
            sub->add_option(
                "--" + key,
                [st, key](const CLI::results_t& res) {
                    st->overrides[key] = res.at(0);
                    return true;
                },
                doc.help);
        }
        sub->footer(footers[i]);
        states.push_back(st);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (app.get_subcommand(subs[i].first)->parsed()) return run_one(*states[i]);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
