// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "holosurf/coupling.hpp"
#include "holosurf/experiments.hpp"

using namespace holosurf;

namespace {

SweepConfig fast_quad(SweepConfig cfg) {
    cfg.quad_polar = 48;
    cfg.quad_azimuth = 96;
    return cfg;
}

double find_value(const ResultTable& t, const std::string& column, std::size_t row) {
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        if (t.columns[c] == column) return t.rows.at(row).at(c);
    throw std::runtime_error("missing column " + column);
}

const std::string* find_meta(const ResultTable& t, const std::string& key) {
    for (const auto& [k, v] : t.metadata)
        if (k == key) return &v;
    return nullptr;
}

}  // namespace

TEST_CASE("experiment names round-trip") {
    for (Experiment e : {Experiment::CouplingSweep, Experiment::GainVsSpacing,
                         Experiment::GainVsDirection, Experiment::PatternCut,
                         Experiment::GainVsAperture, Experiment::CsiErrorMc}) {
        CHECK(experiment_from_string(to_string(e)) == e);
    }
    CHECK_THROWS_AS(experiment_from_string("nope"), std::invalid_argument);
}

TEST_CASE("config emit and parse round-trip exactly") {
    SweepConfig cfg;
    cfg.experiment = Experiment::CsiErrorMc;
    cfg.pattern = "dipole";
    cfg.dipole_length = 2.0 / 30.0;  // needs all 17 digits to survive
    cfg.gamma = 3.5e-9;
    cfg.quad_polar = 48;
    cfg.quad_azimuth = 100;
    cfg.out = "/tmp/some.csv";
    cfg.axis = "grid";
    cfg.sweep_max = 1.75;
    cfg.sweep_step = 0.035;
    cfg.d = 0.125;
    cfg.export_c = "c.csv";
    cfg.aperture = 2.5;
    cfg.d_list = {0.5, 1.0 / 3.0};
    cfg.aperture_list = {1.0, 2.0};
    cfg.target = "endfire";
    cfg.kinds = "opt";
    cfg.cut = "vertical";
    cfg.angle_step_deg = 0.5;
    cfg.trials = 321;
    cfg.sigma_list = {0.0, 2.5};
    cfg.seed = 987654321098765ull;

    const SweepConfig back = config_from_map(cfg.experiment, parse_config_text(emit_config(cfg)));
    CHECK(back == cfg);

    // A default config round-trips too (empty optionals stay empty).
    SweepConfig plain;
    plain.experiment = Experiment::CouplingSweep;
    const SweepConfig back2 =
        config_from_map(plain.experiment, parse_config_text(emit_config(plain)));
    CHECK(back2 == plain);
    CHECK_FALSE(back2.sweep_step.has_value());
    CHECK_FALSE(back2.seed.has_value());
}

TEST_CASE("config text parsing oddities") {
    const auto kv = parse_config_text("# full comment\n\n  pattern = dipole  # trailing\n"
                                      "gamma=1e-10\n");
    CHECK(kv.at("pattern") == "dipole");
    CHECK(kv.at("gamma") == "1e-10");
    CHECK(kv.size() == 2);
    CHECK_THROWS_AS(parse_config_text("not a pair\n"), std::invalid_argument);
}

TEST_CASE("config validation rejects bad values") {
    const Experiment e = Experiment::GainVsSpacing;
    CHECK_THROWS_AS(config_from_map(e, {{"bogus", "1"}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_map(e, {{"pattern", "isotropic"}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_map(e, {{"gamma", "-1"}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_map(e, {{"gamma", "abc"}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_map(e, {{"trials", "0"}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_map(e, {{"axis", "x"}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_map(e, {{"kinds", "conv,fast"}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_map(e, {{"d_list", "0.5,-0.1"}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_map(e, {{"experiment", "coupling"}}), std::invalid_argument);
    CHECK_NOTHROW(config_from_map(e, {{"experiment", "gain-spacing"}}));
}

TEST_CASE("isotropic coupling sweep emits the closed form") {
    SweepConfig cfg;
    cfg.experiment = Experiment::CouplingSweep;
    cfg.sweep_max = 1.0;
    cfg.sweep_step = 0.25;
    const ResultTable t = run_coupling_sweep(cfg);
    REQUIRE(t.columns == std::vector<std::string>{"displacement", "re_c", "im_c"});
    REQUIRE(t.rows.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        const double disp = 0.25 * static_cast<double>(i);
        CHECK(t.rows[i][0] == doctest::Approx(disp));
        CHECK(t.rows[i][1] == doctest::Approx(sinc(2.0 * disp)).epsilon(1e-14));
        CHECK(t.rows[i][2] == 0.0);
    }
    const std::string* step = find_meta(t, "sweep_step");
    REQUIRE(step != nullptr);
    CHECK(*step == "0.25");
    CHECK(find_meta(t, "version") != nullptr);
}

TEST_CASE("default sweep step is resolved per axis") {
    SweepConfig cfg;
    cfg.experiment = Experiment::CouplingSweep;
    cfg.sweep_max = 0.1;
    const ResultTable line = run_coupling_sweep(cfg);
    CHECK(*find_meta(line, "sweep_step") == "0.01");
    CHECK(line.rows.size() == 11);

    cfg.axis = "grid";
    cfg.sweep_max = 0.2;
    const ResultTable grid = run_coupling_sweep(cfg);
    CHECK(*find_meta(grid, "sweep_step") == "0.05");
    REQUIRE(grid.columns.size() == 4);
    CHECK(grid.rows.size() == 81);  // (2*4+1)^2
    // Inversion symmetry of the coupling coefficient for a real pattern.
    const std::size_t n = grid.rows.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = grid.rows[i];
        const auto& b = grid.rows[n - 1 - i];
        CHECK(a[0] == doctest::Approx(-b[0]));
        CHECK(a[1] == doctest::Approx(-b[1]));
        CHECK(a[2] == doctest::Approx(b[2]).epsilon(1e-12));
        CHECK(std::hypot(a[2], a[3]) <= 1.0 + 1e-12);
    }
}

TEST_CASE("coupling sweep can export matrices") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "holosurf_export_test";
    fs::create_directories(dir);
    SweepConfig cfg;
    cfg.experiment = Experiment::CouplingSweep;
    cfg.sweep_max = 0.2;
    cfg.aperture = 1.0;
    cfg.d = 0.5;
    cfg.export_c = (dir / "c.csv").string();
    cfg.export_a = (dir / "a.csv").string();
    (void)run_coupling_sweep(cfg);

    std::ifstream in(*cfg.export_c);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# rows = 4");
    std::getline(in, line);
    CHECK(line == "# cols = 4");

    SweepConfig missing = cfg;
    missing.d.reset();
    CHECK_THROWS_AS(run_coupling_sweep(missing), std::invalid_argument);
    fs::remove_all(dir);
}

TEST_CASE("gain-vs-spacing rows are sorted with consistent counts") {
    SweepConfig cfg = fast_quad({});
    cfg.experiment = Experiment::GainVsSpacing;
    cfg.aperture = 1.0;
    cfg.d_list = {0.5, 0.25};
    const ResultTable t = run_gain_vs_spacing(cfg);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == doctest::Approx(0.25));
    CHECK(t.rows[1][0] == doctest::Approx(0.5));
    CHECK(t.rows[0][1] == 16.0);
    CHECK(t.rows[1][1] == 4.0);
    for (const auto& row : t.rows) {
        CHECK(row[3] >= row[2] - 1e-12);  // optimal never loses to conventional
        CHECK(row[4] <= row[1]);          // retained modes bounded by N
        CHECK(row[4] >= 1.0);
    }
    CHECK_THROWS_AS([&] {
        SweepConfig bad = cfg;
        bad.d_list = {0.3};
        return run_gain_vs_spacing(bad);
    }(), std::invalid_argument);
}

TEST_CASE("experiment tables are byte-for-byte deterministic") {
    SweepConfig cfg = fast_quad({});
    cfg.experiment = Experiment::GainVsSpacing;
    cfg.aperture = 1.0;
    cfg.d_list = {0.5, 0.25};
    cfg.pattern = "dir3gpp";
    const std::string a = run_gain_vs_spacing(cfg).to_csv();
    const std::string b = run_gain_vs_spacing(cfg).to_csv();
    CHECK(a == b);
}

TEST_CASE("direction sweep agrees with the spacing sweep at the normal direction") {
    SweepConfig cfg = fast_quad({});
    cfg.aperture = 1.0;
    cfg.d_list = {0.5, 0.25};

    cfg.experiment = Experiment::GainVsSpacing;
    const ResultTable by_spacing = run_gain_vs_spacing(cfg);

    cfg.experiment = Experiment::GainVsDirection;
    cfg.angle_step_deg = 45.0;
    const ResultTable by_dir = run_gain_vs_direction(cfg);
    REQUIRE(by_dir.columns.size() == 5);
    REQUIRE(by_dir.rows.size() == 5);  // -90..90 in 45 degree steps

    // Row with angle 0 is the normal direction.
    CHECK(find_value(by_dir, "angle_deg", 2) == doctest::Approx(0.0));
    CHECK(find_value(by_dir, "gain_conv_db_d0.5", 2) ==
          doctest::Approx(find_value(by_spacing, "gain_conv_db", 1)).epsilon(1e-9));
    CHECK(find_value(by_dir, "gain_opt_db_d0.5", 2) ==
          doctest::Approx(find_value(by_spacing, "gain_opt_db", 1)).epsilon(1e-9));
    CHECK(find_value(by_dir, "gain_conv_db_d0.25", 2) ==
          doctest::Approx(find_value(by_spacing, "gain_conv_db", 0)).epsilon(1e-9));

    // Left-right symmetry of the square surface.
    for (std::size_t c = 1; c < by_dir.columns.size(); ++c) {
        CHECK(by_dir.rows[0][c] == doctest::Approx(by_dir.rows[4][c]).epsilon(1e-9));
        CHECK(by_dir.rows[1][c] == doctest::Approx(by_dir.rows[3][c]).epsilon(1e-9));
    }
}

TEST_CASE("pattern cut peaks at the target and reports beamwidths") {
    SweepConfig cfg = fast_quad({});
    cfg.experiment = Experiment::PatternCut;
    cfg.aperture = 1.0;
    cfg.d_list = {0.25};
    cfg.cut_step_deg = 1.0;
    const ResultTable t = run_pattern_cut(cfg);
    REQUIRE(t.columns.size() == 3);
    REQUIRE(t.rows.size() == 360);

    // The design direction attains the cut's maximum.  (The mirror direction
    // phi = -180 ties with it: a planar surface radiates front and back.)
    std::size_t zero_row = 0;
    double best = -1e9;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r][0] == 0.0) zero_row = r;
        best = std::max(best, t.rows[r][2]);
    }
    CHECK(t.rows[zero_row][2] == doctest::Approx(best).epsilon(1e-12));
    CHECK(find_meta(t, "beamwidth_deg.r_db_conv_d0.25") != nullptr);
    CHECK(find_meta(t, "beamwidth_deg.r_db_opt_d0.25") != nullptr);

    // The cut level at the target matches the designed gain.
    SweepConfig scfg = fast_quad({});
    scfg.experiment = Experiment::GainVsSpacing;
    scfg.aperture = 1.0;
    scfg.d_list = {0.25};
    const ResultTable s = run_gain_vs_spacing(scfg);
    CHECK(t.rows[zero_row][1] == doctest::Approx(find_value(s, "gain_conv_db", 0)).epsilon(1e-9));
    CHECK(t.rows[zero_row][2] == doctest::Approx(find_value(s, "gain_opt_db", 0)).epsilon(1e-9));
}

TEST_CASE("vertical cuts use the polar angle and reject end-fire targets") {
    SweepConfig cfg = fast_quad({});
    cfg.experiment = Experiment::PatternCut;
    cfg.aperture = 1.0;
    cfg.d_list = {0.5};
    cfg.cut = "vertical";
    cfg.cut_step_deg = 1.0;
    const ResultTable t = run_pattern_cut(cfg);
    CHECK(t.columns[0] == "theta_deg");
    CHECK(t.rows.size() == 181);
    CHECK(t.rows.front()[0] == doctest::Approx(0.0));
    CHECK(t.rows.back()[0] == doctest::Approx(180.0));

    cfg.target = "endfire";
    CHECK_THROWS_AS(run_pattern_cut(cfg), std::invalid_argument);
}

TEST_CASE("aperture run crosses spacings, targets and patterns") {
    SweepConfig cfg = fast_quad({});
    cfg.experiment = Experiment::GainVsAperture;
    cfg.aperture_list = {0.5, 1.0};
    cfg.d_list = {0.25, 0.05};
    cfg.patterns = "iso";
    cfg.targets = "normal";
    const ResultTable t = run_gain_vs_aperture(cfg);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.columns[3] == "gain_opt_db_d0.25");
    CHECK(t.columns[4] == "gain_opt_db_d0.05");
    for (const auto& row : t.rows) {
        CHECK(row[1] == 0.0);  // target id: normal
        CHECK(row[2] == 0.0);  // pattern id: iso
        CHECK(row[5] == doctest::Approx(row[4] - row[3]).epsilon(1e-12));
        CHECK(row[5] > 0.0);  // densification helps at these sizes
    }
    CHECK(find_meta(t, "target_ids") != nullptr);
    CHECK(find_meta(t, "pattern_ids") != nullptr);

    // Cross-check one cell against the spacing sweep.
    SweepConfig scfg = fast_quad({});
    scfg.experiment = Experiment::GainVsSpacing;
    scfg.aperture = 0.5;
    scfg.d_list = {0.25, 0.05};
    const ResultTable s = run_gain_vs_spacing(scfg);
    CHECK(t.rows[0][4] == doctest::Approx(find_value(s, "gain_opt_db", 0)).epsilon(1e-9));
    CHECK(t.rows[0][3] == doctest::Approx(find_value(s, "gain_opt_db", 1)).epsilon(1e-9));
}

TEST_CASE("csi runs demand a seed and stay reproducible") {
    SweepConfig cfg = fast_quad({});
    cfg.experiment = Experiment::CsiErrorMc;
    cfg.aperture = 1.0;
    cfg.d_list = {0.5};
    cfg.trials = 64;
    cfg.sigma_list = {0.0, 8.0};
    CHECK_THROWS_AS(run_csi_error_mc(cfg), std::invalid_argument);

    cfg.seed = 1234567;
    const ResultTable a = run_csi_error_mc(cfg);
    const ResultTable b = run_csi_error_mc(cfg);
    CHECK(a.to_csv() == b.to_csv());

    SweepConfig other = cfg;
    other.seed = 7654321;
    CHECK(run_csi_error_mc(other).to_csv() != a.to_csv());

    REQUIRE(a.columns ==
            std::vector<std::string>{"sigma_deg", "mean_gain_db_conv_d0.5",
                                     "mean_gain_db_opt_d0.5"});
    REQUIRE(a.rows.size() == 2);
    CHECK(a.rows[0][0] == 0.0);
    CHECK(a.rows[1][0] == 8.0);
    // With perfect estimates the optimal design wins on average.
    CHECK(a.rows[0][2] >= a.rows[0][1] - 1e-12);
    CHECK(*find_meta(a, "mean_scale") == "linear");
    CHECK(find_meta(a, "region") != nullptr);
}

TEST_CASE("csi trial streams do not depend on the sigma batch layout") {
    // Restricting sigma_list must not change the draws of the cells kept.
    SweepConfig cfg = fast_quad({});
    cfg.experiment = Experiment::CsiErrorMc;
    cfg.aperture = 1.0;
    cfg.d_list = {0.5};
    cfg.kinds = "conv";
    cfg.trials = 32;
    cfg.seed = 99;
    cfg.sigma_list = {0.0};
    const ResultTable only_zero = run_csi_error_mc(cfg);
    cfg.sigma_list = {0.0, 4.0};
    const ResultTable both = run_csi_error_mc(cfg);
    CHECK(only_zero.rows[0][1] == doctest::Approx(both.rows[0][1]).epsilon(1e-15));
}

TEST_CASE("result tables write to files with metadata headers") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "holosurf_table_test.csv";
    ResultTable t;
    t.metadata.emplace_back("version", artifact_version);
    t.columns = {"x", "y"};
    t.rows = {{1.0, 0.123456789012345}, {2.0, -3.5}};
    write_result(t, path.string());

    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    CHECK(text == "# version = 0.1.0\nx,y\n1,0.123456789012\n2,-3.5\n");
    fs::remove(path);

    CHECK_THROWS_AS(write_result(t, "/nonexistent_dir_zz/x.csv"), std::runtime_error);
}

TEST_CASE("run_experiment dispatches on the experiment tag") {
    SweepConfig cfg;
    cfg.experiment = Experiment::CouplingSweep;
    cfg.sweep_max = 0.5;
    cfg.sweep_step = 0.25;
    const ResultTable t = run_experiment(cfg);
    CHECK(t.columns[0] == "displacement");
    CHECK(t.rows.size() == 3);
}
