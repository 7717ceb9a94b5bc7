// SPDX-License-Identifier: Apache-2.0

#include "holosurf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "holosurf/beamform.hpp"
#include "holosurf/coupling.hpp"
#include "holosurf/geometry.hpp"
#include "holosurf/radiation.hpp"

namespace holosurf {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double deg = pi / 180.0;

// ---------------------------------------------------------------- strings

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

// Shortest representation that parses back to the identical double.
std::string fmt_exact(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::stod(buf) == v) break;
    }
    return buf;
}

std::string fmt_cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad number '" + value + "'");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad integer '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad unsigned integer '" + value + "'");
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    if (trim(value).empty()) return out;
    for (const auto& item : split(value, ',')) out.push_back(parse_double(key, item));
    return out;
}

std::string join_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt_exact(v[i]);
    }
    return out;
}

double to_db(double linear) { return 10.0 * std::log10(std::max(linear, 1e-300)); }

// ---------------------------------------------------------------- enums

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
    static const std::vector<std::pair<Experiment, std::string>> names = {
        {Experiment::CouplingSweep, "coupling"},
        {Experiment::GainVsSpacing, "gain-spacing"},
        {Experiment::GainVsDirection, "gain-direction"},
        {Experiment::PatternCut, "pattern-cut"},
        {Experiment::GainVsAperture, "aperture"},
        {Experiment::CsiErrorMc, "csi-mc"},
    };
    return names;
}

int pattern_id(const std::string& name) {
    if (name == "iso") return 0;
    if (name == "dir3gpp") return 1;
    if (name == "dipole") return 2;
    throw std::invalid_argument("unknown pattern '" + name + "' (expected iso|dir3gpp|dipole)");
}

int target_id(const std::string& name) {
    if (name == "normal") return 0;
    if (name == "endfire") return 1;
    throw std::invalid_argument("unknown target '" + name + "' (expected normal|endfire)");
}

Direction target_direction(const std::string& name) {
    return target_id(name) == 0 ? Direction(pi / 2.0, 0.0) : Direction(pi / 2.0, pi / 2.0);
}

// dipole length binding: explicit config value wins, otherwise tie to the
// grid pitch; sweeps with no pitch fall back to a half-wavelength element.
RadiationPattern make_pattern(const std::string& name, std::optional<double> dipole_length,
                              double bind_d, const SphericalQuadrature& quad) {
    switch (pattern_id(name)) {
        case 0: return RadiationPattern::isotropic();
        case 1: return RadiationPattern::directional(quad);
        default: return RadiationPattern::dipole(dipole_length.value_or(bind_d), quad);
    }
}

// ---------------------------------------------------------------- config

SweepConfig resolved(const SweepConfig& in) {
    SweepConfig c = in;
    switch (c.experiment) {
        case Experiment::CouplingSweep:
            if (!c.sweep_step) c.sweep_step = (c.axis == "grid") ? 0.05 : 0.01;
            if (c.pattern == "dipole" && !c.dipole_length) c.dipole_length = 0.5;
            break;
        case Experiment::GainVsSpacing:
            if (c.d_list.empty()) c.d_list = {0.5, 0.25, 0.2, 0.125, 0.1, 0.0625, 0.05};
            break;
        case Experiment::GainVsDirection:
        case Experiment::PatternCut:
            if (c.d_list.empty()) c.d_list = {0.5, 0.05};
            break;
        case Experiment::GainVsAperture:
            if (c.d_list.empty()) c.d_list = {0.5, 0.05};
            if (c.aperture_list.empty()) c.aperture_list = {1.0, 2.0, 3.0, 4.0};
            break;
        case Experiment::CsiErrorMc:
            if (c.d_list.empty()) c.d_list = {0.5, 0.05};
            if (c.sigma_list.empty()) c.sigma_list = {0.0, 2.0, 4.0, 6.0, 10.0};
            break;
    }
    return c;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

void validate_names(const std::string& key, const std::string& csv, int (*check)(const std::string&)) {
    const auto items = split(csv, ',');
    require(!items.empty() && !items[0].empty(), "config key '" + key + "': empty list");
    for (const auto& item : items) (void)check(item);
}

}  // namespace

std::string to_string(Experiment e) {
    for (const auto& [exp, name] : experiment_names())
        if (exp == e) return name;
    return "?";
}

Experiment experiment_from_string(const std::string& name) {
    for (const auto& [exp, n] : experiment_names())
        if (n == name) return exp;
    throw std::invalid_argument("unknown experiment '" + name + "'");
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

SweepConfig config_from_map(Experiment e, const std::map<std::string, std::string>& kv) {
    SweepConfig c;
    c.experiment = e;
    for (const auto& [key, value] : kv) {
        if (key == "experiment") {
            require(experiment_from_string(value) == e,
                    "config experiment '" + value + "' does not match '" + to_string(e) + "'");
        } else if (key == "pattern") {
            (void)pattern_id(value);
            c.pattern = value;
        } else if (key == "dipole_length") {
            if (value.empty()) c.dipole_length.reset();
            else {
                c.dipole_length = parse_double(key, value);
                require(*c.dipole_length > 0.0, "dipole_length must be positive");
            }
        } else if (key == "gamma") {
            c.gamma = parse_double(key, value);
            require(c.gamma >= 0.0, "gamma must be >= 0");
        } else if (key == "quad_polar") {
            c.quad_polar = static_cast<int>(parse_int(key, value));
            require(c.quad_polar >= 4, "quad_polar must be >= 4");
        } else if (key == "quad_azimuth") {
            c.quad_azimuth = static_cast<int>(parse_int(key, value));
            require(c.quad_azimuth >= 4, "quad_azimuth must be >= 4");
        } else if (key == "out") {
            c.out = value;
        } else if (key == "axis") {
            require(value == "y" || value == "z" || value == "grid",
                    "axis must be y, z, or grid");
            c.axis = value;
        } else if (key == "sweep_max") {
            c.sweep_max = parse_double(key, value);
            require(c.sweep_max > 0.0, "sweep_max must be positive");
        } else if (key == "sweep_step") {
            if (value.empty()) c.sweep_step.reset();
            else {
                c.sweep_step = parse_double(key, value);
                require(*c.sweep_step > 0.0, "sweep_step must be positive");
            }
        } else if (key == "d") {
            if (value.empty()) c.d.reset();
            else {
                c.d = parse_double(key, value);
                require(*c.d > 0.0, "d must be positive");
            }
        } else if (key == "export_c") {
            if (value.empty()) c.export_c.reset();
            else c.export_c = value;
        } else if (key == "export_a") {
            if (value.empty()) c.export_a.reset();
            else c.export_a = value;
        } else if (key == "L") {
            c.aperture = parse_double(key, value);
            require(c.aperture > 0.0, "L must be positive");
        } else if (key == "d_list") {
            c.d_list = parse_list(key, value);
            for (double d : c.d_list) require(d > 0.0, "d_list entries must be positive");
        } else if (key == "L_list") {
            c.aperture_list = parse_list(key, value);
            for (double l : c.aperture_list) require(l > 0.0, "L_list entries must be positive");
        } else if (key == "target") {
            (void)target_id(value);
            c.target = value;
        } else if (key == "targets") {
            validate_names(key, value, target_id);
            c.targets = value;
        } else if (key == "patterns") {
            validate_names(key, value, pattern_id);
            c.patterns = value;
        } else if (key == "kinds") {
            for (const auto& k : split(value, ','))
                require(k == "conv" || k == "opt", "kinds entries must be conv or opt");
            require(!trim(value).empty(), "kinds must be non-empty");
            c.kinds = value;
        } else if (key == "cut") {
            require(value == "horizontal" || value == "vertical",
                    "cut must be horizontal or vertical");
            c.cut = value;
        } else if (key == "angle_step_deg") {
            c.angle_step_deg = parse_double(key, value);
            require(c.angle_step_deg > 0.0, "angle_step_deg must be positive");
        } else if (key == "cut_step_deg") {
            c.cut_step_deg = parse_double(key, value);
            require(c.cut_step_deg > 0.0, "cut_step_deg must be positive");
        } else if (key == "trials") {
            const long long t = parse_int(key, value);
            require(t >= 1 && t <= 100000000, "trials must be in [1, 1e8]");
            c.trials = static_cast<int>(t);
        } else if (key == "sigma_list") {
            c.sigma_list = parse_list(key, value);
            for (double s : c.sigma_list) require(s >= 0.0, "sigma_list entries must be >= 0");
        } else if (key == "seed") {
            if (value.empty()) c.seed.reset();
            else c.seed = parse_u64(key, value);
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    return c;
}

std::string emit_config(const SweepConfig& c) {
    std::ostringstream out;
    auto line = [&](const std::string& k, const std::string& v) { out << k << " = " << v << "\n"; };
    line("experiment", to_string(c.experiment));
    line("pattern", c.pattern);
    line("dipole_length", c.dipole_length ? fmt_exact(*c.dipole_length) : "");
    line("gamma", fmt_exact(c.gamma));
    line("quad_polar", std::to_string(c.quad_polar));
    line("quad_azimuth", std::to_string(c.quad_azimuth));
    line("out", c.out);
    line("axis", c.axis);
    line("sweep_max", fmt_exact(c.sweep_max));
    line("sweep_step", c.sweep_step ? fmt_exact(*c.sweep_step) : "");
    line("d", c.d ? fmt_exact(*c.d) : "");
    line("export_c", c.export_c.value_or(""));
    line("export_a", c.export_a.value_or(""));
    line("L", fmt_exact(c.aperture));
    line("d_list", join_list(c.d_list));
    line("L_list", join_list(c.aperture_list));
    line("target", c.target);
    line("targets", c.targets);
    line("patterns", c.patterns);
    line("kinds", c.kinds);
    line("cut", c.cut);
    line("angle_step_deg", fmt_exact(c.angle_step_deg));
    line("cut_step_deg", fmt_exact(c.cut_step_deg));
    line("trials", std::to_string(c.trials));
    line("sigma_list", join_list(c.sigma_list));
    line("seed", c.seed ? std::to_string(*c.seed) : "");
    return out.str();
}

std::string ResultTable::to_csv() const {
    std::string out;
    for (const auto& [k, v] : metadata) out += "# " + k + " = " + v + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += fmt_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

namespace {

void add_config_metadata(ResultTable& t, const SweepConfig& cfg) {
    t.metadata.emplace_back("version", artifact_version);
    std::istringstream lines(emit_config(cfg));
    std::string line;
    while (std::getline(lines, line)) {
        const auto eq = line.find('=');
        t.metadata.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

std::string d_label(double d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", d);
    return buf;
}

void check_divides(double aperture, double d) {
    const double ratio = aperture / d;
    require(std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio) &&
                std::round(ratio) >= 1.0,
            "spacing " + fmt_exact(d) + " does not divide aperture " + fmt_exact(aperture));
}

struct Surface {
    ArrayGeometry geom;
    RadiationPattern pat;
    TransferMatrix t;
};

Surface make_surface(const SweepConfig& cfg, double aperture, double d,
                     const SphericalQuadrature& quad) {
    check_divides(aperture, d);
    ArrayGeometry geom = build_ura(aperture, d);
    RadiationPattern pat = make_pattern(cfg.pattern, cfg.dipole_length, d, quad);
    CouplingMatrix c = coupling_matrix(geom, pat, quad);
    TransferMatrix t = transfer_matrix(c, cfg.gamma);
    return Surface{std::move(geom), std::move(pat), std::move(t)};
}

// Column-fill of steering phases for a uniform planar grid: factorizes the
// per-element phase into a y-progression times a z-progression, reducing
// N trig calls per direction to 2*sqrt(N).
struct UraFill {
    std::size_t side = 0;
    double y0 = 0.0, z0 = 0.0, pitch = 0.0;
    mutable std::vector<std::complex<double>> ey, ez;

    explicit UraFill(const ArrayGeometry& geom) {
        side = static_cast<std::size_t>(std::llround(std::sqrt(double(geom.size()))));
        y0 = geom.positions[0].y;
        z0 = geom.positions[0].z;
        pitch = geom.spacing.value_or(1.0);
        ey.resize(side);
        ez.resize(side);
    }

    // sign = +1 fills steering entries h_n, sign = -1 their conjugates.
    void fill(std::complex<double>* col, const UnitVec& u, double amp, int sign) const {
        const double wy = sign * two_pi * u.y;
        const double wz = sign * two_pi * u.z;
        for (std::size_t c = 0; c < side; ++c)
            ey[c] = std::polar(1.0, wy * (y0 + static_cast<double>(c) * pitch));
        for (std::size_t r = 0; r < side; ++r)
            ez[r] = std::polar(amp, wz * (z0 - static_cast<double>(r) * pitch));
        std::size_t k = 0;
        for (std::size_t r = 0; r < side; ++r)
            for (std::size_t c = 0; c < side; ++c) col[k++] = ez[r] * ey[c];
    }
};

std::vector<std::string> parse_kinds(const std::string& kinds) {
    std::vector<std::string> out = split(kinds, ',');
    require(!out.empty(), "kinds must be non-empty");
    return out;
}

arma::cx_mat eigen_scaled(const TransferMatrix& t, const arma::vec& diag) {
    arma::cx_mat scaled = t.eigenvectors;
    for (arma::uword k = 0; k < scaled.n_cols; ++k) scaled.col(k) *= diag(k);
    return scaled * t.eigenvectors.t();
}

// splitmix64 keyed by (seed, stream): cheap, stateless streams with good
// avalanche between consecutive stream ids.
struct CounterRng {
    std::uint64_t state;

    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : state(seed ^ (0x9e3779b97f4a7c15ull * (stream + 0x632be59bd9b4e019ull))) {
        next();
        next();
    }

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    void gaussian_pair(double& g1, double& g2) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double m = std::sqrt(-2.0 * std::log(u1));
        g1 = m * std::cos(two_pi * u2);
        g2 = m * std::sin(two_pi * u2);
    }
};

}  // namespace

ResultTable run_coupling_sweep(const SweepConfig& raw) {
    const SweepConfig cfg = resolved(raw);
    const SphericalQuadrature quad = SphericalQuadrature::build(cfg.quad_polar, cfg.quad_azimuth);
    const double step = *cfg.sweep_step;

    ResultTable table;
    add_config_metadata(table, cfg);

    const bool iso = cfg.pattern == "iso";
    std::optional<RadiationPattern> pat;
    if (!iso) pat = make_pattern(cfg.pattern, cfg.dipole_length, 0.5, quad);

    if (cfg.axis == "grid") {
        const long m = std::lround(cfg.sweep_max / step);
        std::vector<Vec3> disps;
        disps.reserve(static_cast<std::size_t>(2 * m + 1) * (2 * m + 1));
        for (long ky = -m; ky <= m; ++ky)
            for (long kz = -m; kz <= m; ++kz)
                disps.push_back({0.0, ky * step, kz * step});
        std::vector<std::complex<double>> c(disps.size());
        if (iso) {
            for (std::size_t i = 0; i < disps.size(); ++i)
                c[i] = isotropic_coupling(norm(disps[i]));
        } else {
            c = coupling_entries(*pat, disps, quad);
        }
        table.columns = {"t_y", "t_z", "re_c", "im_c"};
        for (std::size_t i = 0; i < disps.size(); ++i)
            table.rows.push_back({disps[i].y, disps[i].z, c[i].real(), c[i].imag()});
    } else {
        const long m = std::lround(cfg.sweep_max / step);
        std::vector<Vec3> disps;
        for (long k = 0; k <= m; ++k) {
            const double dv = k * step;
            disps.push_back(cfg.axis == "y" ? Vec3{0.0, dv, 0.0} : Vec3{0.0, 0.0, dv});
        }
        std::vector<std::complex<double>> c(disps.size());
        if (iso) {
            for (std::size_t i = 0; i < disps.size(); ++i)
                c[i] = isotropic_coupling(norm(disps[i]));
        } else {
            c = coupling_entries(*pat, disps, quad);
        }
        table.columns = {"displacement", "re_c", "im_c"};
        for (std::size_t i = 0; i < disps.size(); ++i)
            table.rows.push_back({static_cast<double>(i) * step, c[i].real(), c[i].imag()});
    }

    if (cfg.export_c || cfg.export_a) {
        require(cfg.d.has_value(), "matrix export requires config key 'd'");
        const ArrayGeometry geom = build_ura(cfg.aperture, *cfg.d);
        const RadiationPattern ep = make_pattern(cfg.pattern, cfg.dipole_length, *cfg.d, quad);
        const CouplingMatrix cm = coupling_matrix(geom, ep, quad);
        if (cfg.export_c) write_complex_matrix_csv(cm.entries, *cfg.export_c);
        if (cfg.export_a)
            write_complex_matrix_csv(transfer_matrix(cm, cfg.gamma).matrix(), *cfg.export_a);
    }
    return table;
}

ResultTable run_gain_vs_spacing(const SweepConfig& raw) {
    const SweepConfig cfg = resolved(raw);
    const SphericalQuadrature quad = SphericalQuadrature::build(cfg.quad_polar, cfg.quad_azimuth);
    const Direction target = target_direction(cfg.target);

    std::vector<double> ds = cfg.d_list;
    std::sort(ds.begin(), ds.end());

    ResultTable table;
    add_config_metadata(table, cfg);
    table.columns = {"d_over_lambda", "n_elements", "gain_conv_db", "gain_opt_db",
                     "retained_count"};
    for (double d : ds) {
        const Surface s = make_surface(cfg, cfg.aperture, d, quad);
        const SteeringVector h = steering_vector(s.geom, s.pat, target);
        const GainResult gc = gain(h, s.t, conventional_beamformer(h));
        const GainResult go = gain(h, s.t, optimal_beamformer(h, s.t));
        table.rows.push_back({d, static_cast<double>(s.geom.size()), to_db(gc.linear),
                              to_db(go.linear), static_cast<double>(s.t.retained_count)});
    }
    return table;
}

ResultTable run_gain_vs_direction(const SweepConfig& raw) {
    const SweepConfig cfg = resolved(raw);
    const SphericalQuadrature quad = SphericalQuadrature::build(cfg.quad_polar, cfg.quad_azimuth);
    const bool horizontal = cfg.cut == "horizontal";

    std::vector<double> angles;
    const double lo = horizontal ? -90.0 : 0.0;
    const double hi = horizontal ? 90.0 : 180.0;
    for (long k = 0;; ++k) {
        const double a = lo + k * cfg.angle_step_deg;
        if (a > hi + 1e-9) break;
        angles.push_back(std::min(a, hi));
        if (a >= hi - 1e-9) break;
    }
    const std::size_t na = angles.size();

    ResultTable table;
    add_config_metadata(table, cfg);
    table.columns = {"angle_deg"};
    table.rows.assign(na, {});
    for (std::size_t i = 0; i < na; ++i) table.rows[i].push_back(angles[i]);

    for (double d : cfg.d_list) {
        const Surface s = make_surface(cfg, cfg.aperture, d, quad);
        const std::size_t n = s.geom.size();
        const UraFill fill(s.geom);

        arma::cx_mat ht(n, na);  // column t = conj(steering row) at angle t
        for (std::size_t t = 0; t < na; ++t) {
            const double a = angles[t] * deg;
            const UnitVec u = horizontal ? unit_from_angles(pi / 2.0, a) : unit_from_angles(a, 0.0);
            fill.fill(ht.colptr(t), u, std::sqrt(s.pat.value(u)), -1);
        }
        const arma::cx_mat b = s.t.eigenvectors.t() * ht;
        const arma::mat b2 = arma::square(arma::abs(b));
        const arma::rowvec h2 = arma::sum(arma::square(arma::abs(ht)), 0);
        const arma::rowvec conv_num = s.t.inv_sqrt.t() * b2;
        const arma::rowvec opt_gain = arma::square(s.t.inv_sqrt).t() * b2;

        for (std::size_t t = 0; t < na; ++t) {
            const double gc = h2(t) > 0.0 ? conv_num(t) * conv_num(t) / h2(t) : 0.0;
            table.rows[t].push_back(to_db(gc));
            table.rows[t].push_back(to_db(opt_gain(t)));
        }
        table.columns.push_back("gain_conv_db_d" + d_label(d));
        table.columns.push_back("gain_opt_db_d" + d_label(d));
    }
    return table;
}

ResultTable run_pattern_cut(const SweepConfig& raw) {
    const SweepConfig cfg = resolved(raw);
    const SphericalQuadrature quad = SphericalQuadrature::build(cfg.quad_polar, cfg.quad_azimuth);
    const std::vector<std::string> kinds = parse_kinds(cfg.kinds);
    const bool horizontal = cfg.cut == "horizontal";
    require(horizontal || cfg.target == "normal", "vertical cuts support target = normal only");
    const Direction target = target_direction(cfg.target);
    const double target_deg = (cfg.target == "normal") ? (horizontal ? 0.0 : 90.0) : 90.0;

    std::vector<double> angles;
    bool periodic;
    if (horizontal) {
        const long k = std::lround(360.0 / cfg.cut_step_deg);
        require(std::abs(k * cfg.cut_step_deg - 360.0) <= 1e-9, "cut_step_deg must divide 360");
        for (long i = 0; i < k; ++i) angles.push_back(-180.0 + i * cfg.cut_step_deg);
        periodic = true;
    } else {
        for (long i = 0;; ++i) {
            const double a = i * cfg.cut_step_deg;
            if (a > 180.0 + 1e-9) break;
            angles.push_back(std::min(a, 180.0));
            if (a >= 180.0 - 1e-9) break;
        }
        periodic = false;
    }
    const std::size_t na = angles.size();

    ResultTable table;
    add_config_metadata(table, cfg);
    table.columns = {horizontal ? "phi_deg" : "theta_deg"};
    table.rows.assign(na, {});
    for (std::size_t i = 0; i < na; ++i) table.rows[i].push_back(angles[i]);

    for (double d : cfg.d_list) {
        const Surface s = make_surface(cfg, cfg.aperture, d, quad);
        const std::size_t n = s.geom.size();
        const UraFill fill(s.geom);
        const SteeringVector h0 = steering_vector(s.geom, s.pat, target);

        for (const std::string& kind : kinds) {
            const BeamformingVector f = (kind == "conv")
                                            ? conventional_beamformer(h0)
                                            : optimal_beamformer(h0, s.t);
            const arma::cx_vec g = s.t.apply(f.entries);
            const double denom = std::pow(arma::norm(f.entries, 2), 2);

            std::vector<std::complex<double>> row(n);
            PatternCut cut;
            cut.angle_deg = angles;
            cut.periodic = periodic;
            cut.level_db.resize(na);
            for (std::size_t t = 0; t < na; ++t) {
                const double a = angles[t] * deg;
                const UnitVec u =
                    horizontal ? unit_from_angles(pi / 2.0, a) : unit_from_angles(a, 0.0);
                fill.fill(row.data(), u, std::sqrt(s.pat.value(u)), +1);
                std::complex<double> acc{0.0, 0.0};
                for (std::size_t i = 0; i < n; ++i) acc += row[i] * g(i);
                cut.level_db[t] = to_db(std::norm(acc) / denom);
            }

            const std::string col = "r_db_" + kind + "_d" + d_label(d);
            table.columns.push_back(col);
            for (std::size_t t = 0; t < na; ++t) table.rows[t].push_back(cut.level_db[t]);

            const BeamwidthResult bw = zero_point_beamwidth(cut, target_deg);
            table.metadata.emplace_back("beamwidth_deg." + col,
                                        bw.complete ? fmt_cell(bw.width_deg) : "incomplete");
        }
    }
    return table;
}

ResultTable run_gain_vs_aperture(const SweepConfig& raw) {
    const SweepConfig cfg = resolved(raw);
    const SphericalQuadrature quad = SphericalQuadrature::build(cfg.quad_polar, cfg.quad_azimuth);
    require(cfg.d_list.size() == 2, "aperture experiment needs exactly two spacings in d_list");
    const double d_coarse = std::max(cfg.d_list[0], cfg.d_list[1]);
    const double d_fine = std::min(cfg.d_list[0], cfg.d_list[1]);
    require(d_coarse > d_fine, "aperture experiment needs two distinct spacings");

    std::vector<double> apertures = cfg.aperture_list;
    std::sort(apertures.begin(), apertures.end());
    const std::vector<std::string> target_names = split(cfg.targets, ',');
    const std::vector<std::string> pattern_names = split(cfg.patterns, ',');

    ResultTable table;
    add_config_metadata(table, cfg);
    table.metadata.emplace_back("target_ids", "0=normal,1=endfire");
    table.metadata.emplace_back("pattern_ids", "0=iso,1=dir3gpp,2=dipole");
    table.columns = {"L_over_lambda",
                     "target_id",
                     "pattern_id",
                     "gain_opt_db_d" + d_label(d_coarse),
                     "gain_opt_db_d" + d_label(d_fine),
                     "delta_db"};

    std::string warning;
    // gains[(L index, target, pattern)] -> {coarse_db, fine_db}
    std::map<std::tuple<std::size_t, int, int>, std::pair<double, double>> gains;
    for (std::size_t li = 0; li < apertures.size(); ++li) {
        for (const std::string& pname : pattern_names) {
            for (const double d : {d_coarse, d_fine}) {
                SweepConfig sub = cfg;
                sub.pattern = pname;
                const Surface s = make_surface(sub, apertures[li], d, quad);
                if (s.geom.size() > 10000 && warning.empty())
                    warning = "N = " + std::to_string(s.geom.size()) + " (L = " +
                              fmt_exact(apertures[li]) + ", d = " + fmt_exact(d) +
                              ") exceeds 10000; expect a long eigensolve";
                for (const std::string& tname : target_names) {
                    const SteeringVector h = steering_vector(s.geom, s.pat, target_direction(tname));
                    const GainResult go = gain(h, s.t, optimal_beamformer(h, s.t));
                    auto& slot = gains[{li, target_id(tname), pattern_id(pname)}];
                    (d == d_coarse ? slot.first : slot.second) = to_db(go.linear);
                }
            }
        }
    }
    if (!warning.empty()) table.metadata.emplace_back("warning", warning);

    for (std::size_t li = 0; li < apertures.size(); ++li)
        for (int t = 0; t <= 1; ++t)
            for (int p = 0; p <= 2; ++p) {
                const auto it = gains.find({li, t, p});
                if (it == gains.end()) continue;
                const auto& [coarse_db, fine_db] = it->second;
                table.rows.push_back({apertures[li], static_cast<double>(t),
                                      static_cast<double>(p), coarse_db, fine_db,
                                      fine_db - coarse_db});
            }
    return table;
}

ResultTable run_csi_error_mc(const SweepConfig& raw) {
    const SweepConfig cfg = resolved(raw);
    require(cfg.seed.has_value(), "csi-mc requires config key 'seed'");
    const SphericalQuadrature quad = SphericalQuadrature::build(cfg.quad_polar, cfg.quad_azimuth);
    const std::vector<std::string> kinds = parse_kinds(cfg.kinds);

    std::vector<double> sigmas = cfg.sigma_list;
    std::sort(sigmas.begin(), sigmas.end());

    ResultTable table;
    add_config_metadata(table, cfg);
    table.metadata.emplace_back("mean_scale", "linear");
    table.metadata.emplace_back("region", "theta 60..120 deg, phi -60..60 deg");
    table.columns = {"sigma_deg"};

    // Per spacing: one decomposition; per (spacing, kind): one dense operator.
    std::vector<Surface> surfaces;
    std::vector<std::pair<std::size_t, std::string>> cells;  // (surface idx, kind)
    for (double d : cfg.d_list) {
        surfaces.push_back(make_surface(cfg, cfg.aperture, d, quad));
        for (const std::string& kind : kinds) {
            cells.emplace_back(surfaces.size() - 1, kind);
            table.columns.push_back("mean_gain_db_" + kind + "_d" + d_label(d));
        }
    }
    std::vector<arma::cx_mat> ops(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const TransferMatrix& t = surfaces[cells[c].first].t;
        ops[c] = (cells[c].second == "conv") ? eigen_scaled(t, t.inv_sqrt)
                                             : eigen_scaled(t, arma::square(t.inv_sqrt));
    }

    const int chunk = 4096;
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        const double sigma_rad = sigmas[si] * deg;
        std::vector<double> row{sigmas[si]};
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const Surface& s = surfaces[cells[c].first];
            const bool conv = cells[c].second == "conv";
            const std::size_t n = s.geom.size();
            const UraFill fill(s.geom);
            CounterRng rng(*cfg.seed, si * cells.size() + c);

            double sum = 0.0;
            int done = 0;
            arma::cx_mat ht, he;
            while (done < cfg.trials) {
                const int b = std::min(chunk, cfg.trials - done);
                ht.set_size(n, b);
                he.set_size(n, b);
                for (int t = 0; t < b; ++t) {
                    const double theta = pi / 3.0 + rng.uniform() * pi / 3.0;
                    const double phi = -pi / 3.0 + rng.uniform() * 2.0 * pi / 3.0;
                    double g1, g2;
                    rng.gaussian_pair(g1, g2);
                    const UnitVec u_true = unit_from_angles(theta, phi);
                    const UnitVec u_est =
                        unit_from_angles(theta + sigma_rad * g1, phi + sigma_rad * g2);
                    fill.fill(ht.colptr(t), u_true, std::sqrt(s.pat.value(u_true)), -1);
                    fill.fill(he.colptr(t), u_est, std::sqrt(s.pat.value(u_est)), -1);
                }
                const arma::cx_mat m = ops[c] * he;
                const arma::cx_rowvec num = arma::sum(arma::conj(ht) % m, 0);
                arma::rowvec den;
                if (conv) den = arma::sum(arma::square(arma::abs(he)), 0);
                else den = arma::real(arma::sum(arma::conj(he) % m, 0));
                for (int t = 0; t < b; ++t)
                    sum += den(t) > 1e-300 ? std::norm(num(t)) / den(t) : 0.0;
                done += b;
            }
            row.push_back(to_db(sum / cfg.trials));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

ResultTable run_experiment(const SweepConfig& cfg) {
    switch (cfg.experiment) {
        case Experiment::CouplingSweep: return run_coupling_sweep(cfg);
        case Experiment::GainVsSpacing: return run_gain_vs_spacing(cfg);
        case Experiment::GainVsDirection: return run_gain_vs_direction(cfg);
        case Experiment::PatternCut: return run_pattern_cut(cfg);
        case Experiment::GainVsAperture: return run_gain_vs_aperture(cfg);
        case Experiment::CsiErrorMc: return run_csi_error_mc(cfg);
    }
    throw std::logic_error("unreachable");
}

void write_result(const ResultTable& table, const std::string& path) {
    if (path == "-") {
        std::cout << table.to_csv();
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << table.to_csv();
    if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

void write_complex_matrix_csv(const arma::cx_mat& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << "# rows = " << m.n_rows << "\n# cols = " << m.n_cols
        << "\n# layout = row-major re,im pairs\n";
    for (arma::uword i = 0; i < m.n_rows; ++i) {
        for (arma::uword j = 0; j < m.n_cols; ++j) {
            if (j) out << ',';
            out << fmt_cell(m(i, j).real()) << ',' << fmt_cell(m(i, j).imag());
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

}  // namespace holosurf
