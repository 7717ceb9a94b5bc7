// SPDX-License-Identifier: Apache-2.0

#include "holosurf/radiation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace holosurf {

namespace {

constexpr double pi = std::numbers::pi;

// Sector pattern constants (both planes): 65 deg half-power width, 30 dB
// side floor, 8 dBi peak before lossless renormalization.
constexpr double sector_hpbw_deg = 65.0;
constexpr double sector_floor_db = 30.0;
constexpr double sector_peak_dbi = 8.0;

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double z1 = 0.0, pp = 0.0;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            z1 = z;
            z = z1 - p1 / pp;
        } while (std::abs(z - z1) > 1e-15);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

double sector_raw(double theta, double phi) {
    const double td = theta * 180.0 / pi - 90.0;  // tilt from boresight plane
    const double pd = phi * 180.0 / pi;
    const double av = std::min(12.0 * (td / sector_hpbw_deg) * (td / sector_hpbw_deg), sector_floor_db);
    const double ah = std::min(12.0 * (pd / sector_hpbw_deg) * (pd / sector_hpbw_deg), sector_floor_db);
    const double a_db = -std::min(av + ah, sector_floor_db);
    return std::pow(10.0, (sector_peak_dbi + a_db) / 10.0);
}

double dipole_raw(double cos_theta, double sin2_theta, double length) {
    if (sin2_theta < 1e-12) return 0.0;  // on-axis null of the thin-wire pattern
    const double t = std::cos(pi * length * cos_theta) - std::cos(pi * length);
    return t * t / sin2_theta;
}

}  // namespace

SphericalQuadrature SphericalQuadrature::build(int n_polar, int n_azimuth) {
    if (n_polar < 1 || n_azimuth < 1)
        throw std::invalid_argument("SphericalQuadrature: node counts must be positive");
    SphericalQuadrature q;
    gauss_legendre(n_polar, q.mu, q.mu_weight);
    q.phi_weight = 2.0 * pi / n_azimuth;
    q.phi.resize(n_azimuth);
    for (int k = 0; k < n_azimuth; ++k)
        q.phi[k] = -pi + (k + 0.5) * q.phi_weight;

    q.nodes.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
    for (int p = 0; p < n_polar; ++p) {
        const double mu = q.mu[p];
        const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        const double w = q.mu_weight[p] * q.phi_weight;
        for (int k = 0; k < n_azimuth; ++k)
            q.nodes.push_back({UnitVec{st * std::cos(q.phi[k]), st * std::sin(q.phi[k]), mu}, w});
    }
    return q;
}

const SphericalQuadrature& default_quadrature() {
    static const SphericalQuadrature quad = SphericalQuadrature::build(256, 512);
    return quad;
}

double RadiationPattern::raw_value(const UnitVec& u) const {
    switch (kind_) {
        case PatternKind::Isotropic:
            return 1.0;
        case PatternKind::Directional: {
            const double theta = std::acos(std::clamp(u.z, -1.0, 1.0));
            const double phi = std::atan2(u.y, u.x);
            return sector_raw(theta, phi);
        }
        case PatternKind::Dipole:
            return dipole_raw(u.z, u.x * u.x + u.y * u.y, dipole_len_);
    }
    return 0.0;
}

double RadiationPattern::value(const UnitVec& u) const {
    return k_norm_ * raw_value(u);
}

double RadiationPattern::value(double theta, double phi) const {
    return value(unit_from_angles(theta, phi));
}

RadiationPattern RadiationPattern::isotropic() {
    return RadiationPattern(PatternKind::Isotropic, 1.0, 0.0);
}

RadiationPattern RadiationPattern::directional(const SphericalQuadrature& quad) {
    double mean = 0.0;
    for (const auto& node : quad.nodes) {
        const double theta = std::acos(std::clamp(node.u.z, -1.0, 1.0));
        mean += node.weight * sector_raw(theta, std::atan2(node.u.y, node.u.x));
    }
    mean /= 4.0 * pi;
    return RadiationPattern(PatternKind::Directional, 1.0 / mean, 0.0);
}

RadiationPattern RadiationPattern::dipole(double length, const SphericalQuadrature& quad) {
    if (!(length > 0.0))
        throw std::domain_error("RadiationPattern::dipole: length must be positive");
    double mean = 0.0;
    for (const auto& node : quad.nodes)
        mean += node.weight * dipole_raw(node.u.z, node.u.x * node.u.x + node.u.y * node.u.y, length);
    mean /= 4.0 * pi;
    if (!(mean > 0.0))
        throw std::runtime_error("RadiationPattern::dipole: degenerate pattern");
    return RadiationPattern(PatternKind::Dipole, 1.0 / mean, length);
}

}  // namespace holosurf
