// SPDX-License-Identifier: Apache-2.0

#include "holosurf/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace holosurf {

namespace {
constexpr double pi = std::numbers::pi;
}

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

UnitVec UnitVec::from_components(double x, double y, double z) {
    const double n = std::sqrt(x * x + y * y + z * z);
    if (std::abs(n - 1.0) > 1e-12)
        throw std::domain_error("UnitVec: |v| = " + std::to_string(n) + " is not 1");
    return UnitVec{x, y, z};
}

double dot(const UnitVec& u, const Vec3& v) { return u.x * v.x + u.y * v.y + u.z * v.z; }

Direction::Direction(double theta_, double phi_) : theta(theta_), phi(phi_) {
    if (!(theta >= 0.0 && theta <= pi))
        throw std::domain_error("Direction: theta out of [0, pi]");
    if (!(phi >= -pi && phi <= pi))
        throw std::domain_error("Direction: phi out of [-pi, pi]");
}

UnitVec direction_to_unit(const Direction& dir) {
    return unit_from_angles(dir.theta, dir.phi);
}

UnitVec unit_from_angles(double theta, double phi) {
    const double st = std::sin(theta);
    return UnitVec{st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

ArrayGeometry build_ura(double aperture_side, double spacing) {
    if (!(aperture_side > 0.0) || !(spacing > 0.0))
        throw std::domain_error("build_ura: aperture side and spacing must be positive");
    const double ratio = aperture_side / spacing;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        throw std::domain_error("build_ura: L/d must be a positive integer");
    const auto side = static_cast<std::size_t>(rounded);

    ArrayGeometry geom;
    geom.layout = Layout::UraYz;
    geom.aperture_side = aperture_side;
    geom.spacing = spacing;
    geom.positions.reserve(side * side);
    // Row-major: z descends from the top row down, y ascends within a row.
    for (std::size_t r = 0; r < side; ++r) {
        const double z = aperture_side / 2.0 - (static_cast<double>(r) + 0.5) * spacing;
        for (std::size_t c = 0; c < side; ++c) {
            const double y = -aperture_side / 2.0 + (static_cast<double>(c) + 0.5) * spacing;
            geom.positions.push_back({0.0, y, z});
        }
    }
    return geom;
}

ArrayGeometry build_ula(std::size_t count, double spacing) {
    if (count == 0) throw std::domain_error("build_ula: count must be positive");
    if (!(spacing > 0.0)) throw std::domain_error("build_ula: spacing must be positive");

    ArrayGeometry geom;
    geom.layout = Layout::UlaZ;
    geom.spacing = spacing;
    geom.positions.reserve(count);
    const double half = 0.5 * spacing * static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        geom.positions.push_back({0.0, 0.0, half - spacing * static_cast<double>(i)});
    return geom;
}

ArrayGeometry make_arbitrary(std::vector<Vec3> positions) {
    if (positions.empty()) throw std::domain_error("make_arbitrary: no positions");
    ArrayGeometry geom;
    geom.layout = Layout::Arbitrary;
    geom.positions = std::move(positions);
    return geom;
}

}  // namespace holosurf
