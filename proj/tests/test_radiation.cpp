// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "holosurf/geometry.hpp"
#include "holosurf/radiation.hpp"

using namespace holosurf;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double four_pi = 4.0 * std::numbers::pi;

double sphere_mean(const RadiationPattern& p, const SphericalQuadrature& q) {
    return spherical_integral([&](const UnitVec& u) { return p.value(u); }, q) / four_pi;
}
}  // namespace

TEST_CASE("quadrature weights sum to the sphere area") {
    for (const auto& [np, na] : {std::pair{64, 128}, std::pair{256, 512}, std::pair{31, 57}}) {
        const SphericalQuadrature q = SphericalQuadrature::build(np, na);
        double sum = 0.0;
        for (const auto& node : q.nodes) sum += node.weight;
        CHECK(std::abs(sum - four_pi) < 1e-10);
        CHECK(q.n_polar() == static_cast<std::size_t>(np));
        CHECK(q.n_azimuth() == static_cast<std::size_t>(na));
        for (const auto& node : q.nodes) {
            const double n2 = node.u.x * node.u.x + node.u.y * node.u.y + node.u.z * node.u.z;
            CHECK(std::abs(n2 - 1.0) < 1e-12);
        }
    }
    CHECK_THROWS_AS(SphericalQuadrature::build(0, 8), std::invalid_argument);
}

TEST_CASE("quadrature integrates low-order moments exactly") {
    const SphericalQuadrature q = SphericalQuadrature::build(16, 32);
    const double m0 = spherical_integral([](const UnitVec&) { return 1.0; }, q);
    CHECK(m0 == doctest::Approx(four_pi).epsilon(1e-14));
    // Second moment of each axis is 1/3 of the area.
    const double mzz = spherical_integral([](const UnitVec& u) { return u.z * u.z; }, q);
    CHECK(mzz == doctest::Approx(four_pi / 3.0).epsilon(1e-13));
    const double myy = spherical_integral([](const UnitVec& u) { return u.y * u.y; }, q);
    CHECK(myy == doctest::Approx(four_pi / 3.0).epsilon(1e-13));
    // Odd moments vanish by symmetry of the rule.
    const double mz = spherical_integral([](const UnitVec& u) { return u.z; }, q);
    CHECK(std::abs(mz) < 1e-14);
    const double my = spherical_integral([](const UnitVec& u) { return u.y; }, q);
    CHECK(std::abs(my) < 1e-14);
}

TEST_CASE("isotropic pattern is one everywhere") {
    const RadiationPattern p = RadiationPattern::isotropic();
    CHECK(p.kind() == PatternKind::Isotropic);
    CHECK(p.value(unit_from_angles(0.3, -2.0)) == 1.0);
    CHECK(p.value(1.2, 0.4) == 1.0);
    CHECK(p.azimuth_invariant());
}

TEST_CASE("all patterns average to one over the sphere") {
    const SphericalQuadrature fine = SphericalQuadrature::build(256, 512);
    CHECK(std::abs(sphere_mean(RadiationPattern::isotropic(), fine) - 1.0) < 1e-12);
    CHECK(std::abs(sphere_mean(RadiationPattern::directional(fine), fine) - 1.0) < 1e-6);
    CHECK(std::abs(sphere_mean(RadiationPattern::dipole(0.5, fine), fine) - 1.0) < 1e-6);
    CHECK(std::abs(sphere_mean(RadiationPattern::dipole(0.1, fine), fine) - 1.0) < 1e-6);
    CHECK(std::abs(sphere_mean(RadiationPattern::dipole(1.47, fine), fine) - 1.0) < 1e-6);

    // Coarse rules keep the normalization loosely.
    const SphericalQuadrature coarse = SphericalQuadrature::build(64, 128);
    CHECK(std::abs(sphere_mean(RadiationPattern::directional(coarse), coarse) - 1.0) < 1e-3);
    CHECK(std::abs(sphere_mean(RadiationPattern::dipole(0.5, coarse), coarse) - 1e0) < 1e-3);
}

TEST_CASE("sector pattern boresight and attenuation structure") {
    const RadiationPattern p = RadiationPattern::directional();
    const double bore = p.value(pi / 2.0, 0.0);
    // Independent evaluation of the same rule (256x512) pins the convention...
    CHECK(bore == doctest::Approx(9.606569691186342).epsilon(1e-12));
    // ...and the grid-converged value bounds the default rule's truncation error.
    CHECK(bore == doctest::Approx(9.60656983372171).epsilon(1e-6));
    CHECK(10.0 * std::log10(bore) == doctest::Approx(9.825683441498128).epsilon(1e-6));

    // At one half-power-width off boresight in azimuth the raw attenuation is
    // exactly 12 dB; the floor clips everything at 30 dB.
    const double at_65 = p.value(pi / 2.0, 65.0 * pi / 180.0);
    CHECK(at_65 / bore == doctest::Approx(std::pow(10.0, -1.2)).epsilon(1e-12));
    const double behind = p.value(pi / 2.0, pi);
    CHECK(behind / bore == doctest::Approx(1e-3).epsilon(1e-12));
    // Straight up: vertical attenuation alone, 12*(90/65)^2 dB, below the floor.
    const double up = p.value(0.0, 0.0);
    const double up_db = 1.2 * (90.0 / 65.0) * (90.0 / 65.0);
    CHECK(up / bore == doctest::Approx(std::pow(10.0, -up_db)).epsilon(1e-12));
    CHECK_FALSE(p.azimuth_invariant());
    CHECK(p.kind() == PatternKind::Directional);
}

TEST_CASE("dipole boresight directivities match frozen references") {
    const RadiationPattern half = RadiationPattern::dipole(0.5);
    CHECK(half.value(pi / 2.0, 1.234) == doctest::Approx(1.640922376984585).epsilon(1e-9));
    const RadiationPattern tenth = RadiationPattern::dipole(0.1);
    CHECK(tenth.value(pi / 2.0, -0.7) == doctest::Approx(1.5049598485591635).epsilon(1e-9));
    CHECK(half.dipole_length() == doctest::Approx(0.5));
}

TEST_CASE("dipole pattern is azimuth invariant with axial nulls") {
    const RadiationPattern p = RadiationPattern::dipole(0.5);
    CHECK(p.azimuth_invariant());
    for (double theta : {0.2, 0.9, 1.5, 2.4}) {
        const double a = p.value(theta, 0.0);
        const double b = p.value(theta, 2.0);
        const double c = p.value(theta, -3.0);
        CHECK(a == doctest::Approx(b).epsilon(1e-14));
        CHECK(a == doctest::Approx(c).epsilon(1e-14));
    }
    CHECK(p.value(0.0, 0.0) == 0.0);
    CHECK(p.value(pi, 0.5) == 0.0);
    // Symmetric about the equator.
    CHECK(p.value(0.7, 0.0) == doctest::Approx(p.value(pi - 0.7, 0.0)).epsilon(1e-12));
}

TEST_CASE("dipole length validation") {
    CHECK_THROWS_AS(RadiationPattern::dipole(0.0), std::domain_error);
    CHECK_THROWS_AS(RadiationPattern::dipole(-0.3), std::domain_error);
    CHECK_NOTHROW(RadiationPattern::dipole(1.0));
}

TEST_CASE("angle-based and vector-based evaluation agree") {
    const RadiationPattern p = RadiationPattern::directional();
    for (double theta : {0.1, 1.0, 2.0}) {
        for (double phi : {-2.5, 0.0, 0.3, 3.0}) {
            const double via_angles = p.value(theta, phi);
            const double via_vector = p.value(unit_from_angles(theta, phi));
            CHECK(via_angles == doctest::Approx(via_vector).epsilon(1e-12));
        }
    }
}
