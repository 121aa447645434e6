#include <cmath>
#include <numbers>

#include <doctest.h>

#include "dmdeco/config.hpp"
#include "dmdeco/error.hpp"
#include "dmdeco/targets.hpp"
#include "dmdeco/units.hpp"

using namespace dmdeco;
using doctest::Approx;

TEST_SUITE("targets")
{
    TEST_CASE("presets")
    {
        auto const all = builtin_targets();
        REQUIRE(all.size() == 3);

        auto const otima = builtin_target("OTIMA-6");
        CHECK(units::mass_to_amu(otima.total_mass) == Approx(1e6).epsilon(1e-12));
        CHECK(otima.nucleus_A == 197);
        CHECK(otima.nucleus_count() == Approx(1e6 / 197).epsilon(1e-12));
        // Gold sphere at 19.32 g/cm^3
        double const r = std::cbrt(3 * otima.total_mass / (4 * std::numbers::pi * 19320));
        CHECK(otima.radius == Approx(r).epsilon(1e-12));
        CHECK(otima.radius == Approx(2.7377e-9).epsilon(1e-4));
        CHECK(otima.provenance.at("total_mass_amu") == "stated");
        CHECK(otima.provenance.at("separation_m") == artifact_default);

        auto const sphere = builtin_target("Nanosphere");
        CHECK(sphere.radius == Approx(20 * units::nm).epsilon(1e-12));
        CHECK(sphere.nucleus_A == 28);
        // Mass from the silicon bulk density
        double const v = 4.0 / 3 * std::numbers::pi * std::pow(sphere.radius, 3);
        CHECK(sphere.total_mass == Approx(2329 * v).epsilon(1e-12));

        auto const agis = builtin_target("AGIS");
        CHECK(agis.nucleus_A == 87);
        CHECK(agis.nucleus_count() == Approx(1).epsilon(1e-12));
        CHECK(agis.radius == 0);

        for (auto const& t : all)
            CHECK_NOTHROW(t.validate());
        CHECK_THROWS_AS(builtin_target("NoSuchExperiment"), InvalidInput);
    }

    TEST_CASE("composition and orientation")
    {
        auto t = builtin_target("OTIMA-6");
        auto const c = t.composition();
        CHECK(c.nucleons_per_nucleus == 197);
        CHECK(c.nucleus_count == Approx(t.nucleus_count()));
        CHECK(c.radius == t.radius);

        t.separation = 1e-7;
        t.orientation = Orientation::parallel;
        CHECK(t.wind_angle() == 0);
        CHECK(t.separation_vector().z == Approx(1e-7));
        t.orientation = Orientation::perpendicular;
        CHECK(t.wind_angle() == Approx(std::numbers::pi / 2));
        CHECK(std::abs(t.separation_vector().z) < 1e-20);
        t.orientation = Orientation::angle;
        t.angle = std::numbers::pi / 3;
        CHECK(t.separation_vector().z == Approx(0.5e-7));

        CHECK(orientation_from_string(to_string(Orientation::angle)) == Orientation::angle);
        CHECK_THROWS_AS(orientation_from_string("sideways"), InvalidInput);
    }

    TEST_CASE("validation")
    {
        auto t = builtin_target("OTIMA-6");
        t.separation = 0;
        t.exposure = 0;
        CHECK_NOTHROW(t.validate());

        auto bad = t;
        bad.total_mass = -1;
        CHECK_THROWS_AS(bad.validate(), InvalidInput);
        bad = t;
        bad.separation = -1e-9;
        CHECK_THROWS_AS(bad.validate(), InvalidInput);
        bad = t;
        bad.shots = 0;
        CHECK_THROWS_AS(bad.validate(), InvalidInput);
        bad = t;
        bad.orientation = Orientation::angle;
        bad.angle = 4;
        CHECK_THROWS_AS(bad.validate(), InvalidInput);
    }

    TEST_CASE("exposure and mass scaling")
    {
        CHECK(time_domain_exposure(1e-3, 2.0, 4.0) == Approx(2e-3));
        CHECK(radius_from_bulk_density(4.0 / 3 * std::numbers::pi * 1000, 1000) == Approx(1.0));

        auto const t = builtin_target("OTIMA-6");
        auto const big = scale_target_mass(t, 8 * t.total_mass);
        CHECK(big.total_mass == Approx(8 * t.total_mass));
        CHECK(big.radius == Approx(2 * t.radius).epsilon(1e-12));
        CHECK(big.exposure == Approx(8 * t.exposure).epsilon(1e-12));
        CHECK(big.nucleus_count() == Approx(8 * t.nucleus_count()));

        // Without a bulk density the radius follows mass^(1/3)
        auto plain = t;
        plain.bulk_density = 0;
        auto const p2 = scale_target_mass(plain, 27 * t.total_mass);
        CHECK(p2.radius == Approx(3 * t.radius).epsilon(1e-12));
    }

    TEST_CASE("target block round trip")
    {
        for (auto const& block : builtin_target_blocks())
        {
            auto const text = to_yaml(block);
            auto const back = parse_target_block(text);
            CAPTURE(text);
            CHECK(back == block);
        }
        auto const blocks = builtin_target_blocks();
        auto const spec = blocks.front().spec();
        CHECK(spec.name == "OTIMA-6");
        CHECK(spec.exposure == blocks.front().exposure_s);
    }
}
