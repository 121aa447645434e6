#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <doctest.h>

#include "dmdeco/error.hpp"
#include "dmdeco/random.hpp"
#include "dmdeco/scattering.hpp"
#include "dmdeco/units.hpp"
#include "oracles.hpp"

using namespace dmdeco;
using doctest::Approx;

namespace
{
// 3 (sin x - x cos x) / x^3 written out directly
double ff_closed(double x)
{
    return 3 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

TargetComposition gold_cluster()
{
    // 1e6 amu of gold at 19.32 g/cm^3
    double const mass = units::mass_from_amu(1e6);
    double const r = std::cbrt(3 * mass / (4 * std::numbers::pi * 19320));
    return {197, 1e6 / 197, r};
}
}  // namespace

TEST_SUITE("scattering")
{
    TEST_CASE("sphere form factor")
    {
        CHECK(form_factor_sphere(0) == 1);
        CHECK(form_factor_sphere(1e-6) == Approx(1).epsilon(1e-12));
        // Series and closed form meet at the switch point
        CHECK(form_factor_sphere(1.0001e-3) == Approx(ff_closed(1.0001e-3)).epsilon(1e-9));
        CHECK(form_factor_sphere(1e-3) == Approx(1 - 1e-7).epsilon(1e-13));

        // First zero: tan x = x, bracketed in (pi, 3 pi / 2)
        boost::math::tools::eps_tolerance<double> tol(50);
        auto const root = boost::math::tools::bisect(
            [](double x) { return ff_closed(x); }, 4.0, 4.7, tol);
        double const x1 = 0.5 * (root.first + root.second);
        CHECK(x1 == Approx(4.493409457909064).epsilon(1e-12));
        CHECK(std::abs(form_factor_sphere(x1)) < 1e-12);

        PhiloxStream rng(17, 0);
        for (int i = 0; i < 10000; ++i)
        {
            double const x = 100 * rng.uniform();
            CHECK(std::abs(form_factor_sphere(x)) <= 1);
        }
    }

    TEST_CASE("form factor moment")
    {
        for (double x : {1e-3, 0.1, 0.49, 0.51, 1.0, 3.0, 10.0, 57.0})
        {
            double const ref = oracle::gk(
                [](double y) {
                    double const f = y < 1e-3 ? 1 - y * y / 10 : ff_closed(y);
                    return y * f * f;
                },
                0,
                x,
                1e-13);
            CHECK(form_factor_sq_moment(x) == Approx(ref).epsilon(1e-11));
        }
        CHECK(form_factor_sq_moment(0) == 0);
        CHECK(form_factor_sq_moment(1e6) == Approx(2.25).epsilon(1e-11));
    }

    TEST_CASE("differential cross-section")
    {
        ScatteringModel const m{1e-34, ScatterMode::extended};
        auto const c = gold_cluster();
        double const pref = m.sigma_n / (4 * std::numbers::pi) * 197.0 * 197.0;
        double const n = c.nucleus_count;
        CHECK(differential_cross_section(m, c, 0) == Approx(pref * n * n).epsilon(1e-14));

        // Past many zeros F^2 averages to ~ 9/(2 x^4): the incoherent term dominates
        double const q = 2000 * constants::hbar / c.radius;
        CHECK(differential_cross_section(m, c, q) == Approx(pref * n).epsilon(1e-3));

        TargetComposition const single{197, 1, c.radius};
        for (double qq : {0.0, 1e-25, 1e-22})
            CHECK(differential_cross_section(m, single, qq) == Approx(pref).epsilon(1e-15));
        TargetComposition const nucleon{1, 1, 0};
        CHECK(differential_cross_section(m, nucleon, 1e-23) == Approx(m.sigma_n / (4 * std::numbers::pi)));

        ScatteringModel const m2{2e-34, ScatterMode::extended};
        CHECK(differential_cross_section(m2, c, q / 7) == 2 * differential_cross_section(m, c, q / 7));
    }

    TEST_CASE("total cross-section")
    {
        ScatteringModel const m{1e-34, ScatterMode::extended};
        auto c = gold_cluster();
        double const a2 = 197.0 * 197.0;
        double const n = c.nucleus_count;
        double const m_dm = units::mass_from_ev(1e5);
        double const v = 3e5;

        TargetComposition const point{197, n, 0};
        CHECK(total_cross_section(m, point, v, m_dm).value == Approx(m.sigma_n * a2 * n * n).epsilon(1e-4));
        TargetComposition const single{197, 1, c.radius};
        CHECK(total_cross_section(m, single, v, m_dm).value == Approx(m.sigma_n * a2).epsilon(1e-14));

        // Sampling over outgoing directions at k R ~ 3
        double const k = m_dm * v / constants::hbar;
        auto const xs = total_cross_section(m, c, v, m_dm).value;
        PhiloxStream rng(99, 0);
        int const samples = 1'000'000;
        double sum = 0;
        double sum2 = 0;
        for (int i = 0; i < samples; ++i)
        {
            double const mu = 2 * rng.uniform() - 1;
            double const q = constants::hbar * k * std::sqrt(2 * (1 - mu));
            double const x = 4 * std::numbers::pi * differential_cross_section(m, c, q);
            sum += x;
            sum2 += x * x;
        }
        double const mean = sum / samples;
        double const se = std::sqrt((sum2 / samples - mean * mean) / samples);
        CHECK(std::abs(xs - mean) < 3 * se);

        // Coherent enhancement bounds over a range of speeds
        for (double vv = 1e3; vv < 1e6; vv *= 2.7)
        {
            double const s = total_cross_section(m, c, vv, m_dm).value;
            CHECK(s >= m.sigma_n * a2 * n * (1 - 1e-12));
            CHECK(s <= m.sigma_n * a2 * n * n * (1 + 1e-12));
        }
        CHECK_THROWS_AS(total_cross_section(m, c, 0, m_dm), InvalidInput);
    }

    TEST_CASE("geometric-area flag")
    {
        auto const c = gold_cluster();
        double const m_dm = units::mass_from_ev(1e3);
        double const geometric = std::numbers::pi * c.radius * c.radius;
        // sigma_n N_A^2 N^2 = pi R^2 at the boundary
        double const n = c.nucleus_count;
        double const sigma_edge = geometric / (197.0 * 197.0 * n * n);
        CHECK_FALSE(total_cross_section({0.5 * sigma_edge, ScatterMode::extended}, c, 1e3, m_dm).exceeds_geometric);
        CHECK(total_cross_section({2 * sigma_edge, ScatterMode::extended}, c, 1e3, m_dm).exceeds_geometric);
    }
}
