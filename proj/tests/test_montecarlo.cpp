#include <cmath>
#include <numeric>

#include <boost/math/distributions/binomial.hpp>
#include <doctest.h>

#include "dmdeco/core.hpp"
#include "dmdeco/error.hpp"
#include "dmdeco/montecarlo.hpp"
#include "dmdeco/random.hpp"
#include "dmdeco/units.hpp"

using namespace dmdeco;
using doctest::Approx;

namespace
{
CampaignInputs quiet_campaign(std::uint64_t shots, double background, std::uint64_t seed)
{
    CampaignInputs in;
    in.target = builtin_target("OTIMA-6");
    in.halo = HaloModel::standard();
    in.model = {0.0, ScatterMode::extended};
    in.m_dm = units::mass_from_ev(1e4);
    in.shots = shots;
    in.window_days = 0;
    in.gamma_background = background;
    in.seed = seed;
    return in;
}
}  // namespace

TEST_SUITE("montecarlo")
{
    TEST_CASE("philox known answers")
    {
        CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0})
              == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
        CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                            {0xffffffff, 0xffffffff})
              == PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
        CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                            {0xa4093822, 0x299f31d0})
              == PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});

        PhiloxStream a(5, 9);
        PhiloxStream b(5, 9);
        PhiloxStream c(5, 10);
        double sum = 0;
        int same = 0;
        for (int i = 0; i < 100000; ++i)
        {
            double const u = a.uniform();
            CHECK(u > 0);
            CHECK(u < 1);
            CHECK(u == b.uniform());
            same += u == c.uniform();
            sum += u;
        }
        CHECK(same == 0);
        CHECK(sum / 100000 == Approx(0.5).epsilon(0.01));
    }

    TEST_CASE("sampling estimate at zero separation")
    {
        auto const halo = HaloModel::standard();
        auto const wind = wind_velocity(halo, 100);
        auto const comp = builtin_target("OTIMA-6").composition();
        auto const e = mc_rate(halo, wind, {1e-34, ScatterMode::extended}, comp,
                               units::mass_from_ev(1e4), {0, 0, 0}, 10000, 3);
        CHECK(e.F == std::complex<double>(0, 0));
        CHECK(e.se_re == 0);
        CHECK(e.samples == 10000);
        CHECK(e.attempts >= e.samples);
        CHECK_THROWS_AS(mc_rate(halo, wind, {1e-34, ScatterMode::extended}, comp,
                                units::mass_from_ev(1e4), {0, 0, 1e-9}, 999, 3),
                        InvalidInput);
    }

    TEST_CASE("standard error shrinks as one over root n")
    {
        auto const halo = HaloModel::standard();
        auto const wind = wind_velocity(halo, 100);
        auto const comp = builtin_target("OTIMA-6").composition();
        double const m = units::mass_from_ev(1e4);
        Vec3 const dx{0, 0, 1e-7};
        ScatteringModel const model{1e-34, ScatterMode::pointlike};
        double ratio = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed)
        {
            auto const a = mc_rate(halo, wind, model, comp, m, dx, 20000, seed);
            auto const b = mc_rate(halo, wind, model, comp, m, dx, 40000, seed + 100);
            ratio += b.se_re / a.se_re;
        }
        CHECK(ratio / 20 == Approx(1 / std::sqrt(2.0)).epsilon(0.2));
    }

    TEST_CASE("sampling estimate independent of thread count")
    {
        auto const halo = HaloModel::standard();
        auto const wind = wind_velocity(halo, 100);
        auto const comp = builtin_target("Nanosphere").composition();
        double const m = units::mass_from_ev(1e4);
        ScatteringModel const model{1e-34, ScatterMode::extended};
        auto const a = mc_rate(halo, wind, model, comp, m, {1e-8, 0, 1e-8}, 50000, 8, 1);
        auto const b = mc_rate(halo, wind, model, comp, m, {1e-8, 0, 1e-8}, 50000, 8, 4);
        CHECK(a.F == b.F);
        CHECK(a.se_re == b.se_re);
        CHECK(a.attempts == b.attempts);
    }

    TEST_CASE("exact binomial intervals")
    {
        auto const ci = clopper_pearson(5, 10, 0.95);
        CHECK(ci.lo == Approx(0.187086).epsilon(1e-5));
        CHECK(ci.hi == Approx(0.812914).epsilon(1e-5));
        auto const zero = clopper_pearson(0, 10, 0.95);
        CHECK(zero.lo == 0);
        CHECK(zero.hi == Approx(1 - std::pow(0.025, 0.1)).epsilon(1e-9));
        auto const all = clopper_pearson(10, 10, 0.95);
        CHECK(all.hi == 1);
        CHECK_THROWS_AS(clopper_pearson(11, 10, 0.95), InvalidInput);

        auto const acc = binomial_acceptance(10000, 0.5, 0.99);
        CHECK(acc.lo < 5000);
        CHECK(acc.hi > 5000);
        // Each tail outside the region holds at most 0.5%; rounding outwards
        // widens the region by at most one count per side
        boost::math::binomial_distribution<> const dist(10000, 0.5);
        CHECK(boost::math::cdf(dist, acc.lo - 1.0) <= 0.005);
        CHECK(boost::math::cdf(dist, acc.lo + 1.0) > 0.005);
        CHECK(boost::math::cdf(boost::math::complement(dist, acc.hi)) <= 0.005);
        CHECK(boost::math::cdf(boost::math::complement(dist, acc.hi - 2.0)) > 0.005);
    }

    TEST_CASE("no interaction means no dim shots")
    {
        auto const r = simulate_campaign(quiet_campaign(5000, 0, 4));
        CHECK(r.summary.dim == 0);
        CHECK(r.summary.dim_fraction == 0);
        for (auto const& s : r.records)
            CHECK(s.gamma == std::complex<double>(1, 0));
    }

    TEST_CASE("strong decoherence gives half dim")
    {
        auto in = quiet_campaign(10000, 0, 21);
        // Re Gamma ~ 90 per shot
        in.model.sigma_n = 1e-19 * units::cm2;
        in.window_days = 20;
        auto const r = simulate_campaign(in);
        double min_re = 1e300;
        for (auto const& s : r.records)
            min_re = std::min(min_re, -std::log(std::abs(s.gamma)));
        CHECK(min_re >= 5);
        auto const acc = binomial_acceptance(10000, 0.5, 0.99);
        CHECK(r.summary.dim >= acc.lo);
        CHECK(r.summary.dim <= acc.hi);
        CHECK(r.summary.ci99.lo < 0.5);
        CHECK(r.summary.ci99.hi > 0.5);
    }

    TEST_CASE("known visibility is reproduced statistically")
    {
        // Re Gamma = 0.7: p_dim = (1 - e^-0.7) / 2
        double const p = dim_port_probability(gamma_from_exponent({0.7, 0}));
        auto const acc = binomial_acceptance(1000, p, 0.99);
        int inside = 0;
        for (std::uint64_t trial = 0; trial < 1000; ++trial)
        {
            auto const r = simulate_campaign(quiet_campaign(1000, 0.7, 1000 + trial));
            inside += r.summary.dim >= acc.lo && r.summary.dim <= acc.hi;
        }
        CHECK(inside >= 980);
    }

    TEST_CASE("campaign independent of thread count")
    {
        auto in = quiet_campaign(3000, 0.1, 77);
        in.model.sigma_n = 1e-30 * units::cm2;
        in.window_days = 20;
        auto const a = simulate_campaign(in, 1);
        auto const b = simulate_campaign(in, 3);
        CHECK(campaign_csv(a) == campaign_csv(b));
        CHECK(a.summary.dim == b.summary.dim);
        in.seed = 78;
        CHECK(campaign_csv(simulate_campaign(in, 2)) != campaign_csv(a));
    }

    TEST_CASE("annual modulation")
    {
        auto const halo = HaloModel::standard();
        auto const t = builtin_target("OTIMA-6");
        ScatteringModel const model{1e-30 * units::cm2, ScatterMode::extended};
        double const m = units::mass_from_ev(1e4);
        auto quarter_mean = [&](double centre) {
            double sum = 0;
            for (int i = -4; i <= 4; ++i)
            {
                auto const wind = wind_velocity(halo, centre + 10.0 * i);
                sum += decoherence_rate(halo, wind, model, t.composition(), m,
                                        t.separation_vector())
                           .F.real();
            }
            return sum / 9;
        };
        CHECK(quarter_mean(halo.peak_day) > quarter_mean(halo.peak_day + 182.625));
    }

    TEST_CASE("campaign records")
    {
        auto in = quiet_campaign(4, 0.2, 5);
        in.start_day = 10;
        in.window_days = 8;
        auto const r = simulate_campaign(in);
        REQUIRE(r.records.size() == 4);
        CHECK(r.records[1].day == 12);
        CHECK(r.records[3].day == 16);
        auto const csv = campaign_csv(r);
        CHECK(csv.rfind("shot,day,gamma_re,gamma_im,outcome\n", 0) == 0);
        in.shots = 0;
        CHECK_THROWS_AS(simulate_campaign(in), InvalidInput);
    }
}
