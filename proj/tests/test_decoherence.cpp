#include <cmath>
#include <complex>
#include <numbers>

#include <doctest.h>

#include "dmdeco/decoherence.hpp"
#include "dmdeco/error.hpp"
#include "dmdeco/random.hpp"
#include "dmdeco/targets.hpp"
#include "dmdeco/units.hpp"
#include "oracles.hpp"
#include "panel.hpp"

using namespace dmdeco;
using doctest::Approx;

namespace
{
struct Fixture
{
    HaloModel halo = HaloModel::standard();
    WindState wind = wind_velocity(halo, mean_wind_day(halo));
    TargetComposition comp = builtin_target("OTIMA-6").composition();
    double m_dm = units::mass_from_ev(1e4);
    // Separation with m v0 L / hbar = 1
    double unit_length() const { return constants::hbar / (m_dm * halo.v0); }
};

ScatteringModel pointlike(double sigma_cm2 = 1e-30)
{
    return {sigma_cm2 * units::cm2, ScatterMode::pointlike};
}

ScatteringModel extended(double sigma_cm2 = 1e-30)
{
    return {sigma_cm2 * units::cm2, ScatterMode::extended};
}

// Pointlike F for dx along the wind, straight from the isotropic kernel
std::complex<double> pointlike_parallel_oracle(Fixture const& f, double length)
{
    double const sigma = pointlike_cross_section(pointlike(), f.comp);
    double const n = number_density(f.halo, f.m_dm);
    double const kl = f.m_dm * length / constants::hbar;
    auto sinc = [](double y) { return y == 0 ? 1.0 : std::sin(y) / y; };
    double const re = oracle::lab_average(f.halo, f.wind.speed(), [&](double v, double mu) {
        double const a = kl * v;
        return v * (1 - std::cos(a * mu) * sinc(a));
    });
    double const im = oracle::lab_average(f.halo, f.wind.speed(), [&](double v, double mu) {
        double const a = kl * v;
        return v * std::sin(a * mu) * sinc(a);
    });
    return n * sigma * std::complex<double>(re, im);
}
}  // namespace

TEST_SUITE("decoherence")
{
    TEST_CASE("zero separation gives exactly zero")
    {
        Fixture f;
        for (auto const& model : {pointlike(), extended()})
        {
            auto const r = decoherence_rate(f.halo, f.wind, model, f.comp, f.m_dm, {0, 0, 0});
            CHECK(r.F.real() == 0);
            CHECK(r.F.imag() == 0);
        }
    }

    TEST_CASE("large separation reaches the total scattering rate")
    {
        // Rubidium at 1 eV and 10 m: phase ~ 4e4
        panel::Point const p{"", "AGIS", ScatterMode::extended, 1.0, 10.0, 0, 61.1875, {}};
        auto const s = panel::setup(p);
        auto const far = decoherence_rate(s.halo, s.wind, s.model, s.comp, s.m_dm, s.dx);
        auto const total = total_scattering_rate(s.halo, s.wind, s.model, s.comp, s.m_dm);
        CHECK(far.F.real() == Approx(total.F.real()).epsilon(5e-3));

        // Pointlike: n sigma <v>
        Fixture f;
        double const sigma = pointlike_cross_section(pointlike(), f.comp);
        double const mean_v = oracle::lab_average(f.halo, f.wind.speed(), [](double v, double) { return v; });
        double const expected = number_density(f.halo, f.m_dm) * sigma * mean_v;
        auto const pt = decoherence_rate(
            f.halo, f.wind, pointlike(), f.comp, f.m_dm, {0, 0, 1e4 * f.unit_length()});
        CHECK(pt.F.real() == Approx(expected).epsilon(5e-3));
        auto const tot = total_scattering_rate(f.halo, f.wind, pointlike(), f.comp, f.m_dm);
        CHECK(tot.F.real() == Approx(expected).epsilon(1e-6));
    }

    TEST_CASE("pointlike rate against direct quadrature")
    {
        Fixture f;
        for (double phase : {0.1, 1.0, 3.0, 20.0})
        {
            double const length = phase * f.unit_length();
            auto const q = decoherence_rate(f.halo, f.wind, pointlike(), f.comp, f.m_dm, {0, 0, length});
            auto const o = pointlike_parallel_oracle(f, length);
            CAPTURE(phase);
            CHECK(q.F.real() == Approx(o.real()).epsilon(3e-4));
            CHECK(std::abs(q.F.imag() - o.imag()) <= 3e-4 * std::abs(o));
        }
    }

    TEST_CASE("small object tends to the point scatterer")
    {
        Fixture f;
        auto comp = f.comp;
        comp.radius = 1e-15;
        Vec3 const dx = separation_vector(2 * f.unit_length(), 0.7);
        auto const e = decoherence_rate(f.halo, f.wind, extended(), comp, f.m_dm, dx);
        auto const p = decoherence_rate(f.halo, f.wind, pointlike(), comp, f.m_dm, dx);
        CHECK(e.F.real() == Approx(p.F.real()).epsilon(1e-3));
        CHECK(std::abs(e.F.imag() - p.F.imag()) <= 1e-3 * std::abs(p.F));
    }

    TEST_CASE("linear in the nucleon cross-section")
    {
        Fixture f;
        Vec3 const dx = separation_vector(f.unit_length(), 0.3);
        for (auto mode : {ScatterMode::pointlike, ScatterMode::extended})
        {
            auto const a = decoherence_rate(f.halo, f.wind, {1e-34, mode}, f.comp, f.m_dm, dx);
            auto const b = decoherence_rate(f.halo, f.wind, {2e-34, mode}, f.comp, f.m_dm, dx);
            CHECK(b.F.real() == Approx(2 * a.F.real()).epsilon(1e-12));
            CHECK(b.F.imag() == Approx(2 * a.F.imag()).epsilon(1e-12));
        }
    }

    TEST_CASE("coherent enhancement scales as N squared")
    {
        Fixture f;
        f.m_dm = units::mass_from_ev(1e2);  // k R << 1
        Vec3 const dx = separation_vector(f.unit_length(), 0);
        auto small = f.comp;
        auto large = f.comp;
        large.nucleus_count *= 10;
        large.radius *= std::cbrt(10.0);
        auto const a = decoherence_rate(f.halo, f.wind, extended(), small, f.m_dm, dx);
        auto const b = decoherence_rate(f.halo, f.wind, extended(), large, f.m_dm, dx);
        CHECK(b.F.real() / a.F.real() == Approx(100).epsilon(0.05));
    }

    TEST_CASE("mirrored separation conjugates the rate")
    {
        Fixture f;
        Vec3 const dx = separation_vector(1.5 * f.unit_length(), 0.4);
        for (auto const& model : {pointlike(), extended()})
        {
            auto const a = decoherence_rate(f.halo, f.wind, model, f.comp, f.m_dm, dx);
            auto const b = decoherence_rate(f.halo, f.wind, model, f.comp, f.m_dm, -1.0 * dx);
            CHECK(b.F.real() == Approx(a.F.real()).epsilon(1e-4));
            CHECK(std::abs(b.F.imag() + a.F.imag()) <= 1e-4 * std::abs(a.F));
        }
    }

    TEST_CASE("no wind means no direction")
    {
        Fixture f;
        WindState const still{{0, 0, 0}, 0};
        for (auto const& model : {pointlike(), extended()})
        {
            auto const r = anisotropy_ratio(f.halo, still, model, f.comp, f.m_dm, f.unit_length());
            CHECK(r.ratio == Approx(1).epsilon(3e-4));
            CHECK(std::abs(r.parallel.F.imag()) <= 1e-4 * r.parallel.F.real());
        }
    }

    TEST_CASE("real part bounded at random points")
    {
        PhiloxStream rng(99, 0);
        Fixture f;
        for (int i = 0; i < 100; ++i)
        {
            double const mass_ev = std::pow(10.0, 1 + 5 * rng.uniform());
            double const phase = std::pow(10.0, -2 + 3 * rng.uniform());
            double const angle = std::numbers::pi * rng.uniform();
            bool const ext = i % 5 == 0;
            double const m = units::mass_from_ev(mass_ev);
            double const length = phase * constants::hbar / (m * f.halo.v0);
            auto const model = ext ? extended() : pointlike();
            CAPTURE(i);
            CAPTURE(mass_ev);
            CAPTURE(phase);
            auto const r = decoherence_rate(
                f.halo, f.wind, model, f.comp, m, separation_vector(length, angle));
            auto const total = total_scattering_rate(f.halo, f.wind, model, f.comp, m);
            CHECK(r.F.real() >= -r.error_re);
            CHECK(r.F.real() <= 2 * total.F.real() + r.error_re);
        }
    }

    TEST_CASE("exponent from a rate")
    {
        RateResult r;
        r.F = {2.0, -0.5};
        auto const g = exponent(r, 3.0);
        CHECK(g.re == 6.0);
        CHECK(g.im == -1.5);

        r.F = {-1e-12, 0};
        r.error_re = 1e-10;
        CHECK(exponent(r, 1.0).re == 0);

        r.F = {-1.0, 0};
        r.error_re = 1e-3;
        CHECK_THROWS_AS(exponent(r, 1.0), NumericalError);
    }

    TEST_CASE("regression panel")
    {
        for (auto const& p : panel::points)
        {
            auto const s = panel::setup(p);
            auto const r = decoherence_rate(s.halo, s.wind, s.model, s.comp, s.m_dm, s.dx);
            CAPTURE(p.label);
            double const scale = std::abs(p.pinned);
            CHECK(std::abs(r.F.real() - p.pinned.real()) <= 3e-4 * scale);
            CHECK(std::abs(r.F.imag() - p.pinned.imag()) <= 3e-4 * scale);
        }
    }

    TEST_CASE("anisotropy")
    {
        Fixture f;
        auto const r = anisotropy_ratio(f.halo, f.wind, extended(), f.comp, f.m_dm, f.unit_length());
        // Sampling estimate (1e7 samples): 1.37755 +- 0.00078
        CHECK(r.ratio == Approx(1.3767).epsilon(2e-3));
        CHECK(r.ratio > 1.05);
        CHECK(r.ratio < 5);

        auto const far = anisotropy_ratio(f.halo, f.wind, extended(), f.comp, f.m_dm, 100 * f.unit_length());
        CHECK(far.ratio == Approx(1).epsilon(2e-3));

        // Short separations: Re F ~ (m L / hbar)^2 <v^3 w(mu)> with
        // w = mu^2/2 + 1/6 along the wind, (1 - mu^2)/4 + 1/6 across it
        auto const near = anisotropy_ratio(f.halo, f.wind, pointlike(), f.comp, f.m_dm, 1e-3 * f.unit_length());
        double const par = oracle::lab_average(f.halo, f.wind.speed(), [](double v, double mu) {
            return v * v * v * (mu * mu / 2 + 1.0 / 6);
        });
        double const perp = oracle::lab_average(f.halo, f.wind.speed(), [](double v, double mu) {
            return v * v * v * ((1 - mu * mu) / 4 + 1.0 / 6);
        });
        CHECK(near.ratio == Approx(par / perp).epsilon(1e-4));
    }

    TEST_CASE("invalid input")
    {
        Fixture f;
        CHECK_THROWS_AS(decoherence_rate(f.halo, f.wind, extended(), f.comp, -1.0, {0, 0, 1e-9}),
                        InvalidInput);
        CHECK_THROWS_AS(anisotropy_ratio(f.halo, f.wind, extended(), f.comp, f.m_dm, 0.0), InvalidInput);
    }
}
